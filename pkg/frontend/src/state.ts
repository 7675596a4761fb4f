/** Pure session-view state: everything the page renders is a function of
 * this state, which in turn is a fold over server responses and local
 * playback events. Reloading and refetching the summary rebuilds the
 * same card list. */

import type { SentenceResponse, SessionSummary } from "./api.js";
import type { Quadrant } from "./emotion.js";

export type Connection = "idle" | "connecting" | "connected" | "error";

export interface SentenceCard {
  text: string;
  quadrant: Quadrant;
  label: string;
  confidence: [number, number];
  overridden: boolean;
  reseeded: boolean;
  short: boolean;
  seconds: number;
  /** exact bytes the server sent, base64; empty when rebuilt from a summary */
  midiB64: string;
}

export interface SessionView {
  sessionId: string | null;
  connection: Connection;
  pending: boolean;
  cards: SentenceCard[];
  playingIndex: number | null;
  overridePick: Quadrant | null;
  error: string | null;
}

export const initialView: SessionView = {
  sessionId: null,
  connection: "idle",
  pending: false,
  cards: [],
  playingIndex: null,
  overridePick: null,
  error: null,
};

export type Action =
  | { kind: "connect-started" }
  | { kind: "session-created"; sessionId: string }
  | { kind: "connect-failed"; message: string }
  | { kind: "override-picked"; quadrant: Quadrant | null }
  | { kind: "submit-started" }
  | { kind: "sentence-accepted"; text: string; overridden: boolean; response: SentenceResponse }
  | { kind: "submit-failed"; message: string }
  | { kind: "summary-loaded"; summary: SessionSummary }
  | { kind: "play-started"; index: number }
  | { kind: "play-stopped" };

export function reduce(view: SessionView, action: Action): SessionView {
  switch (action.kind) {
    case "connect-started":
      return { ...view, connection: "connecting", error: null };
    case "session-created":
      return { ...view, connection: "connected", sessionId: action.sessionId, cards: [] };
    case "connect-failed":
      return { ...view, connection: "error", error: action.message };
    case "override-picked":
      return { ...view, overridePick: action.quadrant };
    case "submit-started":
      return { ...view, pending: true, error: null };
    case "sentence-accepted": {
      const r = action.response;
      const card: SentenceCard = {
        text: action.text,
        quadrant: { v: r.valence, a: r.arousal },
        label: r.label,
        confidence: [r.confidence_v, r.confidence_a],
        overridden: action.overridden,
        reseeded: r.reseeded,
        short: r.short,
        seconds: r.excerpt_seconds,
        midiB64: r.excerpt_midi_b64,
      };
      return {
        ...view,
        pending: false,
        overridePick: null,
        cards: [...view.cards, card],
      };
    }
    case "submit-failed":
      return { ...view, pending: false, error: action.message };
    case "summary-loaded":
      return {
        ...view,
        sessionId: action.summary.session_id,
        connection: "connected",
        cards: action.summary.sentences.map((s) => ({
          text: s.text,
          quadrant: { v: s.valence, a: s.arousal },
          label: s.label,
          confidence: [0, 0],
          overridden: false,
          reseeded: s.reseeded,
          short: s.short,
          seconds: s.seconds,
          midiB64: "",
        })),
      };
    case "play-started":
      if (action.index < 0 || action.index >= view.cards.length) return view;
      return { ...view, playingIndex: action.index };
    case "play-stopped":
      return { ...view, playingIndex: null };
  }
}

/** One point per excerpt, in card order — the emotion timeline. */
export function timeline(view: SessionView): Quadrant[] {
  return view.cards.map((c) => c.quadrant);
}

/** Client-side validation: non-empty text, no request already in flight. */
export function canSubmit(view: SessionView, text: string): boolean {
  return view.connection === "connected" && !view.pending && text.trim().length > 0;
}
