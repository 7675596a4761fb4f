import { describe, expect, it } from "vitest";

import type { SentenceResponse } from "../src/api.js";
import { emotionLabel, sameQuadrant } from "../src/emotion.js";
import {
  canSubmit,
  initialView,
  reduce,
  timeline,
  type Action,
  type SessionView,
} from "../src/state.js";

function response(overrides: Partial<SentenceResponse> = {}): SentenceResponse {
  return {
    valence: 0,
    arousal: 1,
    label: "Agitated",
    confidence_v: 0.9,
    confidence_a: 0.8,
    reseeded: false,
    short: false,
    excerpt_midi_b64: "TVRoZA==",
    excerpt_seconds: 5.25,
    ...overrides,
  };
}

function fold(actions: Action[], start: SessionView = initialView): SessionView {
  return actions.reduce(reduce, start);
}

const connected = fold([
  { kind: "connect-started" },
  { kind: "session-created", sessionId: "abc" },
]);

describe("emotion labels", () => {
  it("maps the four corners", () => {
    expect(emotionLabel({ v: 0, a: 0 })).toBe("Suspenseful");
    expect(emotionLabel({ v: 0, a: 1 })).toBe("Agitated");
    expect(emotionLabel({ v: 1, a: 0 })).toBe("Calm");
    expect(emotionLabel({ v: 1, a: 1 })).toBe("Happy");
  });

  it("compares quadrants including null", () => {
    expect(sameQuadrant({ v: 1, a: 0 }, { v: 1, a: 0 })).toBe(true);
    expect(sameQuadrant({ v: 1, a: 0 }, { v: 0, a: 0 })).toBe(false);
    expect(sameQuadrant(null, null)).toBe(true);
    expect(sameQuadrant(null, { v: 0, a: 0 })).toBe(false);
  });
});

describe("reducer", () => {
  it("appends cards in server order", () => {
    const view = fold(
      [
        { kind: "submit-started" },
        { kind: "sentence-accepted", text: "one", overridden: false, response: response() },
        { kind: "submit-started" },
        {
          kind: "sentence-accepted",
          text: "two",
          overridden: true,
          response: response({ valence: 1, arousal: 0, label: "Calm", reseeded: true }),
        },
      ],
      connected,
    );
    expect(view.cards.map((c) => c.text)).toEqual(["one", "two"]);
    expect(view.cards[1]!.overridden).toBe(true);
    expect(view.cards[1]!.reseeded).toBe(true);
    expect(timeline(view)).toEqual([
      { v: 0, a: 1 },
      { v: 1, a: 0 },
    ]);
  });

  it("serializes submissions: pending blocks canSubmit", () => {
    const pending = reduce(connected, { kind: "submit-started" });
    expect(pending.pending).toBe(true);
    expect(canSubmit(pending, "hello")).toBe(false);
    const done = reduce(pending, {
      kind: "sentence-accepted",
      text: "hello",
      overridden: false,
      response: response(),
    });
    expect(done.pending).toBe(false);
    expect(canSubmit(done, "next")).toBe(true);
  });

  it("rejects empty or whitespace text client-side", () => {
    expect(canSubmit(connected, "")).toBe(false);
    expect(canSubmit(connected, "   ")).toBe(false);
    expect(canSubmit(initialView, "hello")).toBe(false); // no session yet
  });

  it("clears the override pick after a submission lands", () => {
    const picked = reduce(connected, { kind: "override-picked", quadrant: { v: 1, a: 1 } });
    expect(picked.overridePick).toEqual({ v: 1, a: 1 });
    const done = reduce(reduce(picked, { kind: "submit-started" }), {
      kind: "sentence-accepted",
      text: "x",
      overridden: true,
      response: response({ valence: 1, arousal: 1, label: "Happy" }),
    });
    expect(done.overridePick).toBeNull();
  });

  it("keeps at most one excerpt playing", () => {
    let view = fold(
      [
        { kind: "sentence-accepted", text: "one", overridden: false, response: response() },
        { kind: "sentence-accepted", text: "two", overridden: false, response: response() },
      ],
      connected,
    );
    view = reduce(view, { kind: "play-started", index: 0 });
    expect(view.playingIndex).toBe(0);
    view = reduce(view, { kind: "play-started", index: 1 });
    expect(view.playingIndex).toBe(1); // replaces, never two at once
    view = reduce(view, { kind: "play-stopped" });
    expect(view.playingIndex).toBeNull();
  });

  it("ignores playback on out-of-range cards", () => {
    const view = reduce(connected, { kind: "play-started", index: 3 });
    expect(view.playingIndex).toBeNull();
  });

  it("surfaces submit errors and re-enables the form", () => {
    const view = fold(
      [{ kind: "submit-started" }, { kind: "submit-failed", message: "bad_override: v and a must be 0 or 1" }],
      connected,
    );
    expect(view.pending).toBe(false);
    expect(view.error).toContain("bad_override");
  });

  it("rebuilds the card list from a server summary", () => {
    const rebuilt = reduce(initialView, {
      kind: "summary-loaded",
      summary: {
        session_id: "abc",
        total_seconds: 10.5,
        sentences: [
          { text: "one", valence: 0, arousal: 1, label: "Agitated", reseeded: false, short: false, seconds: 5.25 },
          { text: "two", valence: 1, arousal: 0, label: "Calm", reseeded: true, short: false, seconds: 5.25 },
        ],
      },
    });
    expect(rebuilt.cards.map((c) => [c.text, c.label, c.reseeded])).toEqual([
      ["one", "Agitated", false],
      ["two", "Calm", true],
    ]);
  });
});
