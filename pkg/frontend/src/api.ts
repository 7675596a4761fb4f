/** Typed client for the composition service wire API (/api/v1). */

import type { Bit, Quadrant } from "./emotion.js";

export interface SentenceResponse {
  valence: Bit;
  arousal: Bit;
  label: string;
  confidence_v: number;
  confidence_a: number;
  reseeded: boolean;
  short: boolean;
  excerpt_midi_b64: string;
  excerpt_seconds: number;
}

export interface SessionSummary {
  session_id: string;
  total_seconds: number;
  sentences: {
    text: string;
    valence: Bit;
    arousal: Bit;
    label: string;
    reseeded: boolean;
    short: boolean;
    seconds: number;
  }[];
}

export interface SessionCreateOptions {
  beam_size?: number;
  expansion_k?: number;
  timestep_rate?: number;
  sentence_seconds?: number;
  rng_seed?: number;
}

export interface ServiceErrorDetail {
  code: string;
  message: string;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ServiceErrorDetail,
  ) {
    super(detail.message);
    this.name = "ServiceError";
  }
}

type FetchLike = typeof fetch;

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return;
  let detail: ServiceErrorDetail = { code: "http_error", message: `HTTP ${resp.status}` };
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "object" && body.detail.code) {
      detail = body.detail as ServiceErrorDetail;
    }
  } catch {
    // non-JSON error body: keep the generic detail
  }
  throw new ServiceError(resp.status, detail);
}

export class ComposerClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async health(): Promise<{ status: string; sessions: number }> {
    const resp = await this.fetchImpl(this.url("/healthz"));
    await raiseForStatus(resp);
    return resp.json();
  }

  async createSession(options: SessionCreateOptions = {}): Promise<string> {
    const resp = await this.fetchImpl(this.url("/api/v1/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(options),
    });
    await raiseForStatus(resp);
    const body = await resp.json();
    return body.session_id as string;
  }

  async submitSentence(
    sessionId: string,
    text: string,
    options: { durationSeconds?: number; override?: Quadrant } = {},
  ): Promise<SentenceResponse> {
    const payload: Record<string, unknown> = { text };
    if (options.durationSeconds !== undefined) payload.duration_seconds = options.durationSeconds;
    if (options.override !== undefined) {
      payload.emotion_override = { v: options.override.v, a: options.override.a };
    }
    const resp = await this.fetchImpl(this.url(`/api/v1/sessions/${sessionId}/sentences`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    await raiseForStatus(resp);
    return resp.json();
  }

  async getSummary(sessionId: string): Promise<SessionSummary> {
    const resp = await this.fetchImpl(this.url(`/api/v1/sessions/${sessionId}`));
    await raiseForStatus(resp);
    return resp.json();
  }

  async getPiece(sessionId: string): Promise<Uint8Array> {
    const resp = await this.fetchImpl(this.url(`/api/v1/sessions/${sessionId}/piece`));
    await raiseForStatus(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }

  async deleteSession(sessionId: string): Promise<{ finalized: boolean; log: string }> {
    const resp = await this.fetchImpl(this.url(`/api/v1/sessions/${sessionId}`), {
      method: "DELETE",
    });
    await raiseForStatus(resp);
    return resp.json();
  }
}

/** Decode the server's base64 MIDI payload without touching a byte. */
export function decodeBase64(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const raw = atob(b64);
    const bytes = new Uint8Array(raw.length);
    for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
    return bytes;
  }
  return new Uint8Array(Buffer.from(b64, "base64"));
}
