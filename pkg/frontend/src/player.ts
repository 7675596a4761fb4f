/** Excerpt playback via WebAudio synthesis (one triangle voice per note).
 * The player keeps the untouched server bytes so the download link and
 * any byte-level comparison see exactly what was received. */

import { parseMidi, totalSeconds, type MidiNote } from "./midi.js";

/** The slice of AudioContext the player needs — injectable for tests. */
export interface AudioLike {
  currentTime: number;
  destination: AudioNode;
  createOscillator(): OscillatorNode;
  createGain(): GainNode;
}

export interface PlaybackHandle {
  readonly seconds: number;
  stop(): void;
}

function frequency(pitch: number): number {
  return 440 * Math.pow(2, (pitch - 69) / 12);
}

export class ExcerptPlayer {
  private bytes_: Uint8Array | null = null;
  private notes: MidiNote[] = [];
  private active: { osc: OscillatorNode; gain: GainNode }[] = [];
  private onEnded: (() => void) | null = null;
  private endTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly audio: AudioLike) {}

  /** The exact bytes currently loaded, or null. */
  get bytes(): Uint8Array | null {
    return this.bytes_;
  }

  /** Parse and hold an excerpt; does not start playback. */
  load(bytes: Uint8Array): void {
    this.notes = parseMidi(bytes); // throws on malformed data before we keep it
    this.bytes_ = bytes;
  }

  /** Start the loaded excerpt, stopping anything already playing. */
  play(onEnded?: () => void): PlaybackHandle {
    if (this.bytes_ === null) throw new Error("no excerpt loaded");
    this.stop();
    this.onEnded = onEnded ?? null;
    const t0 = this.audio.currentTime + 0.05;
    for (const note of this.notes) {
      const osc = this.audio.createOscillator();
      const gain = this.audio.createGain();
      osc.type = "triangle";
      osc.frequency.value = frequency(note.pitch);
      const level = 0.25 * (note.velocity / 127);
      const start = t0 + note.startSeconds;
      const end = start + Math.max(note.durationSeconds, 0.05);
      gain.gain.setValueAtTime(0, start);
      gain.gain.linearRampToValueAtTime(level, start + 0.01);
      gain.gain.setValueAtTime(level, Math.max(end - 0.03, start + 0.01));
      gain.gain.linearRampToValueAtTime(0, end);
      osc.connect(gain);
      gain.connect(this.audio.destination);
      osc.start(start);
      osc.stop(end);
      this.active.push({ osc, gain });
    }
    const seconds = totalSeconds(this.notes);
    this.endTimer = setTimeout(() => this.finish(), (seconds + 0.1) * 1000);
    return { seconds, stop: () => this.stop() };
  }

  stop(): void {
    for (const { osc, gain } of this.active) {
      try {
        osc.stop();
      } catch {
        // already stopped
      }
      osc.disconnect();
      gain.disconnect();
    }
    this.active = [];
    if (this.endTimer !== null) {
      clearTimeout(this.endTimer);
      this.endTimer = null;
    }
    this.onEnded = null;
  }

  private finish(): void {
    const callback = this.onEnded;
    this.stop();
    callback?.();
  }
}

/** Fallback for environments without working audio: a same-bytes blob URL. */
export function downloadUrl(bytes: Uint8Array, mime = "audio/midi"): string {
  const copy = new Uint8Array(bytes); // detach from any shared buffer view
  return URL.createObjectURL(new Blob([copy], { type: mime }));
}
