/** Minimal Standard MIDI File reader: just enough to schedule playback.
 * The bytes themselves are never modified — playback and download both
 * use the exact payload the server sent. */

export interface MidiNote {
  startSeconds: number;
  durationSeconds: number;
  pitch: number;
  velocity: number;
}

interface TempoChange {
  tick: number;
  microsecondsPerBeat: number;
}

class Reader {
  pos = 0;
  constructor(private readonly data: Uint8Array) {}

  get remaining(): number {
    return this.data.length - this.pos;
  }

  u8(): number {
    const b = this.data[this.pos];
    if (b === undefined) throw new Error("truncated MIDI data");
    this.pos++;
    return b;
  }

  peek(): number {
    const b = this.data[this.pos];
    if (b === undefined) throw new Error("truncated MIDI data");
    return b;
  }

  u16(): number {
    return (this.u8() << 8) | this.u8();
  }

  u32(): number {
    return (this.u16() << 16) | this.u16();
  }

  bytes(n: number): Uint8Array {
    if (this.remaining < n) throw new Error("truncated MIDI data");
    const out = this.data.subarray(this.pos, this.pos + n);
    this.pos += n;
    return out;
  }

  varlen(): number {
    let value = 0;
    for (let i = 0; i < 4; i++) {
      const b = this.u8();
      value = (value << 7) | (b & 0x7f);
      if ((b & 0x80) === 0) return value;
    }
    throw new Error("variable-length quantity too long");
  }
}

interface RawEvent {
  tick: number;
  status: number;
  data: Uint8Array;
}

function parseTrack(reader: Reader): { events: RawEvent[]; tempi: TempoChange[] } {
  const events: RawEvent[] = [];
  const tempi: TempoChange[] = [];
  let tick = 0;
  let runningStatus = 0;
  while (reader.remaining > 0) {
    tick += reader.varlen();
    let status = reader.peek();
    if (status & 0x80) {
      reader.u8();
      if (status < 0xf0) runningStatus = status;
    } else {
      if (!runningStatus) throw new Error("data byte with no running status");
      status = runningStatus;
    }
    if (status === 0xff) {
      const metaType = reader.u8();
      const payload = reader.bytes(reader.varlen());
      if (metaType === 0x51 && payload.length === 3) {
        tempi.push({
          tick,
          microsecondsPerBeat: (payload[0]! << 16) | (payload[1]! << 8) | payload[2]!,
        });
      }
      if (metaType === 0x2f) break; // end of track
    } else if (status === 0xf0 || status === 0xf7) {
      reader.bytes(reader.varlen());
    } else {
      const kind = status & 0xf0;
      const nData = kind === 0xc0 || kind === 0xd0 ? 1 : 2;
      events.push({ tick, status, data: reader.bytes(nData) });
    }
  }
  return { events, tempi };
}

/** Parse a MIDI file into absolute-time notes (SMPTE divisions excluded:
 * the service always writes ticks-per-beat files). */
export function parseMidi(bytes: Uint8Array): MidiNote[] {
  const reader = new Reader(bytes);
  if (String.fromCharCode(...reader.bytes(4)) !== "MThd") throw new Error("not a MIDI file");
  const headerLength = reader.u32();
  reader.u16(); // format
  const nTracks = reader.u16();
  const division = reader.u16();
  if (division & 0x8000) throw new Error("SMPTE division not supported");
  reader.bytes(headerLength - 6);

  const allEvents: RawEvent[] = [];
  const allTempi: TempoChange[] = [];
  for (let i = 0; i < nTracks; i++) {
    if (String.fromCharCode(...reader.bytes(4)) !== "MTrk") throw new Error("bad track chunk");
    const length = reader.u32();
    const track = parseTrack(new Reader(reader.bytes(length)));
    allEvents.push(...track.events);
    allTempi.push(...track.tempi);
  }
  allEvents.sort((x, y) => x.tick - y.tick);
  allTempi.sort((x, y) => x.tick - y.tick);

  const tempi: TempoChange[] =
    allTempi.length && allTempi[0]!.tick === 0
      ? allTempi
      : [{ tick: 0, microsecondsPerBeat: 500_000 }, ...allTempi];

  const toSeconds = (tick: number): number => {
    let seconds = 0;
    for (let i = 0; i < tempi.length; i++) {
      const current = tempi[i]!;
      const nextTick = i + 1 < tempi.length ? Math.min(tempi[i + 1]!.tick, tick) : tick;
      if (nextTick <= current.tick) break;
      seconds += ((nextTick - current.tick) / division) * (current.microsecondsPerBeat / 1e6);
    }
    return seconds;
  };

  const notes: MidiNote[] = [];
  const open = new Map<string, { tick: number; velocity: number }[]>();
  for (const ev of allEvents) {
    const kind = ev.status & 0xf0;
    const channel = ev.status & 0x0f;
    const pitch = ev.data[0]!;
    const key = `${channel}:${pitch}`;
    const isOn = kind === 0x90 && ev.data[1]! > 0;
    const isOff = kind === 0x80 || (kind === 0x90 && ev.data[1]! === 0);
    if (isOn) {
      const queue = open.get(key) ?? [];
      queue.push({ tick: ev.tick, velocity: ev.data[1]! });
      open.set(key, queue);
    } else if (isOff) {
      const queue = open.get(key);
      const started = queue?.shift();
      if (started !== undefined) {
        const start = toSeconds(started.tick);
        notes.push({
          startSeconds: start,
          durationSeconds: Math.max(toSeconds(ev.tick) - start, 0),
          pitch,
          velocity: started.velocity,
        });
      }
    }
  }
  notes.sort((x, y) => x.startSeconds - y.startSeconds || x.pitch - y.pitch);
  return notes;
}

export function totalSeconds(notes: MidiNote[]): number {
  return notes.reduce((acc, n) => Math.max(acc, n.startSeconds + n.durationSeconds), 0);
}
