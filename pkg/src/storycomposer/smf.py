"""Standard MIDI File codec: byte-level read (format 0/1) and write (format 0).

Reading keeps the raw track chunks around so corpus tools can filter
tracks without re-serializing events. Note extraction follows MIDI
running-status rules, honors tempo meta events when converting ticks to
seconds, and pairs NOTE_ON/NOTE_OFF per (channel, pitch) FIFO. A NOTE_ON
with velocity 0 closes the earliest open note on its key, or opens a
velocity-0 note when none is open (keeps velocity-0 notes writable).
Dangling NOTE_ONs are closed at end of track and logged, not rejected.
"""

from __future__ import annotations

import logging
import struct
from collections import deque
from dataclasses import dataclass, field

from .errors import MalformedMidi
from .pieces import Note, Piece
from .vocab import MAX_DURATION, MIN_DURATION

log = logging.getLogger(__name__)

DEFAULT_TEMPO = 500_000  # microseconds per quarter note
WRITE_DIVISION = 480  # ticks per quarter on output


@dataclass(frozen=True)
class ChannelEvent:
    tick: int
    status: int  # full status byte incl. channel
    data: tuple[int, ...]

    @property
    def kind(self) -> int:
        return self.status & 0xF0

    @property
    def channel(self) -> int:
        return self.status & 0x0F


@dataclass(frozen=True)
class MetaEvent:
    tick: int
    meta_type: int
    data: bytes


@dataclass
class Track:
    events: list  # ChannelEvent | MetaEvent, tick-ordered
    raw: bytes  # original chunk payload (without MTrk header)

    @property
    def end_tick(self) -> int:
        return self.events[-1].tick if self.events else 0


@dataclass
class SmfFile:
    fmt: int
    division: int  # raw 16-bit division field
    tracks: list[Track] = field(default_factory=list)


def _read_varlen(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for _ in range(4):
        if pos >= len(data):
            raise MalformedMidi("truncated variable-length quantity")
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MalformedMidi("variable-length quantity longer than 4 bytes")


def _parse_track(payload: bytes) -> list:
    events = []
    pos = 0
    tick = 0
    running = None
    while pos < len(payload):
        delta, pos = _read_varlen(payload, pos)
        tick += delta
        if pos >= len(payload):
            raise MalformedMidi("truncated event")
        byte = payload[pos]
        if byte == 0xFF:
            meta_type = payload[pos + 1] if pos + 1 < len(payload) else None
            if meta_type is None:
                raise MalformedMidi("truncated meta event")
            length, dpos = _read_varlen(payload, pos + 2)
            data = payload[dpos : dpos + length]
            if len(data) != length:
                raise MalformedMidi("truncated meta event payload")
            events.append(MetaEvent(tick, meta_type, bytes(data)))
            pos = dpos + length
            if meta_type == 0x2F:  # end of track
                break
            continue
        if byte in (0xF0, 0xF7):  # sysex
            length, dpos = _read_varlen(payload, pos + 1)
            pos = dpos + length
            if pos > len(payload):
                raise MalformedMidi("truncated sysex event")
            running = None
            continue
        if byte & 0x80:
            status = byte
            running = status
            pos += 1
        else:
            if running is None:
                raise MalformedMidi("data byte with no running status")
            status = running
        kind = status & 0xF0
        ndata = 1 if kind in (0xC0, 0xD0) else 2
        data = payload[pos : pos + ndata]
        if len(data) != ndata:
            raise MalformedMidi("truncated channel event")
        events.append(ChannelEvent(tick, status, tuple(data)))
        pos += ndata
    return events


def read_smf(data: bytes) -> SmfFile:
    """Parse the chunk structure and all events of a MIDI file."""
    if len(data) < 14 or data[:4] != b"MThd":
        raise MalformedMidi("missing MThd header")
    header_len = struct.unpack(">I", data[4:8])[0]
    if header_len < 6:
        raise MalformedMidi(f"bad header length {header_len}")
    fmt, ntrks, division = struct.unpack(">HHH", data[8:14])
    if fmt not in (0, 1):
        raise MalformedMidi(f"unsupported format {fmt}")
    pos = 8 + header_len
    tracks: list[Track] = []
    while len(tracks) < ntrks:
        if pos + 8 > len(data):
            raise MalformedMidi("truncated track chunk header")
        tag = data[pos : pos + 4]
        length = struct.unpack(">I", data[pos + 4 : pos + 8])[0]
        payload = data[pos + 8 : pos + 8 + length]
        if len(payload) != length:
            raise MalformedMidi("truncated track chunk")
        pos += 8 + length
        if tag != b"MTrk":  # unknown chunks are skipped per the SMF spec
            continue
        tracks.append(Track(events=_parse_track(payload), raw=bytes(payload)))
    return SmfFile(fmt=fmt, division=division, tracks=tracks)


class TempoMap:
    """Tick -> seconds conversion honoring tempo meta events."""

    def __init__(self, smf: SmfFile):
        self.division = smf.division
        changes: dict[int, int] = {}
        for track in smf.tracks:
            for ev in track.events:
                if isinstance(ev, MetaEvent) and ev.meta_type == 0x51 and len(ev.data) == 3:
                    changes[ev.tick] = int.from_bytes(ev.data, "big")
        self._changes = sorted(changes.items())
        # prefix seconds at each change point
        self._prefix: list[tuple[int, float, int]] = []  # (tick, seconds, tempo)
        if self.division & 0x8000:
            fps = 256 - (self.division >> 8)  # two's complement frame rate
            tpf = self.division & 0xFF
            self._smpte_rate = fps * tpf
        else:
            self._smpte_rate = None
            seconds = 0.0
            tempo = DEFAULT_TEMPO
            tick = 0
            for ctick, ctempo in self._changes:
                seconds += (ctick - tick) * tempo / 1e6 / self.division
                tick = ctick
                tempo = ctempo
                self._prefix.append((tick, seconds, tempo))

    def seconds_at(self, tick: int) -> float:
        if self._smpte_rate is not None:
            return tick / self._smpte_rate
        seconds = 0.0
        base_tick = 0
        tempo = DEFAULT_TEMPO
        for ctick, csec, ctempo in self._prefix:
            if ctick > tick:
                break
            base_tick, seconds, tempo = ctick, csec, ctempo
        return seconds + (tick - base_tick) * tempo / 1e6 / self.division


def round_half_up(x: float) -> int:
    # round-to-nearest, half away from zero (x is never negative here)
    return int(x + 0.5)


def parse_midi(data: bytes, timestep_rate: int = 4) -> Piece:
    """Extract all notes from a MIDI file onto the timestep grid."""
    if timestep_rate < 1:
        raise ValueError(f"timestep_rate must be >= 1: {timestep_rate}")
    smf = read_smf(data)
    tempo = TempoMap(smf)
    notes: list[Note] = []
    for track in smf.tracks:
        open_notes: dict[tuple[int, int], deque] = {}
        for ev in track.events:
            if not isinstance(ev, ChannelEvent):
                continue
            kind = ev.kind
            if kind not in (0x80, 0x90):
                continue
            pitch, velocity = ev.data
            key = (ev.channel, pitch)
            onset = tempo.seconds_at(ev.tick)
            if kind == 0x90 and velocity > 0:
                open_notes.setdefault(key, deque()).append((onset, velocity))
            else:
                pending = open_notes.get(key)
                if pending:
                    start_sec, start_vel = pending.popleft()
                    notes.append(_quantize(pitch, start_vel, start_sec, onset, timestep_rate))
                elif kind == 0x90:  # velocity-0 NOTE_ON with no open note: onset
                    open_notes.setdefault(key, deque()).append((onset, 0))
                else:
                    log.debug("NOTE_OFF with no open note: ch=%d pitch=%d", *key)
        end_sec = tempo.seconds_at(track.end_tick)
        for (_, pitch), pending in open_notes.items():
            for start_sec, start_vel in pending:
                log.warning("closing dangling NOTE_ON pitch=%d at end of track", pitch)
                notes.append(_quantize(pitch, start_vel, start_sec, end_sec, timestep_rate))
    return Piece(notes=tuple(notes), timestep_rate=timestep_rate)


def _quantize(pitch: int, velocity: int, start_sec: float, end_sec: float, rate: int) -> Note:
    start = round_half_up(rate * start_sec)
    end = round_half_up(rate * end_sec)
    duration = min(max(end - start, MIN_DURATION), MAX_DURATION)
    return Note(start=start, pitch=pitch, velocity=velocity, duration=duration)


def write_midi(piece: Piece) -> bytes:
    """Serialize a piece as a single-track format-0 file, one piano program.

    parse_midi(write_midi(p), p.timestep_rate) == p for pieces without
    overlapping notes on the same pitch (MIDI cannot represent those
    unambiguously on one channel).
    """
    ticks_per_second = WRITE_DIVISION * 1e6 / DEFAULT_TEMPO
    events: list[tuple[int, int, int, int, int]] = []  # (tick, order, status, d1, d2)
    for n in piece.notes:
        on_tick = round_half_up(ticks_per_second * n.start / piece.timestep_rate)
        off_tick = round_half_up(
            ticks_per_second * (n.start + n.duration) / piece.timestep_rate
        )
        events.append((on_tick, 1, 0x90, n.pitch, n.velocity))
        events.append((off_tick, 0, 0x80, n.pitch, 64))
    events.sort()

    body = bytearray()
    body += _varlen(0) + bytes([0xFF, 0x51, 0x03]) + DEFAULT_TEMPO.to_bytes(3, "big")
    body += _varlen(0) + bytes([0xC0, 0x00])  # program 0: acoustic grand
    tick = 0
    for etick, _, status, d1, d2 in events:
        body += _varlen(etick - tick) + bytes([status, d1, d2])
        tick = etick
    body += _varlen(0) + bytes([0xFF, 0x2F, 0x00])

    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, WRITE_DIVISION)
    return header + b"MTrk" + struct.pack(">I", len(body)) + bytes(body)


def write_smf(fmt: int, division: int, track_payloads: list[bytes]) -> bytes:
    """Reassemble a file from raw track chunk payloads (corpus filtering)."""
    out = bytearray(b"MThd" + struct.pack(">IHHH", 6, fmt, len(track_payloads), division))
    for payload in track_payloads:
        out += b"MTrk" + struct.pack(">I", len(payload)) + payload
    return bytes(out)


def _varlen(value: int) -> bytes:
    if value < 0:
        raise ValueError("negative delta time")
    chunks = [value & 0x7F]
    value >>= 7
    while value:
        chunks.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(chunks))
