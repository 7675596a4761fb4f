"""Corpus construction: piano-track filtering, MD5 dedup, augmentation, slicing.

All transforms are pure per-file/per-piece; the manifest is the only
aggregation point.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import codec, smf
from .errors import EmptyPiece, TooShort
from .pieces import Note, Piece

PIANO_PROGRAMS = range(0, 8)  # wire values 0-7, i.e. General MIDI programs 1-8

TRANSPOSITION_SHIFTS = tuple(range(-5, 7))  # 12 keys, 0 = original
TEMPO_FACTORS = (0.9, 1.0, 1.1)
VELOCITY_FACTORS = (0.9, 1.0, 1.1)


@dataclass(frozen=True)
class LabeledPiece:
    """A piece with binary valence/arousal labels."""

    piece: Piece
    valence: int
    arousal: int
    source_id: str = ""

    def __post_init__(self):
        if self.valence not in (0, 1) or self.arousal not in (0, 1):
            raise ValueError("valence/arousal must be binary")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    digest: str
    length: int


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    piece_count: int = 0
    token_count: int = 0

    def to_text(self) -> str:
        return "".join(f"{e.digest} {e.length} {e.path}\n" for e in self.entries)

    @classmethod
    def from_text(cls, text: str) -> "CorpusManifest":
        entries = []
        for line in text.splitlines():
            if not line.strip():
                continue
            digest, length, path = line.split(" ", 2)
            entries.append(ManifestEntry(path=path, digest=digest, length=int(length)))
        return cls(entries=entries, piece_count=len(entries))


def track_programs(track: smf.Track) -> set[int]:
    """Programs active when the track's notes sound (channel default is 0)."""
    programs: dict[int, int] = {}
    used: set[int] = set()
    for ev in track.events:
        if not isinstance(ev, smf.ChannelEvent):
            continue
        if ev.kind == 0xC0:
            programs[ev.channel] = ev.data[0]
        elif ev.kind == 0x90 and ev.data[1] > 0:
            used.add(programs.get(ev.channel, 0))
    return used


def extract_piano_tracks(data: bytes) -> bytes | None:
    """Keep only tracks whose notes all play piano-family programs.

    Meta-only tracks (tempo maps etc.) survive alongside at least one
    qualifying note track. Returns None when no note track qualifies.
    """
    parsed = smf.read_smf(data)
    keep: list[bytes] = []
    kept_note_track = False
    for track in parsed.tracks:
        used = track_programs(track)
        if not used:
            keep.append(track.raw)  # no notes: structural track, keep
            continue
        if all(p in PIANO_PROGRAMS for p in used):
            keep.append(track.raw)
            kept_note_track = True
    if not kept_note_track:
        return None
    if len(keep) == len(parsed.tracks):
        return data  # already all-piano: pass through untouched
    return smf.write_smf(parsed.fmt, parsed.division, keep)


def dedup(files: list[tuple[str, bytes]]) -> CorpusManifest:
    """One manifest entry per unique MD5 digest; first occurrence wins."""
    manifest = CorpusManifest()
    seen: set[str] = set()
    for path, data in files:
        digest = hashlib.md5(data).hexdigest()
        if digest in seen:
            continue
        seen.add(digest)
        manifest.entries.append(ManifestEntry(path=path, digest=digest, length=len(data)))
    manifest.piece_count = len(manifest.entries)
    return manifest


def count_tokens(manifest: CorpusManifest, files: dict[str, bytes], timestep_rate: int = 4) -> int:
    """Fill in the manifest's piece/token statistics from file contents."""
    total = 0
    for entry in manifest.entries:
        piece = smf.parse_midi(files[entry.path], timestep_rate)
        total += len(codec.encode(piece))
    manifest.token_count = total
    return total


def _shift_pitch(pitch: int, shift: int) -> int:
    p = pitch + shift
    while p > 127:
        p -= 12
    while p < 0:
        p += 12
    return p


def augment(piece: Piece) -> list[Piece]:
    """The 12 x 3 x 3 = 108 transposition/tempo/velocity variants of a piece.

    Tempo factors scale note start/end times in seconds before
    re-quantization; velocities are scaled with round-to-nearest and
    clamped; out-of-range pitches fold back by octaves.
    """
    if not piece.notes:
        raise EmptyPiece("cannot augment an empty piece")
    rate = piece.timestep_rate
    variants: list[Piece] = []
    for shift in TRANSPOSITION_SHIFTS:
        for tempo in TEMPO_FACTORS:
            for vel in VELOCITY_FACTORS:
                notes = []
                for n in piece.notes:
                    # rate * (step / rate * tempo) reduces to step * tempo
                    start = smf.round_half_up(n.start * tempo)
                    end = smf.round_half_up((n.start + n.duration) * tempo)
                    duration = min(max(end - start, 1), 56)
                    velocity = min(max(smf.round_half_up(n.velocity * vel), 0), 127)
                    notes.append(
                        Note(
                            start=start,
                            pitch=_shift_pitch(n.pitch, shift),
                            velocity=velocity,
                            duration=duration,
                        )
                    )
                variants.append(Piece(notes=tuple(notes), timestep_rate=rate))
    return variants


def slice_piece(labeled: LabeledPiece, parts: int) -> list[LabeledPiece]:
    """Cut a labeled piece into ``parts`` label-inheriting slices.

    Slices have equal timestep length (the last absorbs the remainder);
    a note straddling a boundary is truncated at it.
    """
    if parts not in (2, 4, 8, 16):
        raise ValueError(f"parts must be one of 2,4,8,16: {parts}")
    piece = labeled.piece
    span = piece.span
    if span < parts:
        raise TooShort(f"piece spans {span} timesteps, need at least {parts}")
    length = span // parts
    bounds = [i * length for i in range(parts)] + [span]
    out: list[LabeledPiece] = []
    for i in range(parts):
        lo, hi = bounds[i], bounds[i + 1]
        notes = []
        for n in piece.notes:
            if not lo <= n.start < hi:
                continue
            duration = min(n.duration, hi - n.start)
            notes.append(
                Note(start=n.start - lo, pitch=n.pitch, velocity=n.velocity, duration=max(duration, 1))
            )
        out.append(
            LabeledPiece(
                piece=Piece(notes=tuple(notes), timestep_rate=piece.timestep_rate),
                valence=labeled.valence,
                arousal=labeled.arousal,
                source_id=f"{labeled.source_id}#{parts}.{i}",
            )
        )
    return out


def parse_label_csv(text: str) -> list[tuple[str, int, int]]:
    """Parse a ``path,valence,arousal`` CSV (header required)."""
    import csv
    import io

    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        out.append((row["path"], int(row["valence"]), int(row["arousal"])))
    return out
