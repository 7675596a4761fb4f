from __future__ import annotations

import struct

import numpy as np
import pytest

from storycomposer.ngram import LanguageModel
from storycomposer.pieces import Note, Piece
from storycomposer.search import ScorerBundle


def random_piece(rng: np.random.Generator, max_notes: int = 30, timestep_rate: int = 4) -> Piece:
    """A random valid piece without same-pitch temporal overlap (a piano key
    cannot be re-struck while held, and MIDI cannot encode that on one
    channel anyway)."""
    n_notes = int(rng.integers(0, max_notes + 1))
    notes = []
    busy: dict[int, int] = {}  # pitch -> earliest free timestep
    for _ in range(n_notes):
        pitch = int(rng.integers(0, 128))
        start = int(rng.integers(0, 64))
        if start < busy.get(pitch, 0):
            start = busy[pitch]
        duration = int(rng.integers(1, 57))
        velocity = int(rng.integers(0, 128))
        busy[pitch] = start + duration
        notes.append(Note(start=start, pitch=pitch, velocity=velocity, duration=duration))
    return Piece(notes=tuple(notes), timestep_rate=timestep_rate)


class FixedScorer:
    """Emotion scorer stub returning a constant."""

    def __init__(self, value: float):
        self.value = value

    def score(self, tokens):
        return self.value


class TokenClassScorer:
    """Score = fraction of suffix tokens falling in a token class, mapped
    through a fixed bump so it stays strictly inside (0, 1)."""

    def __init__(self, token_ids: set[int], floor: float = 0.05):
        self.token_ids = token_ids
        self.floor = floor

    def score(self, tokens):
        if not tokens:
            return 0.5
        frac = sum(1 for t in tokens if t in self.token_ids) / len(tokens)
        return self.floor + (1 - 2 * self.floor) * frac


def toy_lm_ab() -> LanguageModel:
    """Two-token model: after A always B, from the start always A."""
    lm = LanguageModel(order=2, alpha=0.0, vocab_size=2)
    lm.observe((0, 1, 0, 1))  # A B A B
    return lm


def random_toy_lm(rng: np.random.Generator, vocab_size: int = 6, order: int = 2) -> LanguageModel:
    """A smoothed random-count model over a reduced vocabulary."""
    lm = LanguageModel(order=order, alpha=0.1, vocab_size=vocab_size)
    n_seqs = int(rng.integers(2, 6))
    for _ in range(n_seqs):
        length = int(rng.integers(4, 20))
        lm.observe(tuple(int(x) for x in rng.integers(0, vocab_size, size=length)))
    return lm


def toy_bundle(lm: LanguageModel, ev: float = 0.6, ea: float = 0.6) -> ScorerBundle:
    return ScorerBundle(lm=lm, valence_scorer=FixedScorer(ev), arousal_scorer=FixedScorer(ea))


def make_track(events: list[tuple[int, bytes]]) -> bytes:
    """Build a raw track payload from (absolute_tick, event_bytes) pairs."""
    from storycomposer.smf import _varlen

    payload = bytearray()
    tick = 0
    for etick, data in events:
        payload += _varlen(etick - tick) + data
        tick = etick
    payload += _varlen(0) + bytes([0xFF, 0x2F, 0x00])
    return bytes(payload)


def make_midi(tracks: list[list[tuple[int, bytes]]], fmt: int = 1, division: int = 480) -> bytes:
    header = b"MThd" + struct.pack(">IHHH", 6, fmt, len(tracks), division)
    out = bytearray(header)
    for events in tracks:
        payload = make_track(events)
        out += b"MTrk" + struct.pack(">I", len(payload)) + payload
    return bytes(out)


def sec_tick(seconds: float, division: int = 480, tempo: int = 500_000) -> int:
    return round(seconds * division * 1e6 / tempo)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
