"""Quantized note and piece containers.

Time lives on an integer timestep grid with ``timestep_rate`` steps per
second. Note durations are capped at 56 steps so they fit the duration
tokens of the vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .vocab import MAX_DURATION, MIN_DURATION


@dataclass(frozen=True, order=True)
class Note:
    """One quantized note: start/duration in timesteps, pitch/velocity in MIDI range."""

    start: int
    pitch: int
    velocity: int
    duration: int

    def __post_init__(self):
        if not 0 <= self.pitch < 128:
            raise ValueError(f"pitch out of range: {self.pitch}")
        if not 0 <= self.velocity < 128:
            raise ValueError(f"velocity out of range: {self.velocity}")
        if self.start < 0:
            raise ValueError(f"negative start: {self.start}")
        if not MIN_DURATION <= self.duration <= MAX_DURATION:
            raise ValueError(f"duration out of range: {self.duration}")


@dataclass(frozen=True)
class Piece:
    """A sorted collection of notes on a fixed timestep grid.

    Notes are kept sorted by (start, pitch, velocity) so that encoding is
    deterministic regardless of construction order.
    """

    notes: tuple[Note, ...] = ()
    timestep_rate: int = 4

    def __post_init__(self):
        if self.timestep_rate < 1:
            raise ValueError(f"timestep_rate must be >= 1: {self.timestep_rate}")
        ordered = tuple(sorted(self.notes, key=lambda n: (n.start, n.pitch, n.velocity)))
        object.__setattr__(self, "notes", ordered)

    def __len__(self) -> int:
        return len(self.notes)

    @property
    def span(self) -> int:
        """Total sounding length in timesteps (0 for an empty piece)."""
        if not self.notes:
            return 0
        return max(n.start + n.duration for n in self.notes)

    @property
    def last_start(self) -> int:
        if not self.notes:
            return 0
        return self.notes[-1].start
