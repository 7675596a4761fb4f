"""The 314-symbol token vocabulary.

Tokens come in five kinds: VELOCITY(0..127), DURATION(1..56), PITCH(0..127)
plus the two markers TS (timestep boundary) and END (end of piece).
128 + 56 + 128 + 2 = 314 symbols, each with a fixed integer id:

    ids   0..127   VELOCITY(n), n = id
    ids 128..183   DURATION(d), d = id - 127
    ids 184..311   PITCH(p),    p = id - 184
    id  312        TS
    id  313        END

The mapping is stable across releases; ``vocab_table()`` renders it as a
text table and ``vocab_hash()`` fingerprints it for model files.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

MIN_DURATION = 1
MAX_DURATION = 56

VELOCITY_BASE = 0
DURATION_BASE = 128
PITCH_BASE = 184
TS_ID = 312
END_ID = 313
VOCAB_SIZE = 314

# Reserved context-padding id used by language models; outside the vocabulary.
START_ID = 314


@dataclass(frozen=True)
class Token:
    """A vocabulary symbol: kind plus optional value."""

    kind: str  # "VELOCITY" | "DURATION" | "PITCH" | "TS" | "END"
    value: int | None = None

    def __post_init__(self):
        token_id(self)  # validates kind/value

    def __str__(self) -> str:
        if self.value is None:
            return self.kind
        return f"{self.kind}({self.value})"


def token_id(token: Token) -> int:
    """Map a token to its integer id in [0, 313]."""
    kind, value = token.kind, token.value
    if kind == "VELOCITY":
        if value is None or not 0 <= value < 128:
            raise ValueError(f"velocity out of range: {value}")
        return VELOCITY_BASE + value
    if kind == "DURATION":
        if value is None or not MIN_DURATION <= value <= MAX_DURATION:
            raise ValueError(f"duration out of range: {value}")
        return DURATION_BASE + value - MIN_DURATION
    if kind == "PITCH":
        if value is None or not 0 <= value < 128:
            raise ValueError(f"pitch out of range: {value}")
        return PITCH_BASE + value
    if kind == "TS":
        if value is not None:
            raise ValueError("TS carries no value")
        return TS_ID
    if kind == "END":
        if value is not None:
            raise ValueError("END carries no value")
        return END_ID
    raise ValueError(f"unknown token kind: {kind}")


def id_token(token_id: int) -> Token:
    """Map an integer id in [0, 313] back to its token."""
    if not 0 <= token_id < VOCAB_SIZE:
        raise ValueError(f"token id out of range: {token_id}")
    if token_id < DURATION_BASE:
        return Token("VELOCITY", token_id - VELOCITY_BASE)
    if token_id < PITCH_BASE:
        return Token("DURATION", token_id - DURATION_BASE + MIN_DURATION)
    if token_id < TS_ID:
        return Token("PITCH", token_id - PITCH_BASE)
    if token_id == TS_ID:
        return Token("TS")
    return Token("END")


def velocity_id(v: int) -> int:
    if not 0 <= v < 128:
        raise ValueError(f"velocity out of range: {v}")
    return VELOCITY_BASE + v


def duration_id(d: int) -> int:
    if not MIN_DURATION <= d <= MAX_DURATION:
        raise ValueError(f"duration out of range: {d}")
    return DURATION_BASE + d - MIN_DURATION


def pitch_id(p: int) -> int:
    if not 0 <= p < 128:
        raise ValueError(f"pitch out of range: {p}")
    return PITCH_BASE + p


def is_velocity(token_id: int) -> bool:
    return VELOCITY_BASE <= token_id < DURATION_BASE


def is_duration(token_id: int) -> bool:
    return DURATION_BASE <= token_id < PITCH_BASE


def is_pitch(token_id: int) -> bool:
    return PITCH_BASE <= token_id < TS_ID


def vocab_table() -> str:
    """Render the full token-name <-> id table as text, one row per id."""
    lines = ["id\ttoken"]
    for i in range(VOCAB_SIZE):
        lines.append(f"{i}\t{id_token(i)}")
    return "\n".join(lines) + "\n"


def vocab_hash() -> str:
    """SHA-256 hex digest of the vocabulary table; pins model files to it."""
    return hashlib.sha256(vocab_table().encode("utf-8")).hexdigest()
