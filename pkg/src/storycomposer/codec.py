"""Token encoding of pieces and its inverse.

A piece becomes a flat sequence of token ids: notes in sort order, each as
a (VELOCITY, DURATION, PITCH) triple at its start timestep; a TS token
closes every timestep from 0 through the last note's start; END terminates
the sequence. Token sequences are plain tuples of ints (see ``vocab``).
"""

from __future__ import annotations

import logging

from . import vocab
from .errors import MalformedTokenSeq
from .pieces import Note, Piece
from .vocab import END_ID, TS_ID

log = logging.getLogger(__name__)

TokenSeq = tuple[int, ...]


def encode(piece: Piece) -> TokenSeq:
    """Encode a piece as token ids; deterministic for equal pieces."""
    out: list[int] = []
    i = 0
    notes = piece.notes
    if notes:
        for step in range(piece.last_start + 1):
            while i < len(notes) and notes[i].start == step:
                n = notes[i]
                out.append(vocab.velocity_id(n.velocity))
                out.append(vocab.duration_id(n.duration))
                out.append(vocab.pitch_id(n.pitch))
                i += 1
            out.append(TS_ID)
    out.append(END_ID)
    return tuple(out)


def decode(tokens: TokenSeq, timestep_rate: int = 4, strict: bool = True) -> Piece:
    """Inverse of ``encode``; a trailing incomplete triple is dropped.

    In strict mode (the default) grammar violations raise MalformedTokenSeq:
    a DURATION or PITCH outside its triple slot, or any token after END.
    With ``strict=False`` ill-fitting tokens are skipped with a warning so
    freshly generated sequences can always be rendered.
    """
    notes: list[Note] = []
    step = 0
    i = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t == END_ID:
            if i != n - 1:
                if strict:
                    raise MalformedTokenSeq(f"token after END at position {i}")
                log.warning("ignoring %d tokens after END", n - 1 - i)
            break
        if t == TS_ID:
            step += 1
            i += 1
            continue
        if vocab.is_velocity(t):
            if i + 1 >= n:
                log.warning("dropping incomplete trailing note triple")
                break
            d = tokens[i + 1]
            if not vocab.is_duration(d):
                if strict:
                    raise MalformedTokenSeq(f"VELOCITY at {i} not followed by DURATION")
                log.warning("skipping dangling VELOCITY at %d", i)
                i += 1
                continue
            if i + 2 >= n:
                log.warning("dropping incomplete trailing note triple")
                break
            p = tokens[i + 2]
            if not vocab.is_pitch(p):
                if strict:
                    raise MalformedTokenSeq(f"DURATION at {i + 1} not followed by PITCH")
                log.warning("skipping dangling VELOCITY+DURATION at %d", i)
                i += 2
                continue
            notes.append(
                Note(
                    start=step,
                    velocity=vocab.id_token(t).value,
                    duration=vocab.id_token(d).value,
                    pitch=vocab.id_token(p).value,
                )
            )
            i += 3
            continue
        # stray DURATION or PITCH outside a triple
        if strict:
            raise MalformedTokenSeq(
                f"unexpected token {vocab.id_token(t)} at position {i}"
            )
        log.warning("skipping stray token %s at %d", vocab.id_token(t), i)
        i += 1
    return Piece(notes=tuple(notes), timestep_rate=timestep_rate)


def duration_seconds(tokens: TokenSeq, timestep_rate: int = 4) -> float:
    """Duration in seconds: TS count divided by the timestep rate."""
    if timestep_rate < 1:
        raise ValueError(f"timestep_rate must be >= 1: {timestep_rate}")
    return sum(1 for t in tokens if t == TS_ID) / timestep_rate


def is_well_formed(tokens: TokenSeq) -> bool:
    """True when the sequence parses under the triple/TS/END grammar."""
    try:
        decode(tokens)
    except MalformedTokenSeq:
        return False
    return True
