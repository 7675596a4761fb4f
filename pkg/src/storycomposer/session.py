"""Sentence-driven composition sessions.

Each incoming sentence is classified into a valence/arousal corner; on
the first sentence and on every emotion transition the working sequence
is reseeded with a random 4-timestep prefix of a human-composed piece of
the target emotion (previous material is archived so the exported piece
is the full session concatenation). The search then extends the working
sequence by the sentence's duration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import codec, smf
from .codec import TokenSeq
from .corpus import LabeledPiece
from .errors import InvalidLibrary
from .search import ScorerBundle, SearchParams, sbbs
from .story import StoryClassifier, emotion_label
from .vocab import END_ID, TS_ID

CORNERS = ((0, 0), (0, 1), (1, 0), (1, 1))
SEED_TIMESTEPS = 4

DEFAULT_SENTENCE_SECONDS = 5.18  # mean spoken-sentence length the engine assumes


@dataclass(frozen=True)
class SeedLibrary:
    """4-timestep seed prefixes per emotion corner."""

    prefixes: dict[tuple[int, int], tuple[TokenSeq, ...]]

    def __post_init__(self):
        for corner in CORNERS:
            entries = self.prefixes.get(corner)
            if not entries:
                raise InvalidLibrary(f"no seed prefixes for emotion corner {corner}")
            for seq in entries:
                ts = sum(1 for t in seq if t == TS_ID)
                if ts != SEED_TIMESTEPS:
                    raise InvalidLibrary(f"seed prefix has {ts} TS tokens, need {SEED_TIMESTEPS}")
                if END_ID in seq:
                    raise InvalidLibrary("seed prefix contains END")


def seed_prefix(tokens: TokenSeq, timesteps: int = SEED_TIMESTEPS) -> TokenSeq | None:
    """Truncate an encoded piece to its first ``timesteps`` TS tokens."""
    out = []
    seen = 0
    for t in tokens:
        if t == END_ID:
            break
        out.append(t)
        if t == TS_ID:
            seen += 1
            if seen == timesteps:
                return tuple(out)
    return None


def build_seed_library(labeled: list[LabeledPiece]) -> SeedLibrary:
    """Collect seed prefixes from a labeled piece collection."""
    prefixes: dict[tuple[int, int], list[TokenSeq]] = {c: [] for c in CORNERS}
    for item in labeled:
        prefix = seed_prefix(codec.encode(item.piece))
        if prefix is not None:
            prefixes[(item.valence, item.arousal)].append(prefix)
    return SeedLibrary(prefixes={c: tuple(v) for c, v in prefixes.items()})


@dataclass
class SessionConfig:
    beam_size: int = 4
    expansion_k: int = 16
    timestep_rate: int = 4
    sentence_seconds: float = DEFAULT_SENTENCE_SECONDS
    max_new_tokens: int = 2048
    rng_seed: int | None = None  # None: nondeterministic session


@dataclass
class SentenceRecord:
    text: str
    valence: int
    arousal: int
    confidence: tuple[float, float]
    reseeded: bool
    short: bool
    segment: int  # index into archived segments (current segment while open)
    span: tuple[int, int]  # token span of the excerpt within its segment
    seconds: float

    @property
    def label(self) -> str:
        return emotion_label(self.valence, self.arousal)


@dataclass
class SessionState:
    bundle: ScorerBundle
    classifier: StoryClassifier
    library: SeedLibrary
    config: SessionConfig
    rng: np.random.Generator
    composed: TokenSeq = ()
    archived: list[TokenSeq] = field(default_factory=list)
    current_emotion: tuple[int, int] | None = None
    sentence_log: list[SentenceRecord] = field(default_factory=list)

    @property
    def total_seconds(self) -> float:
        return sum(r.seconds for r in self.sentence_log)


def new_session(
    bundle: ScorerBundle,
    classifier: StoryClassifier,
    library: SeedLibrary,
    config: SessionConfig | None = None,
) -> SessionState:
    config = config or SessionConfig()
    seed = config.rng_seed
    rng = np.random.default_rng(seed) if seed is not None else np.random.default_rng()
    return SessionState(
        bundle=bundle, classifier=classifier, library=library, config=config, rng=rng
    )


def process_sentence(
    state: SessionState,
    text: str,
    duration_override: float | None = None,
    emotion_override: tuple[int, int] | None = None,
) -> SentenceRecord:
    """Classify, maybe reseed, search, and append the new excerpt."""
    if emotion_override is not None:
        v, a = emotion_override
        confidence = (1.0, 1.0)
    else:
        v, a, confidence = state.classifier.classify(text)

    first = state.current_emotion is None
    transition = not first and (v, a) != state.current_emotion
    if first or transition:
        entries = state.library.prefixes[(v, a)]
        pick = int(state.rng.integers(len(entries)))
        if state.composed:
            state.archived.append(state.composed)
        state.composed = entries[pick]
        state.current_emotion = (v, a)

    target = duration_override if duration_override is not None else state.config.sentence_seconds
    params = SearchParams(
        beam_size=state.config.beam_size,
        expansion_k=state.config.expansion_k,
        target_valence=v,
        target_arousal=a,
        target_seconds=target,
        timestep_rate=state.config.timestep_rate,
        rng_seed=int(state.rng.integers(2**63)),
        max_new_tokens=state.config.max_new_tokens,
    )
    result = sbbs(state.bundle, state.composed, params)
    span = (len(state.composed), len(result.tokens))
    state.composed = result.tokens
    record = SentenceRecord(
        text=text,
        valence=v,
        arousal=a,
        confidence=confidence,
        reseeded=transition,
        short=result.short,
        segment=len(state.archived),
        span=span,
        seconds=codec.duration_seconds(result.suffix, state.config.timestep_rate),
    )
    state.sentence_log.append(record)
    return record


def excerpt_tokens(state: SessionState, record: SentenceRecord) -> TokenSeq:
    segment = state.composed if record.segment == len(state.archived) else state.archived[record.segment]
    return segment[record.span[0] : record.span[1]]


def excerpt_midi(state: SessionState, record: SentenceRecord) -> bytes:
    piece = codec.decode(excerpt_tokens(state, record), state.config.timestep_rate, strict=False)
    return smf.write_midi(piece)


def export_piece(state: SessionState) -> bytes:
    """All archived segments plus the working sequence as one MIDI file."""
    tokens: list[int] = []
    for segment in state.archived:
        tokens.extend(segment)
    tokens.extend(state.composed)
    tokens.append(END_ID)
    piece = codec.decode(tuple(tokens), state.config.timestep_rate, strict=False)
    return smf.write_midi(piece)


def session_log_text(state: SessionState) -> str:
    """Sidecar log: one line per sentence (emotion, span, short flag)."""
    lines = []
    for i, r in enumerate(state.sentence_log):
        lines.append(
            f"{i}\t{r.label}\tv={r.valence}\ta={r.arousal}"
            f"\treseeded={int(r.reseeded)}\tshort={int(r.short)}"
            f"\tsegment={r.segment}\tspan={r.span[0]}:{r.span[1]}"
            f"\tseconds={r.seconds:.3f}\t{r.text}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
