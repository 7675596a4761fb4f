"""Duration-constrained, emotion-steered stochastic beam search.

Each iteration expands every live beam member by one token, keeps the k
most probable children per parent, then samples the next beam from the
pooled children proportionally to

    p_L(y) * (1 - |v - E_v(y)|) * (1 - |a - E_a(y)|)

in log domain. Members that reached the target duration or emitted END
are frozen: no longer expanded but still eligible for sampling and for
the final pick. The search returns the highest-probability member that
meets the duration target, or the best member overall flagged as short.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .codec import TokenSeq
from .errors import EmptyCandidateSet, InvalidSeed, SearchSpaceTooLarge
from .ngram import LanguageModel
from .vocab import END_ID, TS_ID

log = logging.getLogger(__name__)

NEG_INF = float("-inf")


@dataclass(frozen=True)
class ScorerBundle:
    """The three models a search consumes."""

    lm: LanguageModel
    valence_scorer: object  # anything with score(tokens) -> [0, 1]
    arousal_scorer: object


@dataclass(frozen=True)
class SearchParams:
    beam_size: int = 4
    expansion_k: int = 16
    target_valence: int = 1
    target_arousal: int = 1
    target_seconds: float = 5.18
    timestep_rate: int = 4
    rng_seed: int = 0
    max_new_tokens: int = 2048
    ts_token_id: int = TS_ID
    end_token_id: int | None = END_ID

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError(f"beam_size must be >= 1: {self.beam_size}")
        if self.expansion_k < 1:
            raise ValueError(f"expansion_k must be >= 1: {self.expansion_k}")
        if self.target_valence not in (0, 1) or self.target_arousal not in (0, 1):
            raise ValueError("emotion targets must be binary")
        if self.target_seconds <= 0:
            raise ValueError(f"target_seconds must be > 0: {self.target_seconds}")
        if self.timestep_rate < 1:
            raise ValueError(f"timestep_rate must be >= 1: {self.timestep_rate}")
        if self.max_new_tokens < 1:
            raise ValueError(f"max_new_tokens must be >= 1: {self.max_new_tokens}")


@dataclass
class Candidate:
    seq: TokenSeq
    lm_logprob: float
    new_tokens: int
    new_ts: int  # TS tokens among the newly generated suffix
    valence_score: float | None = None
    arousal_score: float | None = None

    def suffix_seconds(self, rate: int) -> float:
        return self.new_ts / rate

    def ends_with_end(self, end_id: int | None) -> bool:
        return end_id is not None and bool(self.seq) and self.seq[-1] == end_id


@dataclass(frozen=True)
class SearchResult:
    tokens: TokenSeq  # seed plus generated suffix
    suffix: TokenSeq  # generated tokens only
    short: bool  # duration target not reached (END or token cap exit)
    lm_logprob: float


def candidate_logweight(cand: Candidate, params: SearchParams) -> float:
    """Log of p_L(y) * (1 - |v - E_v|) * (1 - |a - E_a|); -inf on zero factors."""
    fv = 1.0 - abs(params.target_valence - cand.valence_score)
    fa = 1.0 - abs(params.target_arousal - cand.arousal_score)
    if fv <= 0.0 or fa <= 0.0:
        return NEG_INF
    return cand.lm_logprob + math.log(fv) + math.log(fa)


def expand_topk(lm: LanguageModel, parent: Candidate, k: int, ts_token_id: int = TS_ID) -> list[Candidate]:
    """The k most probable one-token extensions; ties by token id ascending."""
    if k < 1:
        raise ValueError(f"k must be >= 1: {k}")
    dist = lm.next_dist(parent.seq)
    order = sorted(range(lm.vocab_size), key=lambda t: (-dist[t], t))[:k]
    children = []
    for token in order:
        p = dist[token]
        logp = math.log(p) if p > 0 else NEG_INF
        children.append(
            Candidate(
                seq=parent.seq + (token,),
                lm_logprob=parent.lm_logprob + logp,
                new_tokens=parent.new_tokens + 1,
                new_ts=parent.new_ts + (1 if token == ts_token_id else 0),
            )
        )
    return children


def _softmax_indices(indices: list[int], logweights: list[float]) -> np.ndarray:
    w = np.array([logweights[i] for i in indices], dtype=float)
    m = w.max()
    if m == NEG_INF:
        return np.full(len(indices), 1.0 / len(indices))
    p = np.exp(w - m)
    return p / p.sum()


def sample_beam(
    candidates: list[Candidate],
    logweights: list[float],
    b: int,
    rng: np.random.Generator,
) -> list[Candidate]:
    """Sample b distinct candidates proportionally to exp(logweight).

    Candidates with -inf weight are never drawn while finite-weight ones
    remain; when every remaining weight is -inf the draw falls back to
    raw language-model probability.
    """
    if not candidates:
        raise EmptyCandidateSet("no candidates to sample from")
    if len(candidates) <= b:
        return list(candidates)
    remaining = list(range(len(candidates)))
    chosen: list[int] = []
    while len(chosen) < b:
        finite = [i for i in remaining if logweights[i] > NEG_INF]
        if finite:
            pool = finite
            probs = _softmax_indices(pool, logweights)
        else:
            pool = remaining
            probs = _softmax_indices(pool, [candidates[i].lm_logprob for i in range(len(candidates))])
        pick = pool[int(rng.choice(len(pool), p=probs))]
        chosen.append(pick)
        remaining.remove(pick)
    return [candidates[i] for i in chosen]


def _score(bundle: ScorerBundle, cand: Candidate) -> None:
    if cand.valence_score is None:
        cand.valence_score = float(bundle.valence_scorer.score(cand.seq))
        cand.arousal_score = float(bundle.arousal_scorer.score(cand.seq))


def _is_frozen(cand: Candidate, params: SearchParams) -> bool:
    return (
        cand.suffix_seconds(params.timestep_rate) >= params.target_seconds
        or cand.ends_with_end(params.end_token_id)
        or cand.new_tokens >= params.max_new_tokens
    )


def _pick(candidates: list[Candidate]) -> Candidate:
    # max lm_logprob, ties by lexicographically smallest sequence
    return min(candidates, key=lambda c: (-c.lm_logprob, c.seq))


def sbbs(
    bundle: ScorerBundle,
    seed: TokenSeq,
    params: SearchParams,
    trace=None,
) -> SearchResult:
    """Run the full search from a seed prefix.

    ``trace``, when given, is called with one text line per iteration for
    test forensics. Identical inputs and rng_seed give identical output.
    """
    seed = tuple(seed)
    if params.end_token_id is not None and params.end_token_id in seed:
        raise InvalidSeed("seed must not contain END")
    rng = np.random.default_rng(params.rng_seed)
    root = Candidate(seq=seed, lm_logprob=bundle.lm.logprob(seed), new_tokens=0, new_ts=0)
    _score(bundle, root)
    beam = [root]
    while not all(_is_frozen(c, params) for c in beam):
        pool: list[Candidate] = []
        for cand in beam:
            if _is_frozen(cand, params):
                pool.append(cand)
            else:
                pool.extend(expand_topk(bundle.lm, cand, params.expansion_k, params.ts_token_id))
        for cand in pool:
            _score(bundle, cand)
        weights = [candidate_logweight(c, params) for c in pool]
        beam = sample_beam(pool, weights, params.beam_size, rng)
        if trace is not None:
            trace(
                "j=%d beam=[%s]"
                % (
                    max(c.new_tokens for c in beam),
                    " ".join(f"{c.lm_logprob:.4f}/{c.new_ts}ts" for c in beam),
                )
            )
    satisfied = [
        c for c in beam if c.suffix_seconds(params.timestep_rate) >= params.target_seconds
    ]
    if satisfied:
        best = _pick(satisfied)
        short = False
    else:
        best = _pick(beam)
        short = True
    return SearchResult(
        tokens=best.seq,
        suffix=best.seq[len(seed):],
        short=short,
        lm_logprob=best.lm_logprob,
    )


def exhaustive_oracle(
    bundle: ScorerBundle,
    seed: TokenSeq,
    params: SearchParams,
    depth_cap: int,
    max_nodes: int = 2_000_000,
) -> SearchResult:
    """Enumerate every continuation up to depth_cap; return the duration-
    satisfying sequence with the largest language-model probability
    (ties by lexicographic token order). Verification-scale only."""
    seed = tuple(seed)
    vocab = bundle.lm.vocab_size
    if vocab**depth_cap > max_nodes:
        raise SearchSpaceTooLarge(f"{vocab}^{depth_cap} exceeds {max_nodes}")
    best: Candidate | None = None
    fallback: Candidate | None = None

    def consider(cand: Candidate, satisfied: bool):
        nonlocal best, fallback
        if satisfied:
            if best is None or (-cand.lm_logprob, cand.seq) < (-best.lm_logprob, best.seq):
                best = cand
        else:
            if fallback is None or (-cand.lm_logprob, cand.seq) < (-fallback.lm_logprob, fallback.seq):
                fallback = cand

    def walk(cand: Candidate, depth: int):
        if cand.suffix_seconds(params.timestep_rate) >= params.target_seconds:
            consider(cand, True)
            return  # extensions only lose probability
        if depth == depth_cap or cand.ends_with_end(params.end_token_id):
            consider(cand, False)
            return
        dist = bundle.lm.next_dist(cand.seq)
        for token in range(vocab):
            p = dist[token]
            walk(
                Candidate(
                    seq=cand.seq + (token,),
                    lm_logprob=cand.lm_logprob + (math.log(p) if p > 0 else NEG_INF),
                    new_tokens=cand.new_tokens + 1,
                    new_ts=cand.new_ts + (1 if token == params.ts_token_id else 0),
                ),
                depth + 1,
            )

    walk(Candidate(seq=seed, lm_logprob=bundle.lm.logprob(seed), new_tokens=0, new_ts=0), 0)
    if best is not None:
        return SearchResult(
            tokens=best.seq, suffix=best.seq[len(seed):], short=False, lm_logprob=best.lm_logprob
        )
    assert fallback is not None
    return SearchResult(
        tokens=fallback.seq,
        suffix=fallback.seq[len(seed):],
        short=True,
        lm_logprob=fallback.lm_logprob,
    )
