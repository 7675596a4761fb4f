"""Add-alpha smoothed n-gram language model over token ids.

Contexts shorter than order-1 are left-padded with a reserved start
marker that lives outside the vocabulary, so predictions always range
over exactly ``vocab_size`` ids.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCorpus
from .vocab import START_ID, VOCAB_SIZE

Context = tuple[int, ...]


@dataclass
class LanguageModel:
    order: int
    alpha: float
    vocab_size: int = VOCAB_SIZE
    counts: dict[Context, Counter] = field(default_factory=dict)
    context_totals: dict[Context, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1: {self.order}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0: {self.alpha}")

    def _context(self, prefix: tuple[int, ...]) -> Context:
        n = self.order - 1
        if n == 0:
            return ()
        padded = (START_ID,) * max(0, n - len(prefix)) + tuple(prefix[-n:] if prefix else ())
        return padded[-n:] if n else ()

    def observe(self, seq: tuple[int, ...]) -> None:
        for i, token in enumerate(seq):
            ctx = self._context(tuple(seq[:i]))
            self.counts.setdefault(ctx, Counter())[token] += 1
            self.context_totals[ctx] = self.context_totals.get(ctx, 0) + 1

    def next_dist(self, prefix: tuple[int, ...]) -> np.ndarray:
        """Probability vector over the vocabulary given a prefix."""
        ctx = self._context(tuple(prefix))
        total = self.context_totals.get(ctx, 0)
        denom = total + self.alpha * self.vocab_size
        if denom == 0:
            # unseen context with alpha 0: nothing to condition on
            return np.full(self.vocab_size, 1.0 / self.vocab_size)
        dist = np.full(self.vocab_size, self.alpha / denom)
        for token, count in self.counts.get(ctx, {}).items():
            dist[token] = (count + self.alpha) / denom
        return dist

    def token_prob(self, prefix: tuple[int, ...], token: int) -> float:
        ctx = self._context(tuple(prefix))
        total = self.context_totals.get(ctx, 0)
        denom = total + self.alpha * self.vocab_size
        if denom == 0:
            return 1.0 / self.vocab_size
        return (self.counts.get(ctx, {}).get(token, 0) + self.alpha) / denom

    def logprob(self, seq: tuple[int, ...]) -> float:
        """Natural-log probability of a whole sequence; 0 for the empty one."""
        total = 0.0
        for i, token in enumerate(seq):
            p = self.token_prob(tuple(seq[:i]), token)
            total += math.log(p) if p > 0 else -math.inf
        return total

    def perplexity(self, seq: tuple[int, ...]) -> float:
        if not seq:
            return float("nan")
        return math.exp(-self.logprob(seq) / len(seq))


def train_lm(
    corpus: list[tuple[int, ...]],
    order: int = 4,
    alpha: float = 0.01,
    vocab_size: int = VOCAB_SIZE,
) -> LanguageModel:
    """Count n-gram continuations over a corpus of token sequences."""
    if not corpus:
        raise EmptyCorpus("language model needs at least one sequence")
    lm = LanguageModel(order=order, alpha=alpha, vocab_size=vocab_size)
    for seq in corpus:
        lm.observe(tuple(seq))
    return lm
