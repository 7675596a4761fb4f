import math

import numpy as np
import pytest

from storycomposer import ngram
from storycomposer.errors import EmptyCorpus
from storycomposer.vocab import VOCAB_SIZE

from conftest import toy_lm_ab


A, B = 0, 1


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        ngram.train_lm([], order=2, alpha=0.1)


def test_toy_counts():
    lm = toy_lm_ab()
    assert lm.token_prob((A,), B) == 1.0  # both continuations of A are B
    assert lm.token_prob((), A) == 1.0  # start context always opens with A


def test_unseen_context_uniform_with_alpha():
    lm = ngram.train_lm([(A, B)], order=2, alpha=0.5, vocab_size=2)
    dist = lm.next_dist((B,))  # B was never a context
    np.testing.assert_allclose(dist, [0.5, 0.5])


def test_unseen_context_uniform_over_314():
    lm = ngram.train_lm([(0, 1, 2)], order=3, alpha=1.0)
    dist = lm.next_dist((100, 200))
    np.testing.assert_allclose(dist, np.full(VOCAB_SIZE, 1 / VOCAB_SIZE))


def test_normalization_random_contexts(rng):
    lm = ngram.train_lm(
        [tuple(int(x) for x in rng.integers(0, VOCAB_SIZE, size=50)) for _ in range(5)],
        order=3,
        alpha=0.01,
    )
    for _ in range(100):
        ctx = tuple(int(x) for x in rng.integers(0, VOCAB_SIZE, size=rng.integers(0, 4)))
        assert abs(lm.next_dist(ctx).sum() - 1.0) < 1e-9


def test_logprob_empty_sequence_is_zero():
    lm = toy_lm_ab()
    assert lm.logprob(()) == 0.0


def test_logprob_toy_sequence():
    lm = toy_lm_ab()
    assert lm.logprob((A, B)) == pytest.approx(math.log(1.0) + math.log(1.0))
    assert lm.logprob((A, B, A, B)) == pytest.approx(0.0)


def test_logprob_consistent_with_stepwise(rng):
    lm = ngram.train_lm(
        [tuple(int(x) for x in rng.integers(0, 10, size=30)) for _ in range(4)],
        order=3,
        alpha=0.2,
        vocab_size=10,
    )
    for _ in range(20):
        seq = tuple(int(x) for x in rng.integers(0, 10, size=12))
        stepwise = sum(
            math.log(lm.next_dist(seq[:i])[seq[i]]) for i in range(len(seq))
        )
        assert lm.logprob(seq) == pytest.approx(stepwise, abs=1e-9)


def test_higher_alpha_closer_to_uniform(rng):
    corpus = [tuple(int(x) for x in rng.integers(0, 8, size=40)) for _ in range(3)]
    uniform = np.full(8, 1 / 8)

    def kl_to_uniform(alpha):
        lm = ngram.train_lm(corpus, order=2, alpha=alpha, vocab_size=8)
        dist = lm.next_dist((corpus[0][0],))
        return float(np.sum(dist * np.log(dist / uniform)))

    kls = [kl_to_uniform(a) for a in (0.1, 1.0, 10.0)]
    assert kls[0] > kls[1] > kls[2]


def test_order_one_ignores_context(rng):
    lm = ngram.train_lm([(0, 0, 1)], order=1, alpha=0.0, vocab_size=2)
    np.testing.assert_allclose(lm.next_dist(()), [2 / 3, 1 / 3])
    np.testing.assert_allclose(lm.next_dist((1,)), [2 / 3, 1 / 3])
