import numpy as np
import pytest

from storycomposer import emotion
from storycomposer.codec import encode
from storycomposer.errors import SingleClassData
from storycomposer.pieces import Note, Piece


def dense_piece(notes_per_step: int, steps: int = 8, rng=None) -> Piece:
    rng = rng or np.random.default_rng(0)
    notes = []
    for s in range(steps):
        for i in range(notes_per_step):
            notes.append(
                Note(
                    start=s,
                    pitch=int(rng.integers(40, 90)),
                    velocity=int(rng.integers(40, 100)),
                    duration=int(rng.integers(1, 8)),
                )
            )
    return Piece(notes=tuple(notes))


def density_dataset(rng, n_per_class=20):
    data = []
    for i in range(n_per_class):
        data.append((encode(dense_piece(int(rng.integers(4, 7)), rng=rng)), 1))
        data.append((encode(dense_piece(1, rng=rng)), 0))
    return data


def test_feature_vector_shape_and_range(rng):
    for _ in range(50):
        piece = dense_piece(int(rng.integers(1, 5)), rng=rng)
        feats = emotion.extract_features(encode(piece))
        assert feats.shape == (emotion.N_FEATURES,)
        assert np.all(feats >= 0) and np.all(feats <= 1)


def test_gradient_matches_finite_differences(rng):
    features = rng.random((40, emotion.N_FEATURES))
    labels = (rng.random(40) > 0.5).astype(float)
    for _ in range(20):
        params = rng.normal(size=emotion.N_FEATURES + 1)
        _, grad = emotion.loss_and_grad(params, features, labels)
        eps = 1e-6
        for j in range(len(params)):
            step = np.zeros_like(params)
            step[j] = eps
            lp, _ = emotion.loss_and_grad(params + step, features, labels)
            lm_, _ = emotion.loss_and_grad(params - step, features, labels)
            numeric = (lp - lm_) / (2 * eps)
            denom = max(abs(numeric), abs(grad[j]), 1e-8)
            assert abs(grad[j] - numeric) / denom < 1e-4


def test_separable_fixture_accuracy(rng):
    train = density_dataset(rng)
    test = density_dataset(rng, n_per_class=10)
    scorer = emotion.train_emotion_scorer(train, dimension="arousal")
    hits = sum((scorer.score(seq) >= 0.5) == bool(label) for seq, label in test)
    assert hits / len(test) >= 0.95


def test_label_flip_symmetry(rng):
    train = density_dataset(rng)
    flipped = [(seq, 1 - label) for seq, label in train]
    test = density_dataset(rng, n_per_class=10)
    scorer = emotion.train_emotion_scorer(train, dimension="arousal")
    inverse = emotion.train_emotion_scorer(flipped, dimension="arousal")
    for seq, _ in test:
        assert abs(scorer.score(seq) - (1 - inverse.score(seq))) < 0.05


def test_scores_in_unit_interval(rng):
    scorer = emotion.train_emotion_scorer(density_dataset(rng), dimension="arousal")
    for _ in range(1000):
        length = int(rng.integers(0, 40))
        seq = tuple(int(x) for x in rng.integers(0, 314, size=length))
        assert 0.0 <= scorer.score(seq) <= 1.0


def test_empty_sequence_neutral():
    scorer = emotion.EmotionScorer(weights=np.ones(emotion.N_FEATURES), bias=3.0)
    assert scorer.score(()) == 0.5


def test_denser_piece_scores_higher_arousal(rng):
    scorer = emotion.train_emotion_scorer(density_dataset(rng), dimension="arousal")
    sparse = encode(dense_piece(1, rng=np.random.default_rng(7)))
    dense = encode(dense_piece(6, rng=np.random.default_rng(7)))
    assert scorer.score(dense) > scorer.score(sparse)


def test_single_class_rejected(rng):
    data = [(encode(dense_piece(2, rng=rng)), 1) for _ in range(5)]
    with pytest.raises(SingleClassData):
        emotion.train_emotion_scorer(data)


def test_score_deterministic(rng):
    scorer = emotion.train_emotion_scorer(density_dataset(rng), dimension="valence")
    seq = encode(dense_piece(3, rng=rng))
    assert scorer.score(seq) == scorer.score(seq)
