"""Logistic music-emotion scorers over hand-built sequence features.

Feature vector (17 dims, all in [0, 1]):
    0..11  pitch-class histogram, L1-normalized
    12     mean velocity / 127
    13     velocity std / 127
    14     note density: notes per timestep, divided by 8 and clipped
    15     mean note duration / 56
    16     TS-token fraction of the sequence

A scorer is a weight vector + bias through a sigmoid; training is plain
full-batch gradient descent on cross-entropy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import vocab
from .codec import TokenSeq
from .errors import SingleClassData
from .vocab import TS_ID

N_FEATURES = 17
FEATURE_NAMES = tuple(
    [f"pitch_class_{i}" for i in range(12)]
    + ["velocity_mean", "velocity_std", "note_density", "duration_mean", "ts_fraction"]
)

DENSITY_SCALE = 8.0  # notes per timestep mapped to [0,1]


def extract_features(tokens: TokenSeq) -> np.ndarray:
    """Map a token sequence to the fixed 17-dim feature vector."""
    pitches: list[int] = []
    velocities: list[int] = []
    durations: list[int] = []
    ts_count = 0
    i = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t == TS_ID:
            ts_count += 1
            i += 1
            continue
        if (
            vocab.is_velocity(t)
            and i + 2 < n
            and vocab.is_duration(tokens[i + 1])
            and vocab.is_pitch(tokens[i + 2])
        ):
            velocities.append(t - vocab.VELOCITY_BASE)
            durations.append(tokens[i + 1] - vocab.DURATION_BASE + vocab.MIN_DURATION)
            pitches.append(tokens[i + 2] - vocab.PITCH_BASE)
            i += 3
            continue
        i += 1
    feats = np.zeros(N_FEATURES)
    if pitches:
        hist = np.bincount(np.asarray(pitches) % 12, minlength=12).astype(float)
        feats[:12] = hist / hist.sum()
        vels = np.asarray(velocities, dtype=float)
        feats[12] = vels.mean() / 127.0
        feats[13] = vels.std() / 127.0
        feats[14] = min(len(pitches) / (ts_count + 1) / DENSITY_SCALE, 1.0)
        feats[15] = float(np.mean(durations)) / 56.0
    if n:
        feats[16] = ts_count / n
    return feats


def _sigmoid(z: np.ndarray | float):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def loss_and_grad(
    params: np.ndarray, features: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient; params = [weights..., bias]."""
    w, b = params[:-1], params[-1]
    z = features @ w + b
    p = _sigmoid(z)
    eps = 1e-12
    loss = -np.mean(labels * np.log(p + eps) + (1 - labels) * np.log(1 - p + eps))
    err = p - labels
    grad = np.concatenate([features.T @ err / len(labels), [err.mean()]])
    return float(loss), grad


@dataclass
class EmotionScorer:
    """score(tokens) in [0, 1]; 0.5 exactly on the empty sequence."""

    weights: np.ndarray
    bias: float
    dimension: str = "valence"

    def score(self, tokens: TokenSeq) -> float:
        if not tokens:
            return 0.5
        feats = extract_features(tokens)
        return float(_sigmoid(feats @ self.weights + self.bias))


def train_emotion_scorer(
    data: list[tuple[TokenSeq, int]],
    dimension: str = "valence",
    learning_rate: float = 2.0,
    max_epochs: int = 10_000,
    rel_tol: float = 1e-6,
) -> EmotionScorer:
    """Fit the logistic scorer on (token sequence, binary label) pairs.

    Gradient descent runs until the relative loss change drops below
    ``rel_tol`` or ``max_epochs`` is reached.
    """
    labels = np.asarray([label for _, label in data], dtype=float)
    if len(set(labels.tolist())) < 2:
        raise SingleClassData(f"{dimension} training data has a single class")
    features = np.stack([extract_features(tuple(seq)) for seq, _ in data])
    params = np.zeros(N_FEATURES + 1)
    prev_loss = None
    for _ in range(max_epochs):
        loss, grad = loss_and_grad(params, features, labels)
        params = params - learning_rate * grad
        if prev_loss is not None and abs(prev_loss - loss) < rel_tol * max(abs(prev_loss), 1e-12):
            break
        prev_loss = loss
    return EmotionScorer(weights=params[:-1].copy(), bias=float(params[-1]), dimension=dimension)
