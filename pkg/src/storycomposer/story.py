"""Story sentence emotion: Naive Bayes over tf-idf bags of words.

The four discrete story emotions map onto the binary valence/arousal
corners; one multinomial NB model is trained per dimension. Sentence
vectors are tf-idf weighted (smoothed idf) and L1-normalized, which makes
classification invariant to any positive rescaling of the vectors.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingClass, UnknownLabel

EMOTION_LABELS = ("Suspenseful", "Agitated", "Calm", "Happy")

_TOKEN_RE = re.compile(r"[a-z0-9]+")

SMOOTHING = 1.0


def map_emotion(label: str) -> tuple[int, int]:
    """Discrete story emotion -> (valence, arousal) corner."""
    mapping = {
        "Suspenseful": (0, 0),
        "Agitated": (0, 1),
        "Calm": (1, 0),
        "Happy": (1, 1),
    }
    try:
        return mapping[label]
    except KeyError:
        raise UnknownLabel(f"unknown emotion label: {label!r}") from None


def emotion_label(v: int, a: int) -> str:
    """Inverse of map_emotion."""
    return {(0, 0): "Suspenseful", (0, 1): "Agitated", (1, 0): "Calm", (1, 1): "Happy"}[(v, a)]


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass
class _BinaryNB:
    """Multinomial NB for one binary dimension over a shared word vocab."""

    vocab: dict[str, int]
    idf: np.ndarray
    log_prior: np.ndarray  # shape (2,)
    log_likelihood: np.ndarray  # shape (2, |vocab|)

    def _vector(self, text: str) -> np.ndarray:
        x = np.zeros(len(self.vocab))
        for word, count in Counter(tokenize(text)).items():
            idx = self.vocab.get(word)
            if idx is not None:
                x[idx] = count * self.idf[idx]
        total = x.sum()
        if total > 0:
            x /= total
        return x

    def log_posterior(self, text: str) -> np.ndarray:
        x = self._vector(text)
        scores = self.log_prior + self.log_likelihood @ x
        return scores - np.logaddexp(scores[0], scores[1])

    def predict(self, text: str) -> tuple[int, float]:
        logpost = self.log_posterior(text)
        cls = int(np.argmax(logpost))
        return cls, float(math.exp(logpost[cls]))


def _fit_binary_nb(
    texts: list[str], labels: list[int], vocab: dict[str, int], idf: np.ndarray, name: str
) -> _BinaryNB:
    if len(set(labels)) < 2:
        raise MissingClass(f"{name} training data misses a binary class")
    sums = np.full((2, len(vocab)), 0.0)
    class_counts = np.zeros(2)
    for text, label in zip(texts, labels):
        class_counts[label] += 1
        x = np.zeros(len(vocab))
        for word, count in Counter(tokenize(text)).items():
            idx = vocab[word]
            x[idx] = count * idf[idx]
        total = x.sum()
        if total > 0:
            x /= total
        sums[label] += x
    log_prior = np.log(class_counts / class_counts.sum())
    smoothed = sums + SMOOTHING
    log_likelihood = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))
    return _BinaryNB(vocab=vocab, idf=idf, log_prior=log_prior, log_likelihood=log_likelihood)


@dataclass
class StoryClassifier:
    valence_model: _BinaryNB
    arousal_model: _BinaryNB

    def classify(self, sentence: str) -> tuple[int, int, tuple[float, float]]:
        """(valence, arousal, per-dimension confidence); empty or fully
        out-of-vocabulary sentences fall back to the class priors."""
        v, cv = self.valence_model.predict(sentence)
        a, ca = self.arousal_model.predict(sentence)
        return v, a, (cv, ca)


def train_story_classifier(sentences: list[tuple[str, str]]) -> StoryClassifier:
    """Fit both binary NB models from (text, discrete label) pairs."""
    texts = [text for text, _ in sentences]
    pairs = [map_emotion(label) for _, label in sentences]

    vocab: dict[str, int] = {}
    doc_freq: Counter = Counter()
    for text in texts:
        words = set(tokenize(text))
        doc_freq.update(words)
        for word in words:
            vocab.setdefault(word, len(vocab))
    n_docs = len(texts)
    idf = np.zeros(len(vocab))
    for word, idx in vocab.items():
        idf[idx] = math.log((1 + n_docs) / (1 + doc_freq[word])) + 1.0

    valence_model = _fit_binary_nb(texts, [v for v, _ in pairs], vocab, idf, "valence")
    arousal_model = _fit_binary_nb(texts, [a for _, a in pairs], vocab, idf, "arousal")
    return StoryClassifier(valence_model=valence_model, arousal_model=arousal_model)


def parse_story_csv(text: str) -> list[tuple[str, str]]:
    """Parse a ``text,label`` CSV with the four discrete emotion labels."""
    import csv
    import io

    rows = list(csv.DictReader(io.StringIO(text)))
    return [(row["text"], row["label"]) for row in rows]
