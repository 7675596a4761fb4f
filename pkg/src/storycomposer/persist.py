"""Versioned text persistence for trained models and seed libraries.

Every file starts with a ``storycomposer-model v1`` magic line followed by
``key: value`` header lines, a blank line, then the body. Models defined
over the token vocabulary carry its SHA-256; loading them against a
different vocabulary table is an error. Floats are written with repr()
so reloading is bit-exact.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .errors import ModelFormatError
from .ngram import LanguageModel
from .emotion import EmotionScorer, FEATURE_NAMES, N_FEATURES
from .session import SeedLibrary
from .story import StoryClassifier, _BinaryNB
from .vocab import VOCAB_SIZE, vocab_hash

MAGIC = "storycomposer-model v1"


def _render(headers: dict[str, str], body_lines: list[str]) -> str:
    out = [MAGIC]
    out += [f"{k}: {v}" for k, v in headers.items()]
    out.append("")
    out += body_lines
    return "\n".join(out) + "\n"


def _parse(text: str) -> tuple[dict[str, str], list[str]]:
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ModelFormatError("missing or unsupported model magic line")
    headers: dict[str, str] = {}
    i = 1
    while i < len(lines) and lines[i]:
        if ": " not in lines[i]:
            raise ModelFormatError(f"bad header line: {lines[i]!r}")
        key, value = lines[i].split(": ", 1)
        headers[key] = value
        i += 1
    return headers, lines[i + 1 :]


def _check_vocab(headers: dict[str, str]) -> None:
    stored = headers.get("vocab_sha256")
    if stored is not None and stored != vocab_hash():
        raise ModelFormatError("model vocabulary hash does not match this codec")


def dump_lm(lm: LanguageModel) -> str:
    headers = {
        "type": "ngram-lm",
        "order": str(lm.order),
        "alpha": repr(lm.alpha),
        "vocab_size": str(lm.vocab_size),
    }
    if lm.vocab_size == VOCAB_SIZE:
        headers["vocab_sha256"] = vocab_hash()
    body = []
    for ctx in sorted(lm.counts):
        ctx_str = ",".join(map(str, ctx)) if ctx else "-"
        for token, count in sorted(lm.counts[ctx].items()):
            body.append(f"{ctx_str} {token} {count}")
    return _render(headers, body)


def load_lm(text: str) -> LanguageModel:
    headers, body = _parse(text)
    if headers.get("type") != "ngram-lm":
        raise ModelFormatError(f"expected ngram-lm, got {headers.get('type')}")
    _check_vocab(headers)
    lm = LanguageModel(
        order=int(headers["order"]),
        alpha=float(headers["alpha"]),
        vocab_size=int(headers["vocab_size"]),
    )
    for line in body:
        if not line.strip():
            continue
        ctx_str, token, count = line.split()
        ctx = () if ctx_str == "-" else tuple(int(x) for x in ctx_str.split(","))
        lm.counts.setdefault(ctx, Counter())[int(token)] = int(count)
        lm.context_totals[ctx] = lm.context_totals.get(ctx, 0) + int(count)
    return lm


def dump_emotion_scorer(scorer: EmotionScorer) -> str:
    headers = {
        "type": "emotion-scorer",
        "dimension": scorer.dimension,
        "vocab_sha256": vocab_hash(),
        "bias": repr(scorer.bias),
    }
    body = [f"{name} {repr(float(w))}" for name, w in zip(FEATURE_NAMES, scorer.weights)]
    return _render(headers, body)


def load_emotion_scorer(text: str) -> EmotionScorer:
    headers, body = _parse(text)
    if headers.get("type") != "emotion-scorer":
        raise ModelFormatError(f"expected emotion-scorer, got {headers.get('type')}")
    _check_vocab(headers)
    weights = np.zeros(N_FEATURES)
    by_name = {}
    for line in body:
        if not line.strip():
            continue
        name, value = line.split()
        by_name[name] = float(value)
    for i, name in enumerate(FEATURE_NAMES):
        if name not in by_name:
            raise ModelFormatError(f"missing weight for feature {name}")
        weights[i] = by_name[name]
    return EmotionScorer(
        weights=weights, bias=float(headers["bias"]), dimension=headers.get("dimension", "")
    )


def _dump_binary_nb(nb: _BinaryNB, prefix: str) -> list[str]:
    lines = [f"{prefix}.log_prior {repr(float(nb.log_prior[0]))} {repr(float(nb.log_prior[1]))}"]
    for cls in (0, 1):
        row = " ".join(repr(float(x)) for x in nb.log_likelihood[cls])
        lines.append(f"{prefix}.log_likelihood.{cls} {row}")
    return lines


def dump_story_classifier(clf: StoryClassifier) -> str:
    vm = clf.valence_model
    words = sorted(vm.vocab, key=vm.vocab.get)
    headers = {"type": "story-classifier", "words": str(len(words))}
    body = [f"word {w} {repr(float(vm.idf[i]))}" for i, w in enumerate(words)]
    body += _dump_binary_nb(clf.valence_model, "valence")
    body += _dump_binary_nb(clf.arousal_model, "arousal")
    return _render(headers, body)


def load_story_classifier(text: str) -> StoryClassifier:
    headers, body = _parse(text)
    if headers.get("type") != "story-classifier":
        raise ModelFormatError(f"expected story-classifier, got {headers.get('type')}")
    vocab: dict[str, int] = {}
    idf_values: list[float] = []
    rows: dict[str, list[float] | np.ndarray] = {}
    for line in body:
        if not line.strip():
            continue
        key, rest = line.split(" ", 1)
        if key == "word":
            word, value = rest.split()
            vocab[word] = len(vocab)
            idf_values.append(float(value))
        else:
            rows[key] = [float(x) for x in rest.split()]
    idf = np.array(idf_values)

    def build(prefix: str) -> _BinaryNB:
        try:
            prior = np.array(rows[f"{prefix}.log_prior"])
            lik = np.stack(
                [np.array(rows[f"{prefix}.log_likelihood.0"]), np.array(rows[f"{prefix}.log_likelihood.1"])]
            )
        except KeyError as exc:
            raise ModelFormatError(f"missing story model row: {exc}") from None
        if lik.shape[1] != len(vocab):
            raise ModelFormatError("story model row width does not match word list")
        return _BinaryNB(vocab=vocab, idf=idf, log_prior=prior, log_likelihood=lik)

    return StoryClassifier(valence_model=build("valence"), arousal_model=build("arousal"))


def dump_seed_library(library: SeedLibrary) -> str:
    headers = {"type": "seed-library", "vocab_sha256": vocab_hash()}
    body = []
    for (v, a), entries in sorted(library.prefixes.items()):
        for seq in entries:
            body.append(f"{v} {a} {','.join(map(str, seq))}")
    return _render(headers, body)


def load_seed_library(text: str) -> SeedLibrary:
    headers, body = _parse(text)
    if headers.get("type") != "seed-library":
        raise ModelFormatError(f"expected seed-library, got {headers.get('type')}")
    _check_vocab(headers)
    prefixes: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    for line in body:
        if not line.strip():
            continue
        v, a, ids = line.split()
        prefixes.setdefault((int(v), int(a)), []).append(tuple(int(x) for x in ids.split(",")))
    return SeedLibrary(prefixes={c: tuple(v) for c, v in prefixes.items()})


def load_any(text: str) -> object:
    headers, _ = _parse(text)
    loaders = {
        "ngram-lm": load_lm,
        "emotion-scorer": load_emotion_scorer,
        "story-classifier": load_story_classifier,
        "seed-library": load_seed_library,
    }
    loader = loaders.get(headers.get("type", ""))
    if loader is None:
        raise ModelFormatError(f"unknown model type: {headers.get('type')}")
    return loader(text)
