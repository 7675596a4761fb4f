import numpy as np
import pytest

from storycomposer import codec, emotion, persist
from storycomposer.corpus import LabeledPiece
from storycomposer.errors import ModelFormatError
from storycomposer.ngram import LanguageModel, train_lm
from storycomposer.pieces import Note, Piece
from storycomposer.session import CORNERS, SeedLibrary, build_seed_library
from storycomposer.story import train_story_classifier
from storycomposer.vocab import VOCAB_SIZE

from conftest import random_piece


STORY_FIXTURE = [
    ("the battle begins now", "Agitated"),
    ("they rest by the calm fire", "Calm"),
    ("a joyful feast for everyone", "Happy"),
    ("something lurks in the dark", "Suspenseful"),
]


def piece_with_steps(base_pitch: int, steps: int = 8) -> Piece:
    return Piece(
        notes=tuple(
            Note(start=s, pitch=base_pitch + s % 3, velocity=70, duration=1)
            for s in range(steps)
        )
    )


def emotion_dataset(rng):
    data = []
    for i in range(16):
        seq = codec.encode(random_piece(rng, max_notes=12))
        data.append((seq, i % 2))
    return data


class TestLmRoundTrip:
    def test_bit_exact_logprob(self, rng):
        corpus = [tuple(int(x) for x in rng.integers(0, VOCAB_SIZE, size=60)) for _ in range(4)]
        lm = train_lm(corpus, order=3, alpha=0.017)
        loaded = persist.load_lm(persist.dump_lm(lm))
        assert loaded.order == lm.order
        assert loaded.alpha == lm.alpha
        assert loaded.vocab_size == lm.vocab_size
        assert loaded.counts == lm.counts
        assert loaded.context_totals == lm.context_totals
        for _ in range(20):
            seq = tuple(int(x) for x in rng.integers(0, VOCAB_SIZE, size=15))
            assert loaded.logprob(seq) == lm.logprob(seq)

    def test_reduced_vocab_round_trip(self):
        lm = LanguageModel(order=2, alpha=0.5, vocab_size=6)
        lm.observe((0, 1, 2, 5, 3, 5))
        loaded = persist.load_lm(persist.dump_lm(lm))
        assert loaded.counts == lm.counts
        assert "vocab_sha256" not in persist.dump_lm(lm)

    def test_dump_deterministic(self, rng):
        corpus = [tuple(int(x) for x in rng.integers(0, 20, size=40))]
        lm = train_lm(corpus, order=3, alpha=0.01, vocab_size=20)
        assert persist.dump_lm(lm) == persist.dump_lm(lm)


class TestEmotionRoundTrip:
    def test_bit_exact_scores(self, rng):
        scorer = emotion.train_emotion_scorer(emotion_dataset(rng), dimension="valence")
        loaded = persist.load_emotion_scorer(persist.dump_emotion_scorer(scorer))
        assert loaded.dimension == "valence"
        assert loaded.bias == scorer.bias
        np.testing.assert_array_equal(loaded.weights, scorer.weights)
        for _ in range(20):
            seq = codec.encode(random_piece(rng, max_notes=10))
            assert loaded.score(seq) == scorer.score(seq)

    def test_missing_weight_rejected(self, rng):
        scorer = emotion.train_emotion_scorer(emotion_dataset(rng), dimension="arousal")
        text = persist.dump_emotion_scorer(scorer)
        lines = text.splitlines()
        truncated = "\n".join(lines[:-1]) + "\n"
        with pytest.raises(ModelFormatError):
            persist.load_emotion_scorer(truncated)


class TestStoryRoundTrip:
    def test_identical_predictions(self):
        clf = train_story_classifier(STORY_FIXTURE)
        loaded = persist.load_story_classifier(persist.dump_story_classifier(clf))
        for text, _ in STORY_FIXTURE + [("totally new words here", "")]:
            assert loaded.classify(text) == clf.classify(text)

    def test_bit_exact_parameters(self):
        clf = train_story_classifier(STORY_FIXTURE)
        loaded = persist.load_story_classifier(persist.dump_story_classifier(clf))
        assert loaded.valence_model.vocab == clf.valence_model.vocab
        np.testing.assert_array_equal(loaded.valence_model.idf, clf.valence_model.idf)
        np.testing.assert_array_equal(
            loaded.arousal_model.log_likelihood, clf.arousal_model.log_likelihood
        )

    def test_missing_row_rejected(self):
        clf = train_story_classifier(STORY_FIXTURE)
        text = persist.dump_story_classifier(clf)
        text = text.replace("arousal.log_prior", "arousal.log_prior_gone")
        with pytest.raises(ModelFormatError):
            persist.load_story_classifier(text)


class TestSeedLibraryRoundTrip:
    def test_round_trip(self):
        labeled = [
            LabeledPiece(piece=piece_with_steps(50 + 3 * i), valence=v, arousal=a)
            for i, (v, a) in enumerate(CORNERS)
        ]
        library = build_seed_library(labeled)
        loaded = persist.load_seed_library(persist.dump_seed_library(library))
        assert loaded.prefixes == library.prefixes


class TestFormatGuards:
    def make_library_text(self):
        labeled = [
            LabeledPiece(piece=piece_with_steps(50 + 3 * i), valence=v, arousal=a)
            for i, (v, a) in enumerate(CORNERS)
        ]
        return persist.dump_seed_library(build_seed_library(labeled))

    def test_bad_magic(self):
        with pytest.raises(ModelFormatError):
            persist.load_lm("not a model\n")

    def test_wrong_type_for_loader(self):
        with pytest.raises(ModelFormatError):
            persist.load_emotion_scorer(self.make_library_text())

    def test_vocab_hash_mismatch(self):
        text = self.make_library_text()
        import re

        bad = re.sub(r"vocab_sha256: \w", "vocab_sha256: 0", text, count=1)
        if bad == text:
            bad = text.replace("vocab_sha256: ", "vocab_sha256: dead", 1)
        with pytest.raises(ModelFormatError):
            persist.load_seed_library(bad)

    def test_load_any_dispatch(self, rng):
        lm = train_lm([(0, 1, 2)], order=2, alpha=1.0, vocab_size=3)
        obj = persist.load_any(persist.dump_lm(lm))
        assert isinstance(obj, LanguageModel)
        obj = persist.load_any(self.make_library_text())
        assert isinstance(obj, SeedLibrary)

    def test_load_any_unknown_type(self):
        with pytest.raises(ModelFormatError):
            persist.load_any(f"{persist.MAGIC}\ntype: mystery\n\n")
