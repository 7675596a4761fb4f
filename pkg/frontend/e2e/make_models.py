"""Write toy model files for the end-to-end console check.

Usage: python3 make_models.py OUT_DIR
"""

import sys
from pathlib import Path

import numpy as np

from storycomposer import codec, emotion, ngram, persist
from storycomposer.corpus import LabeledPiece
from storycomposer.pieces import Note, Piece
from storycomposer.session import CORNERS, build_seed_library
from storycomposer.story import train_story_classifier

out = Path(sys.argv[1])
out.mkdir(parents=True, exist_ok=True)


def melody(base_pitch: int, steps: int = 20) -> Piece:
    return Piece(
        notes=tuple(
            Note(start=s, pitch=base_pitch + s % 4, velocity=80, duration=2)
            for s in range(steps)
        )
    )


pieces = [melody(50 + 4 * i) for i in range(4)]
lm = ngram.train_lm([codec.encode(p) for p in pieces], order=4, alpha=0.001)
(out / "lm.model").write_text(persist.dump_lm(lm))

for dim in ("valence", "arousal"):
    scorer = emotion.EmotionScorer(
        weights=np.zeros(emotion.N_FEATURES), bias=0.0, dimension=dim
    )
    (out / f"scorer.{dim}").write_text(persist.dump_emotion_scorer(scorer))

clf = train_story_classifier(
    [
        ("the battle begins now", "Agitated"),
        ("they rest by the calm fire", "Calm"),
        ("a joyful feast for everyone", "Happy"),
        ("something lurks in the dark", "Suspenseful"),
    ]
)
(out / "story.model").write_text(persist.dump_story_classifier(clf))

library = build_seed_library(
    [
        LabeledPiece(piece=pieces[i], valence=v, arousal=a)
        for i, (v, a) in enumerate(CORNERS)
    ]
)
(out / "library.model").write_text(persist.dump_seed_library(library))
print(f"models written to {out}")
