"""Train every desk-scale model on a synthetic corpus and save them.

Produces the four model files the compose/serve commands need:
an n-gram language model, valence and arousal scorers, a sentence
emotion classifier, and a seed-prefix library — all under demos/models/.
"""

from pathlib import Path

import numpy as np

from storycomposer import codec, emotion, ngram, persist
from storycomposer.corpus import LabeledPiece, augment
from storycomposer.pieces import Note, Piece
from storycomposer.session import CORNERS, build_seed_library
from storycomposer.story import train_story_classifier

OUT = Path(__file__).parent / "models"
OUT.mkdir(exist_ok=True)
rng = np.random.default_rng(0)


def melody(base_pitch: int, steps: int = 24, per_step: int = 1) -> Piece:
    notes = []
    for s in range(steps):
        for i in range(per_step):
            notes.append(
                Note(start=s, pitch=base_pitch + (s + 5 * i) % 7, velocity=80, duration=2)
            )
    return Piece(notes=tuple(notes))


# --- language model, trained on augmented variants of four tiny melodies ----
pieces = [melody(48 + 5 * i) for i in range(4)]
training = [codec.encode(v) for p in pieces for v in augment(p)]
lm = ngram.train_lm(training, order=4, alpha=0.01)
(OUT / "lm.model").write_text(persist.dump_lm(lm))
print(f"language model: order {lm.order}, {len(training)} training sequences")

# --- emotion scorers: density separates arousal, register separates valence --
def labeled_examples(n=30):
    data = []
    for _ in range(n):
        dense = melody(int(rng.integers(55, 70)), per_step=4)
        sparse = melody(int(rng.integers(40, 55)), per_step=1)
        data.append((codec.encode(dense), 1, 1))
        data.append((codec.encode(sparse), 0, 0))
    return data


examples = labeled_examples()
for dim, col in (("valence", 1), ("arousal", 2)):
    scorer = emotion.train_emotion_scorer(
        [(e[0], e[col]) for e in examples], dimension=dim
    )
    (OUT / f"scorer.{dim}").write_text(persist.dump_emotion_scorer(scorer))
    print(f"{dim} scorer trained on {len(examples)} examples")

# --- sentence emotion classifier -------------------------------------------
sentences = [
    ("the battle begins now", "Agitated"),
    ("swords clash in the burning keep", "Agitated"),
    ("they rest by the calm fire", "Calm"),
    ("a quiet morning on the river", "Calm"),
    ("a joyful feast for everyone", "Happy"),
    ("the heroes cheer and celebrate", "Happy"),
    ("something lurks in the dark", "Suspenseful"),
    ("footsteps echo in the empty hall", "Suspenseful"),
]
clf = train_story_classifier(sentences)
(OUT / "story.model").write_text(persist.dump_story_classifier(clf))
print(f"story classifier trained on {len(sentences)} sentences")

# --- seed library: one human-composed prefix per emotion corner -------------
library = build_seed_library(
    [LabeledPiece(piece=pieces[i], valence=v, arousal=a) for i, (v, a) in enumerate(CORNERS)]
)
(OUT / "library.model").write_text(persist.dump_seed_library(library))
print(f"seed library: {sum(len(v) for v in library.prefixes.values())} prefixes")
print(f"\nmodels written to {OUT}")
