"""Run a whole narrated session and export the resulting piece.

Loads the models written by 02_train_models.py, feeds a short transcript
through the session layer sentence by sentence (watching the emotion
classification and the reseed at the transition), and writes the final
MIDI next to this script. Run 02 first.
"""

from pathlib import Path

from storycomposer import persist, session
from storycomposer.search import ScorerBundle

HERE = Path(__file__).parent
MODELS = HERE / "models"

bundle = ScorerBundle(
    lm=persist.load_lm((MODELS / "lm.model").read_text()),
    valence_scorer=persist.load_emotion_scorer((MODELS / "scorer.valence").read_text()),
    arousal_scorer=persist.load_emotion_scorer((MODELS / "scorer.arousal").read_text()),
)
classifier = persist.load_story_classifier((MODELS / "story.model").read_text())
library = persist.load_seed_library((MODELS / "library.model").read_text())

config = session.SessionConfig(
    beam_size=2, expansion_k=8, sentence_seconds=2.0, max_new_tokens=512, rng_seed=42
)
state = session.new_session(bundle, classifier, library, config)

transcript = [
    "the battle begins now",
    "swords clash in the burning keep",
    "they rest by the calm fire",
    "a quiet morning on the river",
]

for text in transcript:
    record = session.process_sentence(state, text)
    marker = " <- reseeded" if record.reseeded else ""
    print(f"[{record.label:<11}] {record.seconds:4.1f}s  {text}{marker}")

out = HERE / "session.mid"
out.write_bytes(session.export_piece(state))
print(f"\ntotal {state.total_seconds:.1f}s of music -> {out}")
