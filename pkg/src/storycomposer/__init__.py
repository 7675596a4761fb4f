"""Emotion-steered symbolic music composition from story sentences."""

from .codec import TokenSeq, decode, duration_seconds, encode
from .corpus import LabeledPiece, augment, dedup, extract_piano_tracks, slice_piece
from .emotion import EmotionScorer, train_emotion_scorer
from .errors import StoryComposerError
from .ngram import LanguageModel, train_lm
from .pieces import Note, Piece
from .search import ScorerBundle, SearchParams, SearchResult, exhaustive_oracle, sbbs
from .session import (
    SeedLibrary,
    SessionConfig,
    SessionState,
    build_seed_library,
    export_piece,
    new_session,
    process_sentence,
)
from .smf import parse_midi, write_midi
from .story import StoryClassifier, map_emotion, train_story_classifier
from .vocab import Token, VOCAB_SIZE, id_token, token_id, vocab_hash, vocab_table

__version__ = "0.1.0"

__all__ = [
    "TokenSeq", "decode", "duration_seconds", "encode",
    "LabeledPiece", "augment", "dedup", "extract_piano_tracks", "slice_piece",
    "EmotionScorer", "train_emotion_scorer",
    "StoryComposerError",
    "LanguageModel", "train_lm",
    "Note", "Piece",
    "ScorerBundle", "SearchParams", "SearchResult", "exhaustive_oracle", "sbbs",
    "SeedLibrary", "SessionConfig", "SessionState", "build_seed_library",
    "export_piece", "new_session", "process_sentence",
    "parse_midi", "write_midi",
    "StoryClassifier", "map_emotion", "train_story_classifier",
    "Token", "VOCAB_SIZE", "id_token", "token_id", "vocab_hash", "vocab_table",
]
