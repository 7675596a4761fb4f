"""Exception types shared across the package."""


class StoryComposerError(Exception):
    """Base class for all package errors."""


class MalformedMidi(StoryComposerError):
    """Raised when a MIDI file is structurally invalid (bad/truncated chunks)."""


class MalformedTokenSeq(StoryComposerError):
    """Raised when a token sequence violates the triple/TS/END grammar."""


class EmptyPiece(StoryComposerError):
    """Raised when an operation requires at least one note."""


class TooShort(StoryComposerError):
    """Raised when a piece does not span enough timesteps to be sliced."""


class EmptyCorpus(StoryComposerError):
    """Raised when a training corpus contains no sequences."""


class SingleClassData(StoryComposerError):
    """Raised when emotion-scorer training data contains only one class."""


class MissingClass(StoryComposerError):
    """Raised when story-classifier training data misses a binary class."""


class UnknownLabel(StoryComposerError):
    """Raised for an emotion label outside the four known ones."""


class EmptyCandidateSet(StoryComposerError):
    """Raised when beam sampling is given no candidates."""


class InvalidSeed(StoryComposerError):
    """Raised when a search seed sequence contains END."""


class SearchSpaceTooLarge(StoryComposerError):
    """Guardrail for the exhaustive search oracle."""


class InvalidLibrary(StoryComposerError):
    """Raised when a seed library misses an emotion corner or has bad entries."""


class ModelFormatError(StoryComposerError):
    """Raised when a persisted model file cannot be loaded (bad header,
    version mismatch, or vocabulary hash mismatch)."""
