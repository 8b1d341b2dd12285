"""The teaching-activity label set.

Ten leaf labels arranged in two branches: activities recognizable from the
audio signal alone (silence, noise, student chatter) and activities that need
the transcript. Interaction and Exercise/Problem sit under both branches.
Integer ids follow the per-class report row order (Theory/Concept = 0 ...
Miscellaneous = 9) and are stable across runs.
"""

from dataclasses import dataclass, field

from .errors import UnknownLabel

AUDIO = "Audio"
TRANSCRIPTION = "Transcription"


@dataclass(frozen=True)
class ActivityLabel:
    id: int
    name: str
    categories: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.categories or not self.categories <= {AUDIO, TRANSCRIPTION}:
            raise ValueError(f"bad categories for {self.name}: {self.categories}")


def _label(i, name, *cats):
    return ActivityLabel(i, name, frozenset(cats))


LABELS = (
    _label(0, "Theory/Concept", TRANSCRIPTION),
    _label(1, "Exercise/Problem", AUDIO, TRANSCRIPTION),
    _label(2, "Example/Real Application", TRANSCRIPTION),
    _label(3, "Organization", TRANSCRIPTION),
    _label(4, "Interaction", AUDIO, TRANSCRIPTION),
    _label(5, "Digression", TRANSCRIPTION),
    _label(6, "Other", TRANSCRIPTION),
    _label(7, "Indistinct Chat", AUDIO),
    _label(8, "Pause", AUDIO),
    _label(9, "Miscellaneous", AUDIO),
)

N_CLASSES = len(LABELS)

# Annotators abbreviate; canonical names stay singular.
_ALIASES = {
    "exercise": "Exercise/Problem",
    "problem": "Exercise/Problem",
    "practical activity": "Exercise/Problem",
    "theory": "Theory/Concept",
    "concept": "Theory/Concept",
    "example": "Example/Real Application",
    "real application": "Example/Real Application",
    "indistinct": "Indistinct Chat",
    "chat": "Indistinct Chat",
    "misc": "Miscellaneous",
}

_BY_NAME = {label.name.lower(): label for label in LABELS}


def label_by_id(label_id):
    """Label with the given integer id (0..9)."""
    if not 0 <= label_id < N_CLASSES:
        raise UnknownLabel(f"label id out of range: {label_id}")
    return LABELS[label_id]


def label_by_name(name):
    """Resolve a label by canonical name or alias, case-insensitively."""
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    label = _BY_NAME.get(key.lower())
    if label is None:
        raise UnknownLabel(f"unknown activity label: {name!r}")
    return label


def audio_distinguishable(label):
    """True iff the label can be told apart from the audio signal alone."""
    return AUDIO in label.categories


def taxonomy_map():
    """id -> name mapping used in exported JSON headers."""
    return {label.id: label.name for label in LABELS}
