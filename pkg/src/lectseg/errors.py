"""Exception hierarchy.

Every domain error raised by this package derives from LectsegError so the
CLI can map them to exit code 1 while genuine bugs still surface as plain
tracebacks.
"""


class LectsegError(Exception):
    """Base class for all domain errors."""


class UnknownLabel(LectsegError):
    """Label name not in the taxonomy (after alias resolution)."""


class UnreadableAudio(LectsegError):
    """Audio file is corrupt or uses an unsupported codec."""


class MalformedTranscript(LectsegError):
    """Transcript file violates the word-JSON or WebVTT contract."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedAnnotation(LectsegError):
    """Annotation CSV row cannot be parsed into a valid span."""


class OverlappingSpans(LectsegError):
    """Annotation spans within one recording overlap."""


class MalformedManifest(LectsegError):
    """Manifest JSON violates its schema (duplicate ids, missing keys)."""


class MissingFile(LectsegError):
    """One or more files referenced by a manifest do not exist."""

    def __init__(self, paths):
        self.paths = list(paths)
        super().__init__("missing files: " + ", ".join(str(p) for p in self.paths))


class InputTooShort(LectsegError):
    """Input shorter than the conv stack's receptive field."""


class WeightsUnavailable(LectsegError):
    """Pretrained encoder weights could not be loaded."""


class BadSampleCount(LectsegError):
    """Audio frame does not hold exactly one second of samples."""


class CacheMiss(LectsegError):
    """No cache entry under the requested key."""


class CorruptEntry(LectsegError):
    """Cache entry failed its integrity check."""


class ShapeMismatch(LectsegError):
    """Embedding or parameter shape differs from the model config."""


class ClassTooSmall(LectsegError):
    """A class has too few samples to stratify."""


class NoLabeledData(LectsegError):
    """No labeled frames available."""


class NonFiniteLoss(LectsegError):
    """Training loss became NaN or infinite."""


class ChecksumMismatch(LectsegError):
    """Checkpoint blob does not match the checksum in its header."""


class LengthMismatch(LectsegError):
    """Paired prediction/gold sequences differ in length."""


class EvenWindow(LectsegError):
    """Smoothing window must be odd."""
