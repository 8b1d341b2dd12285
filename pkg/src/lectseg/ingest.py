"""Recording ingestion.

Canonical audio is mono float32 at 16 kHz in [-1, 1]: one second is then
exactly 16000 samples, which the audio feature extractor maps to 49 latent
steps. Transcripts arrive either as word-JSON (one timed entry per word) or
as WebVTT cues whose words get uniform sub-intervals. Gold annotations are
CSV spans of `start_s,end_s,label_name`.
"""

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import (
    MalformedAnnotation,
    MalformedManifest,
    MalformedTranscript,
    MissingFile,
    OverlappingSpans,
    UnreadableAudio,
)
from .taxonomy import label_by_name

SAMPLE_RATE = 16000


@dataclass(frozen=True)
class TimedWord:
    text: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("empty word text")
        if self.start_s < 0 or self.end_s <= self.start_s:
            raise ValueError(f"bad word timing [{self.start_s}, {self.end_s})")


@dataclass(frozen=True)
class AnnotationSpan:
    start_s: float
    end_s: float
    label: object  # ActivityLabel

    def __post_init__(self):
        if self.end_s <= self.start_s:
            raise ValueError(f"bad span timing [{self.start_s}, {self.end_s})")


@dataclass
class Recording:
    id: str
    samples: np.ndarray  # mono float32 at SAMPLE_RATE
    duration_s: float
    words: list  # sorted TimedWord
    annotations: list | None = None
    meta: dict = field(default_factory=dict)

    def validate(self):
        if abs(self.duration_s - len(self.samples) / SAMPLE_RATE) > 1.0 / SAMPLE_RATE:
            raise ValueError("duration_s inconsistent with sample count")
        tol = 1.0 / SAMPLE_RATE
        if any(w.end_s > self.duration_s + tol for w in self.words):
            raise MalformedTranscript(
                f"word times exceed audio duration ({self.duration_s:.3f} s)"
            )
        if self.annotations and any(
            s.end_s > self.duration_s + tol for s in self.annotations
        ):
            raise MalformedAnnotation(
                f"annotation spans exceed audio duration ({self.duration_s:.3f} s)"
            )
        return self


def load_audio(path):
    """Read a PCM WAV of any rate/channel count as canonical audio.

    Returns (samples, duration_s). Multi-channel input is averaged to mono;
    rates other than 16 kHz are polyphase-resampled. Already-canonical input
    passes through untouched apart from the integer -> [-1, 1] scaling.
    """
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise UnreadableAudio(f"{path}: {exc}") from exc

    if data.dtype == np.int16:
        x = data.astype(np.float32) / 32768.0
    elif data.dtype == np.int32:
        x = data.astype(np.float32) / 2147483648.0
    elif data.dtype == np.uint8:
        x = (data.astype(np.float32) - 128.0) / 128.0
    elif data.dtype in (np.float32, np.float64):
        x = data.astype(np.float32)
    else:
        raise UnreadableAudio(f"{path}: unsupported sample format {data.dtype}")

    if x.ndim == 2:
        x = x.mean(axis=1)
    elif x.ndim != 1:
        raise UnreadableAudio(f"{path}: unexpected array shape {x.shape}")

    if rate != SAMPLE_RATE:
        if rate <= 0:
            raise UnreadableAudio(f"{path}: bad sample rate {rate}")
        g = math.gcd(SAMPLE_RATE, int(rate))
        x = resample_poly(x, SAMPLE_RATE // g, int(rate) // g).astype(np.float32)

    x = np.clip(x, -1.0, 1.0)
    return x, len(x) / SAMPLE_RATE


# --- transcripts -----------------------------------------------------------

_VTT_TIME = r"(?:(\d{1,2}):)?(\d{2}):(\d{2})\.(\d{3})"
_VTT_CUE = re.compile(rf"^\s*{_VTT_TIME}\s+-->\s+{_VTT_TIME}")


def _vtt_seconds(h, m, s, ms):
    return (int(h) if h else 0) * 3600 + int(m) * 60 + int(s) + int(ms) / 1000.0


def parse_transcript(path):
    """Parse word-JSON or WebVTT into a sorted, validated TimedWord list."""
    text = Path(path).read_text(encoding="utf-8-sig")
    stripped = text.lstrip()
    if stripped.startswith("WEBVTT"):
        words = _parse_vtt(text)
    else:
        words = _parse_word_json(text)
    words.sort(key=lambda w: (w.start_s, w.end_s))
    return words


def _parse_word_json(text):
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedTranscript(str(exc), line=exc.lineno) from exc
    if not isinstance(entries, list):
        raise MalformedTranscript("word-JSON root must be an array")
    words = []
    for i, entry in enumerate(entries):
        try:
            words.append(TimedWord(str(entry["w"]), float(entry["s"]), float(entry["e"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTranscript(f"entry {i}: {exc}") from exc
    return words


def _parse_vtt(text):
    words = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        match = _VTT_CUE.match(lines[i])
        if not match:
            i += 1
            continue
        lineno = i + 1
        start = _vtt_seconds(*match.groups()[:4])
        end = _vtt_seconds(*match.groups()[4:])
        if end <= start:
            raise MalformedTranscript(f"cue end {end} <= start {start}", line=lineno)
        i += 1
        cue_text = []
        while i < len(lines) and lines[i].strip():
            cue_text.append(lines[i])
            i += 1
        tokens = " ".join(cue_text).split()
        if tokens:
            dt = (end - start) / len(tokens)
            for k, token in enumerate(tokens):
                words.append(TimedWord(token, start + k * dt, start + (k + 1) * dt))
    return words


def words_to_json(words):
    """Serialize to the word-JSON wire format; parse_transcript round-trips it."""
    return json.dumps([{"w": w.text, "s": w.start_s, "e": w.end_s} for w in words])


# --- annotations -----------------------------------------------------------

def parse_annotations(path):
    """Parse a `start_s,end_s,label_name` CSV into sorted non-overlapping spans."""
    spans = []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not any(cell.strip() for cell in row):
                continue
            if i == 0 and not _is_number(row[0]):
                continue  # optional header row
            if len(row) < 3:
                raise MalformedAnnotation(f"row {i + 1}: expected start,end,label")
            try:
                start, end = float(row[0]), float(row[1])
            except ValueError as exc:
                raise MalformedAnnotation(f"row {i + 1}: {exc}") from exc
            if end <= start:
                raise MalformedAnnotation(f"row {i + 1}: end {end} <= start {start}")
            spans.append(AnnotationSpan(start, end, label_by_name(row[2])))
    spans.sort(key=lambda s: s.start_s)
    for prev, cur in zip(spans, spans[1:]):
        if cur.start_s < prev.end_s:
            raise OverlappingSpans(
                f"[{prev.start_s}, {prev.end_s}) overlaps [{cur.start_s}, {cur.end_s})"
            )
    return spans


def _is_number(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


# --- manifests -------------------------------------------------------------

@dataclass
class ManifestEntry:
    id: str
    audio_path: str
    transcript_path: str
    annotation_path: str | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class DatasetManifest:
    root: Path
    entries: list

    def resolve(self, rel):
        p = Path(rel)
        return p if p.is_absolute() else self.root / p


class RecordingStub:
    """Validated manifest entry; audio loads lazily on first .load()."""

    def __init__(self, entry, manifest, words, annotations):
        self.id = entry.id
        self.audio_path = manifest.resolve(entry.audio_path)
        self.words = words
        self.annotations = annotations
        self.meta = dict(entry.meta)

    def load(self):
        samples, duration = load_audio(self.audio_path)
        return Recording(
            id=self.id,
            samples=samples,
            duration_s=duration,
            words=self.words,
            annotations=self.annotations,
            meta=self.meta,
        ).validate()


def load_manifest(path):
    """Parse a manifest JSON {"root": path, "entries": [...]}."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        root = Path(doc.get("root", "."))
        if not root.is_absolute():
            root = path.parent / root
        entries = [
            ManifestEntry(
                id=str(e["id"]),
                audio_path=e["audio_path"],
                transcript_path=e["transcript_path"],
                annotation_path=e.get("annotation_path"),
                meta=e.get("meta", {}),
            )
            for e in doc["entries"]
        ]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise MalformedManifest(f"{path}: {exc}") from exc
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise MalformedManifest(f"{path}: duplicate recording ids {dupes}")
    return DatasetManifest(root=root, entries=entries)


def validate_manifest(manifest):
    """Check every referenced file exists and parses; return lazy stubs.

    All missing files are collected before raising so one pass reports the
    full set of offenders.
    """
    missing = []
    for entry in manifest.entries:
        for rel in filter(None, (entry.audio_path, entry.transcript_path, entry.annotation_path)):
            p = manifest.resolve(rel)
            if not p.exists():
                missing.append(p)
    if missing:
        raise MissingFile(missing)

    stubs = []
    for entry in manifest.entries:
        words = parse_transcript(manifest.resolve(entry.transcript_path))
        annotations = None
        if entry.annotation_path:
            annotations = parse_annotations(manifest.resolve(entry.annotation_path))
        stubs.append(RecordingStub(entry, manifest, words, annotations))
    return stubs
