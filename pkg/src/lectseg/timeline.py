"""From per-frame predictions to a navigable activity timeline.

One-second predictions flicker, so the pipeline smooths them with a sliding
mode filter, run-length encodes, absorbs short runs into their longer
neighbor and exports the result as JSON or WebVTT chapter cues. Segments
cover the recording exactly, with no gaps or overlaps.
"""

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvenWindow, LengthMismatch
from .framing import build_windows
from .model import forward_batch
from .taxonomy import label_by_id, label_by_name, taxonomy_map


@dataclass
class ActivitySegment:
    start_s: float
    end_s: float
    label: object  # ActivityLabel
    mean_confidence: float

    def __post_init__(self):
        if self.end_s <= self.start_s:
            raise ValueError(f"bad segment [{self.start_s}, {self.end_s})")


@dataclass
class ActivityTimeline:
    recording_id: str
    segments: list
    model_fingerprint: str = ""


def predict_frames(params, frames, batch_size=64):
    """One (label id, confidence) per frame, via windows of the model's N."""
    if not frames:
        return []
    windows = build_windows(frames, params.config.n_context)
    out = []
    for i in range(0, len(windows), batch_size):
        probs = forward_batch(params, windows[i : i + batch_size])
        for row in probs:
            idx = int(np.argmax(row))
            out.append((idx, float(row[idx])))
    return out


def smooth(labels, window):
    """Sliding mode filter with edge replication; ties keep the original label."""
    if window < 1 or window % 2 == 0:
        raise EvenWindow(f"smoothing window must be odd and >= 1, got {window}")
    if window == 1 or not labels:
        return list(labels)
    half = window // 2
    padded = [labels[0]] * half + list(labels) + [labels[-1]] * half
    out = []
    for i, original in enumerate(labels):
        votes = {}
        for lab in padded[i : i + window]:
            votes[lab] = votes.get(lab, 0) + 1
        top = max(votes.values())
        winners = [lab for lab, v in votes.items() if v == top]
        out.append(winners[0] if len(winners) == 1 else original)
    return out


def to_segments(
    labels,
    confidences,
    min_dur_s=3.0,
    recording_id="",
    model_fingerprint="",
    duration_s=None,
):
    """Run-length encode and absorb runs shorter than min_dur_s.

    Absorption raises its threshold one second at a time, so a larger
    min_dur_s always continues from the smaller one's result and the segment
    count is monotonically non-increasing in min_dur_s. Within a threshold
    the shortest run goes first (earliest on ties) and melts into its longer
    neighbor (earlier neighbor on ties). Confidences are averaged over the
    frames each final segment covers.
    """
    if not labels:
        raise ValueError("need at least one frame label")
    if len(labels) != len(confidences):
        raise LengthMismatch(f"{len(labels)} labels vs {len(confidences)} confidences")

    runs = []  # [start, end) frame index ranges with one label each
    for i, lab in enumerate(labels):
        if runs and runs[-1][2] == lab:
            runs[-1][1] = i + 1
        else:
            runs.append([i, i + 1, lab])

    for threshold in range(1, math.ceil(min_dur_s) + 1):
        while len(runs) > 1:
            lengths = [end - start for start, end, _ in runs]
            short = min(range(len(runs)), key=lambda i: (lengths[i], i))
            if lengths[short] >= threshold:
                break
            if short == 0:
                into = 1
            elif short == len(runs) - 1:
                into = short - 1
            else:
                left, right = lengths[short - 1], lengths[short + 1]
                into = short - 1 if left >= right else short + 1
            lo, hi = min(short, into), max(short, into)
            runs[lo] = [runs[lo][0], runs[hi][1], runs[into][2]]
            del runs[hi]
            # re-merge equal-label neighbors created by the absorption
            merged = [runs[0]]
            for run in runs[1:]:
                if run[2] == merged[-1][2]:
                    merged[-1][1] = run[1]
                else:
                    merged.append(run)
            runs = merged

    segments = []
    last = len(labels)
    for start, end, lab in runs:
        end_s = float(end)
        if duration_s is not None and end == last:
            end_s = float(duration_s)
        segments.append(
            ActivitySegment(
                start_s=float(start),
                end_s=end_s,
                label=label_by_id(lab),
                mean_confidence=float(np.mean(confidences[start:end])),
            )
        )
    return ActivityTimeline(recording_id, segments, model_fingerprint)


# --- export ------------------------------------------------------------------

def export_json(timeline):
    doc = {
        "recording_id": timeline.recording_id,
        "model_fingerprint": timeline.model_fingerprint,
        "taxonomy": {str(i): name for i, name in taxonomy_map().items()},
        "segments": [
            {
                "start_s": seg.start_s,
                "end_s": seg.end_s,
                "label": seg.label.name,
                "confidence": seg.mean_confidence,
            }
            for seg in timeline.segments
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def import_json(document):
    doc = json.loads(document)
    segments = [
        ActivitySegment(
            start_s=float(seg["start_s"]),
            end_s=float(seg["end_s"]),
            label=label_by_name(seg["label"]),
            mean_confidence=float(seg["confidence"]),
        )
        for seg in doc["segments"]
    ]
    return ActivityTimeline(doc["recording_id"], segments, doc.get("model_fingerprint", ""))


def _vtt_timestamp(seconds):
    ms = int(round(seconds * 1000))
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d}.{ms:03d}"


def export_webvtt(timeline):
    """Chapter cues, one per segment, label name as cue text."""
    parts = ["WEBVTT", ""]
    for i, seg in enumerate(timeline.segments, start=1):
        parts.append(str(i))
        parts.append(f"{_vtt_timestamp(seg.start_s)} --> {_vtt_timestamp(seg.end_s)}")
        parts.append(seg.label.name)
        parts.append("")
    return "\n".join(parts)


_VTT_LINE = re.compile(
    r"^(\d{2,}):(\d{2}):(\d{2})\.(\d{3}) --> (\d{2,}):(\d{2}):(\d{2})\.(\d{3})$"
)


def parse_webvtt(document, recording_id=""):
    """Inverse of export_webvtt up to the confidences VTT cannot carry."""
    segments = []
    lines = document.splitlines()
    for i, line in enumerate(lines):
        m = _VTT_LINE.match(line.strip())
        if not m:
            continue
        g = [int(x) for x in m.groups()]
        start = g[0] * 3600 + g[1] * 60 + g[2] + g[3] / 1000
        end = g[4] * 3600 + g[5] * 60 + g[6] + g[7] / 1000
        label = label_by_name(lines[i + 1].strip())
        segments.append(ActivitySegment(start, end, label, 0.0))
    return ActivityTimeline(recording_id, segments)
