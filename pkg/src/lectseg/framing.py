"""One-second framing and model input windows.

A frame covers [t, t+1) seconds. A word belongs to every frame its interval
intersects, so words straddling a frame boundary are repeated: they close one
frame and open the next. A frame's gold label is the label of the annotation
span containing the frame midpoint t+0.5.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .ingest import SAMPLE_RATE


@dataclass
class Frame:
    t: int  # seconds from recording start
    words: list = field(default_factory=list)
    text_emb: np.ndarray | None = None  # (1024,)
    audio_emb: np.ndarray | None = None  # (49, 512)
    gold: object | None = None  # ActivityLabel


@dataclass
class WindowSample:
    center: Frame
    context_before: list  # exactly N frames, edge-replicated
    context_after: list
    n_context: int

    def frames(self):
        return [*self.context_before, self.center, *self.context_after]

    @property
    def gold(self):
        return self.center.gold


def make_frames(recording):
    """Slice a recording into ceil(duration) one-second frames.

    Word assignment: [w.start_s, w.end_s) intersects [t, t+1). Gold label by
    span containment of the frame midpoint; frames outside every span stay
    unlabeled.
    """
    n = math.ceil(recording.duration_s)
    frames = [Frame(t=t) for t in range(n)]
    for word in recording.words:
        first = max(0, math.floor(word.start_s))
        last = min(n - 1, math.ceil(word.end_s) - 1)
        for t in range(first, last + 1):
            if word.start_s < t + 1 and word.end_s > t:
                frames[t].words.append(word.text)
    if recording.annotations:
        for frame in frames:
            mid = frame.t + 0.5
            for span in recording.annotations:
                if span.start_s <= mid < span.end_s:
                    frame.gold = span.label
                    break
    return frames


def frame_samples(recording, t):
    """The frame's 16000 audio samples, zero-padded at the recording tail."""
    chunk = recording.samples[t * SAMPLE_RATE : (t + 1) * SAMPLE_RATE]
    if len(chunk) < SAMPLE_RATE:
        chunk = np.pad(chunk, (0, SAMPLE_RATE - len(chunk)))
    return chunk


def build_windows(frames, n_context):
    """One window per frame; positions past either end replicate the edge frame."""
    if n_context < 0:
        raise ValueError("n_context must be >= 0")
    n = len(frames)
    windows = []
    for i in range(n):
        before = [frames[max(0, j)] for j in range(i - n_context, i)]
        after = [frames[min(n - 1, j)] for j in range(i + 1, i + 1 + n_context)]
        windows.append(WindowSample(frames[i], before, after, n_context))
    return windows


def detect_silence(samples, threshold_rms, min_dur_s=2.0):
    """Maximal intervals whose 50 ms RMS stays below threshold_rms.

    Pre-annotation aid for spotting pauses (lecturer silent for a stretch).
    Intervals shorter than min_dur_s are dropped. Returns [(start_s, end_s)].
    """
    hop = SAMPLE_RATE // 20  # 50 ms
    x = np.asarray(samples, dtype=np.float64)
    duration = len(x) / SAMPLE_RATE
    n_blocks = math.ceil(len(x) / hop)
    quiet = []
    for b in range(n_blocks):
        block = x[b * hop : (b + 1) * hop]
        quiet.append(np.sqrt(np.mean(block * block)) < threshold_rms)

    intervals = []
    start = None
    for b, q in enumerate([*quiet, False]):
        if q and start is None:
            start = b
        elif not q and start is not None:
            t0 = start * hop / SAMPLE_RATE
            t1 = min(b * hop / SAMPLE_RATE, duration)
            if t1 - t0 >= min_dur_s:
                intervals.append((t0, t1))
            start = None
    return intervals


def frames_to_jsonl(frames):
    """JSON-lines debug dump {t, words, gold}; one line per frame."""
    lines = []
    for frame in frames:
        lines.append(
            json.dumps(
                {
                    "t": frame.t,
                    "words": frame.words,
                    "gold": frame.gold.name if frame.gold else None,
                }
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
