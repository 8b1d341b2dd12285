"""Input validation helpers for the estimator-facing API."""

import numpy as np

from .errors import ShapeMismatch
from .framing import WindowSample
from .taxonomy import N_CLASSES, label_by_id


def check_windows(X, require_gold=False):
    """Validate a window list: type, consistent N, embeddings present."""
    X = list(X)
    if not X:
        raise ValueError("X must hold at least one window")
    n_context = X[0].n_context if isinstance(X[0], WindowSample) else None
    for i, w in enumerate(X):
        if not isinstance(w, WindowSample):
            raise TypeError(f"X[{i}] is {type(w).__name__}, expected WindowSample")
        if w.n_context != n_context:
            raise ShapeMismatch(f"X[{i}] has N={w.n_context}, X[0] has N={n_context}")
        for f in w.frames():
            if f.text_emb is None or f.audio_emb is None:
                raise ShapeMismatch(f"X[{i}] frame t={f.t} is missing embeddings")
        if require_gold and w.gold is None:
            raise ValueError(f"X[{i}] has no gold label; pass y or label the windows")
    return X


def check_labels(y, n):
    """Validate/normalize a label-id vector of length n."""
    y = np.asarray(y)
    if y.shape != (n,):
        raise ShapeMismatch(f"y has shape {y.shape}, expected ({n},)")
    if not np.issubdtype(y.dtype, np.integer):
        raise TypeError("y must hold integer label ids")
    if y.min() < 0 or y.max() >= N_CLASSES:
        raise ValueError(f"label ids must be in [0, {N_CLASSES})")
    return [label_by_id(int(v)) for v in y]
