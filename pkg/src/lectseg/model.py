"""The fusion classifier.

Per window of 2N+1 frames: the standardized text embeddings feed a BiLSTM,
the audio latent steps (already normalized by their extractor) feed a second
BiLSTM. Each path is summarized by the final forward/backward hidden states,
standardized, concatenated, pushed through a Gelu layer (standardized again)
and a softmax output over the 10 activities.

"Normalize" is realized everywhere as per-vector standardization over the
feature dimension: subtract mean, divide by (std + 1e-5), no learned affine.
"""

import copy
import hashlib
import re
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from .errors import ShapeMismatch
from .taxonomy import N_CLASSES

LOSS_EPS = 1e-12
_FORGET_BIAS = re.compile(r"lstm\.bias_ih_l0(_reverse)?$")


@dataclass(frozen=True)
class ModelConfig:
    lstm_units: int = 512
    head_units: int = 2048
    n_classes: int = N_CLASSES
    n_context: int = 15  # frames of context on each side
    text_dim: int = 1024
    audio_dim: int = 512
    audio_steps_per_frame: int = 49

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name != "n_context" and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.n_context < 0:
            raise ValueError("n_context must be >= 0")

    @property
    def window_len(self):
        return 2 * self.n_context + 1

    @property
    def audio_seq_len(self):
        return self.window_len * self.audio_steps_per_frame

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def standardize(x, dim=-1):
    """Zero-mean, unit-ish-std over `dim`; parameter-free."""
    mean = x.mean(dim=dim, keepdim=True)
    std = x.std(dim=dim, keepdim=True, unbiased=False)
    return (x - mean) / (std + 1e-5)


class FusionClassifier(nn.Module):
    def __init__(self, config):
        super().__init__()
        self.config = config
        u = config.lstm_units
        self.text_lstm = nn.LSTM(config.text_dim, u, batch_first=True, bidirectional=True)
        self.audio_lstm = nn.LSTM(config.audio_dim, u, batch_first=True, bidirectional=True)
        self.head = nn.Linear(4 * u, config.head_units)
        self.out = nn.Linear(config.head_units, config.n_classes)

    @staticmethod
    def _summary(lstm, x):
        _, (h_n, _) = lstm(x)
        # h_n: (2, batch, units) -> concat forward and backward final states
        return torch.cat([h_n[0], h_n[1]], dim=1)

    def forward(self, text, audio):
        """text: (B, 2N+1, text_dim); audio: (B, (2N+1)*steps, audio_dim) -> (B, C) probabilities."""
        text_summary = standardize(self._summary(self.text_lstm, standardize(text)))
        audio_summary = standardize(self._summary(self.audio_lstm, audio))
        fused = torch.cat([text_summary, audio_summary], dim=1)
        hidden = standardize(nn.functional.gelu(self.head(fused)))
        return torch.softmax(self.out(hidden), dim=1)


class ModelParams:
    """Weights plus their config; immutable during inference."""

    def __init__(self, config, seed, module, epoch=-1, metrics=None):
        self.config = config
        self.seed = seed
        self.module = module
        self.epoch = epoch
        self.metrics = dict(metrics or {})

    def parameter_names(self):
        return [name for name, _ in self.module.named_parameters()]

    def to_blob(self):
        """Parameters in declaration order, row-major binary32 little-endian."""
        chunks = [
            p.detach().cpu().numpy().astype("<f4").tobytes()
            for _, p in self.module.named_parameters()
        ]
        return b"".join(chunks)

    def load_blob(self, blob):
        offset = 0
        with torch.no_grad():
            for _, p in self.module.named_parameters():
                n = p.numel() * 4
                arr = np.frombuffer(blob[offset : offset + n], dtype="<f4")
                if arr.size != p.numel():
                    raise ShapeMismatch("checkpoint blob shorter than parameter set")
                p.copy_(torch.from_numpy(arr.reshape(tuple(p.shape)).copy()))
                offset += n
        if offset != len(blob):
            raise ShapeMismatch("checkpoint blob longer than parameter set")
        return self

    @property
    def fingerprint(self):
        digest = hashlib.sha256(self.to_blob()).hexdigest()[:12]
        return f"lectseg-{digest}"

    def clone(self):
        return ModelParams(
            self.config, self.seed, copy.deepcopy(self.module), self.epoch, self.metrics
        )


def init_params(config, seed):
    """Fresh parameters: Xavier-uniform weights, forget-gate biases 1, other biases 0."""
    module = FusionClassifier(config)
    gen = torch.Generator().manual_seed(int(seed))
    with torch.no_grad():
        for name, p in module.named_parameters():
            if p.dim() >= 2:
                bound = float(np.sqrt(6.0 / (p.shape[0] + p.shape[1])))
                p.uniform_(-bound, bound, generator=gen)
            else:
                p.zero_()
                if _FORGET_BIAS.search(name):
                    u = config.lstm_units
                    p[u : 2 * u] = 1.0
    return ModelParams(config, int(seed), module)


def window_tensors(config, windows, dtype=torch.float32):
    """Stack WindowSamples into (text, audio) batch tensors, checking shapes."""
    texts, audios = [], []
    for w in windows:
        if w.n_context != config.n_context:
            raise ShapeMismatch(
                f"window N={w.n_context} but model expects N={config.n_context}"
            )
        frames = w.frames()
        for f in frames:
            if f.text_emb is None or f.audio_emb is None:
                raise ShapeMismatch(f"frame t={f.t} is missing embeddings")
            if f.text_emb.shape != (config.text_dim,):
                raise ShapeMismatch(
                    f"text embedding shape {f.text_emb.shape}, want ({config.text_dim},)"
                )
            if f.audio_emb.shape != (config.audio_steps_per_frame, config.audio_dim):
                raise ShapeMismatch(
                    f"audio embedding shape {f.audio_emb.shape}, want "
                    f"({config.audio_steps_per_frame}, {config.audio_dim})"
                )
        texts.append(np.stack([f.text_emb for f in frames]))
        audios.append(np.concatenate([f.audio_emb for f in frames], axis=0))
    text = torch.as_tensor(np.stack(texts), dtype=dtype)
    audio = torch.as_tensor(np.stack(audios), dtype=dtype)
    return text, audio


def forward_batch(params, windows):
    """Inference-mode probabilities, one row per window."""
    if not windows:
        return np.zeros((0, params.config.n_classes), dtype=np.float32)
    dtype = next(params.module.parameters()).dtype
    text, audio = window_tensors(params.config, windows, dtype=dtype)
    params.module.eval()
    with torch.no_grad():
        probs = params.module(text, audio)
    return probs.cpu().numpy()


def forward(params, window):
    """Probability vector over the activity classes for one window."""
    return forward_batch(params, [window])[0]


def weighted_nll_loss(probs, gold, class_weights):
    """-w[gold] * log(p[gold] + eps); a zero weight silences the sample."""
    w = float(class_weights[gold])
    if w == 0.0:
        return 0.0
    return float(-w * np.log(float(probs[gold]) + LOSS_EPS))


def predict(params, window):
    """(label id, confidence); ties go to the lowest label id."""
    probs = forward(params, window)
    idx = int(np.argmax(probs))
    return idx, float(probs[idx])
