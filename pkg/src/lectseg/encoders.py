"""Per-frame embedding extractors.

Two modalities, two implementations each:

* text: a 1024-d sentence-level vector for the words of one frame, produced
  by a multilingual transformer's [CLS]-style output (pretrained path) or by
  a deterministic hash of the word list (mock path);
* audio: a (49, 512) latent matrix for one second of 16 kHz audio, produced
  by a stack of seven 1-d convolutions (pretrained or seeded-random weights)
  or by hashing 49 strided sample windows (mock path).

Mocks exist so the full pipeline and test suite run without any downloaded
weights. Both mock encoders are pure functions of (seed, content).
"""

import hashlib
import re
from dataclasses import dataclass

import numpy as np

from .errors import BadSampleCount, InputTooShort, ShapeMismatch, WeightsUnavailable
from .ingest import SAMPLE_RATE

TEXT_DIM = 1024
AUDIO_STEPS = 49
AUDIO_DIM = 512


@dataclass(frozen=True)
class ConvLayerSpec:
    channels: int
    kernel: int
    stride: int

    def __post_init__(self):
        if not self.kernel >= self.stride >= 1:
            raise ValueError(f"need kernel >= stride >= 1, got {self}")


# Seven conv layers: kernels (10,3,3,3,3,2,2), strides (5,2,2,2,2,2,2).
# 16000 samples -> 3199 -> 1599 -> 799 -> 399 -> 199 -> 99 -> 49 steps.
FEATURE_STACK = (
    ConvLayerSpec(512, 10, 5),
    ConvLayerSpec(512, 3, 2),
    ConvLayerSpec(512, 3, 2),
    ConvLayerSpec(512, 3, 2),
    ConvLayerSpec(512, 3, 2),
    ConvLayerSpec(512, 2, 2),
    ConvLayerSpec(512, 2, 2),
)

# Composite geometry of FEATURE_STACK: each output step sees 400 samples,
# consecutive steps are 320 samples apart. The mock mirrors this so it is
# shift-invariant on constant input.
_RECEPTIVE_FIELD = 400
_HOP = 320


def conv_output_length(input_len, stack=FEATURE_STACK):
    """Fold L <- floor((L - kernel)/stride) + 1 over the stack."""
    length = int(input_len)
    for spec in stack:
        if length < spec.kernel:
            raise InputTooShort(
                f"length {length} < kernel {spec.kernel} in layer {spec}"
            )
        length = (length - spec.kernel) // spec.stride + 1
    return length


def _standardize_rows(matrix):
    mean = matrix.mean(axis=1, keepdims=True)
    std = matrix.std(axis=1, keepdims=True)
    return (matrix - mean) / (std + 1e-5)


def _hash_rng(*parts):
    digest = hashlib.blake2b("\x1f".join(str(p) for p in parts).encode(), digest_size=16)
    return np.random.default_rng(int.from_bytes(digest.digest(), "little"))


# --- mock encoders ----------------------------------------------------------

CLASS_TOKEN = re.compile(r"^__class_(\d+)__$")


def class_token(k):
    """Designated word that makes the mock text encoder emit cluster k."""
    return f"__class_{k}__"


class MockTextEncoder:
    """Deterministic hash-of-content stand-in for the sentence encoder.

    Equal word lists map to equal vectors. Word lists led by a class token
    (`__class_k__`) land in linearly separable clusters: a fixed direction
    per k plus small content noise.
    """

    dim = TEXT_DIM

    def __init__(self, seed=0):
        self.seed = int(seed)

    @property
    def fingerprint(self):
        return f"mock-text-{self.seed}"

    def _class_direction(self, k):
        v = _hash_rng(self.seed, "class-direction", k).standard_normal(self.dim)
        return v / np.linalg.norm(v)

    def embed(self, words):
        if not words:
            return np.zeros(self.dim, dtype=np.float32)
        noise = _hash_rng(self.seed, "text", "\x1f".join(words)).standard_normal(self.dim)
        match = CLASS_TOKEN.match(words[0])
        if match:
            vec = 4.0 * self._class_direction(int(match.group(1))) + 0.05 * noise
        else:
            vec = noise
        return vec.astype(np.float32)


class MockAudioEncoder:
    """Deterministic hash-of-content stand-in for the conv feature extractor.

    Each of the 49 latent steps hashes the 400-sample window that the real
    stack would see at that step, so constant input yields identical rows.
    Rows are standardized, mirroring the extractor's built-in normalization.
    """

    def __init__(self, seed=0):
        self.seed = int(seed)

    @property
    def fingerprint(self):
        return f"mock-audio-{self.seed}"

    def extract(self, samples):
        samples = _check_one_second(samples)
        rows = np.empty((AUDIO_STEPS, AUDIO_DIM))
        for i in range(AUDIO_STEPS):
            window = samples[i * _HOP : i * _HOP + _RECEPTIVE_FIELD]
            rng = _hash_rng(self.seed, "audio", window.tobytes().hex())
            rows[i] = rng.standard_normal(AUDIO_DIM)
        return _standardize_rows(rows).astype(np.float32)


# --- conv-stack encoder -----------------------------------------------------

class ConvAudioEncoder:
    """The seven-convolution latent extractor, as an actual network.

    weights="random" draws seeded weights (shape-faithful but untrained,
    enough for structural tests); weights=<path or model name> loads a
    pretrained extractor and raises WeightsUnavailable when it cannot.
    """

    def __init__(self, weights="random", seed=0, stack=FEATURE_STACK):
        import torch
        from torch import nn

        self.stack = tuple(stack)
        self.seed = int(seed)
        self.weights = weights
        layers = []
        in_channels = 1
        for i, spec in enumerate(self.stack):
            layers.append(
                nn.Conv1d(in_channels, spec.channels, spec.kernel, spec.stride, bias=False)
            )
            if i == 0:
                layers.append(nn.GroupNorm(spec.channels, spec.channels))
            layers.append(nn.GELU())
            in_channels = spec.channels
        self._net = nn.Sequential(*layers)
        if weights == "random":
            gen = torch.Generator().manual_seed(self.seed)
            with torch.no_grad():
                for p in self._net.parameters():
                    p.copy_(torch.empty_like(p).normal_(0.0, 0.05, generator=gen))
        else:
            self._load_pretrained(weights)
        self._net.eval()

    def _load_pretrained(self, source):
        import torch

        try:
            state = torch.load(source, map_location="cpu", weights_only=True)
            self._net.load_state_dict(state)
        except Exception as exc:
            raise WeightsUnavailable(
                f"cannot load conv extractor weights from {source!r}: {exc}"
            ) from exc

    @property
    def fingerprint(self):
        if self.weights == "random":
            return f"conv-random-{self.seed}"
        return f"conv-pretrained-{self.weights}"

    def extract(self, samples):
        import torch

        samples = _check_one_second(samples)
        with torch.no_grad():
            x = torch.from_numpy(samples).reshape(1, 1, -1)
            out = self._net(x)[0].T.numpy()  # (steps, channels)
        return _standardize_rows(out.astype(np.float64)).astype(np.float32)


class PretrainedTextEncoder:
    """Multilingual transformer sentence embeddings via the [CLS] output.

    Requires the `transformers` package and locally available weights; tests
    never rely on this path.
    """

    dim = TEXT_DIM

    def __init__(self, model_name="xlm-roberta-large"):
        self.model_name = model_name
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise WeightsUnavailable("transformers is not installed") from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_name)
            self._model = AutoModel.from_pretrained(model_name)
        except Exception as exc:
            raise WeightsUnavailable(
                f"cannot load text encoder {model_name!r}: {exc}"
            ) from exc
        self._model.eval()

    @property
    def fingerprint(self):
        return f"hf-text-{self.model_name}"

    def embed(self, words):
        import torch

        if not words:
            return np.zeros(self.dim, dtype=np.float32)
        batch = self._tokenizer(" ".join(words), return_tensors="pt", truncation=True)
        with torch.no_grad():
            hidden = self._model(**batch).last_hidden_state
        vec = hidden[0, 0].numpy().astype(np.float32)
        if vec.shape != (self.dim,):
            raise ShapeMismatch(f"text encoder emitted {vec.shape}, want ({self.dim},)")
        return vec


# --- contract wrappers ------------------------------------------------------

def _check_one_second(samples):
    samples = np.asarray(samples, dtype=np.float32)
    if samples.ndim != 1 or len(samples) != SAMPLE_RATE:
        raise BadSampleCount(f"need exactly {SAMPLE_RATE} samples, got {samples.shape}")
    return samples


def embed_text(encoder, words):
    """One 1024-d vector for a frame's words; empty word list -> zero vector."""
    vec = encoder.embed(list(words))
    vec = np.asarray(vec, dtype=np.float32)
    if vec.shape != (TEXT_DIM,):
        raise ShapeMismatch(f"text embedding shape {vec.shape}, want ({TEXT_DIM},)")
    return vec


def extract_audio_features(encoder, samples):
    """The (49, 512) latent matrix for exactly one second of canonical audio."""
    out = np.asarray(encoder.extract(samples), dtype=np.float32)
    if out.shape != (AUDIO_STEPS, AUDIO_DIM):
        raise ShapeMismatch(
            f"audio embedding shape {out.shape}, want ({AUDIO_STEPS}, {AUDIO_DIM})"
        )
    return out
