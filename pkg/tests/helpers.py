import numpy as np
import torch
from scipy.io import wavfile

from lectseg.encoders import (
    MockAudioEncoder,
    MockTextEncoder,
    class_token,
    embed_text,
    extract_audio_features,
)
from lectseg.framing import Frame, build_windows
from lectseg.model import LOSS_EPS, ModelConfig, init_params, window_tensors
from lectseg.taxonomy import label_by_id


def write_wav(path, duration_s, rate=16000, channels=1, amplitude=0.3, freq=440.0, silent_spans=()):
    n = int(round(duration_s * rate))
    t = np.arange(n) / rate
    x = amplitude * np.sin(2 * np.pi * freq * t)
    for s0, s1 in silent_spans:
        x[int(s0 * rate) : int(s1 * rate)] = 0.0
    if channels == 2:
        x = np.stack([x, x], axis=1)
    wavfile.write(path, rate, (x * 32767).astype(np.int16))
    return path


TINY_CONFIG = ModelConfig(
    lstm_units=4,
    head_units=8,
    n_classes=3,
    n_context=1,
    text_dim=6,
    audio_dim=4,
    audio_steps_per_frame=5,
)


def make_window(config, seed=0, gold_id=None):
    """A single window with random embeddings matching `config`."""
    rng = np.random.default_rng(seed)
    frames = []
    for t in range(2 * config.n_context + 1):
        frame = Frame(t=t, words=[f"w{t}"])
        frame.text_emb = rng.standard_normal(config.text_dim).astype(np.float32)
        frame.audio_emb = rng.standard_normal(
            (config.audio_steps_per_frame, config.audio_dim)
        ).astype(np.float32)
        if gold_id is not None:
            frame.gold = label_by_id(gold_id)
        frames.append(frame)
    return build_windows(frames, config.n_context)[config.n_context]


def finite_difference_gradients(module, loss_fn, h=1e-5):
    """Central finite differences of loss_fn over every parameter scalar.

    Independent of autograd: perturbs raw parameter storage and re-evaluates.
    """
    grads = []
    with torch.no_grad():
        for p in module.parameters():
            flat = p.view(-1)
            g = torch.zeros_like(flat)
            for i in range(flat.numel()):
                orig = float(flat[i])
                flat[i] = orig + h
                f_plus = loss_fn()
                flat[i] = orig - h
                f_minus = loss_fn()
                flat[i] = orig
                g[i] = (f_plus - f_minus) / (2.0 * h)
            grads.append(g.view(p.shape))
    return grads


def run_gradient_check(seed=0, h=1e-5):
    """Max relative error between autograd and central differences on the
    tiny 3-class config, in float64. Returns (max_rel_err, n_params)."""
    config = TINY_CONFIG
    params = init_params(config, seed)
    module = params.module.double()
    window = make_window(config, seed=seed + 1)
    text, audio = window_tensors(config, [window], dtype=torch.float64)
    weights = torch.tensor([1.0, 2.0, 0.5], dtype=torch.float64)
    gold = 1

    def loss_value():
        probs = module(text, audio)
        return float(-weights[gold] * torch.log(probs[0, gold] + LOSS_EPS))

    module.zero_grad()
    probs = module(text, audio)
    loss = -weights[gold] * torch.log(probs[0, gold] + LOSS_EPS)
    loss.backward()
    analytic = [p.grad.detach().clone() for p in module.parameters()]

    numeric = finite_difference_gradients(module, loss_value, h=h)
    max_err = 0.0
    n = 0
    for a, f in zip(analytic, numeric):
        denom = torch.clamp(torch.maximum(a.abs(), f.abs()), min=1e-3)
        max_err = max(max_err, float(((a - f).abs() / denom).max()))
        n += a.numel()
    return max_err, n


def build_separable_windows(frames_per_class, class_ids, n_context, seed=0):
    """One run of class-token frames per class, embedded with the mocks.

    The mock text encoder puts class-token word lists into linearly separable
    clusters, so a working training loop must overfit this easily. Each class
    run is treated as its own recording: windows never mix classes.
    """
    text_enc = MockTextEncoder(seed)
    audio_enc = MockAudioEncoder(seed)
    rng = np.random.default_rng(seed)
    windows = []
    uid = 0
    for k in class_ids:
        frames = []
        for t in range(frames_per_class):
            frame = Frame(t=t, words=[class_token(k), f"w{uid}"], gold=label_by_id(k))
            frame.text_emb = embed_text(text_enc, frame.words)
            samples = rng.uniform(-0.1, 0.1, 16000).astype(np.float32)
            frame.audio_emb = extract_audio_features(audio_enc, samples)
            frames.append(frame)
            uid += 1
        windows.extend(build_windows(frames, n_context))
    return windows
