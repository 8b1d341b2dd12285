"""Glue between ingestion, encoders, the model and the timeline exporters."""

from .encoders import (
    ConvAudioEncoder,
    MockAudioEncoder,
    MockTextEncoder,
    PretrainedTextEncoder,
    embed_text,
    extract_audio_features,
)
from .errors import CacheMiss
from .framing import build_windows, frame_samples, make_frames
from .timeline import predict_frames, smooth, to_segments


def make_encoders(kind="mock", seed=0, text_model="xlm-roberta-large", audio_weights=None):
    """Encoder pair by kind: 'mock', 'conv-random' (real convs, seeded
    weights, mock text) or 'pretrained'."""
    if kind == "mock":
        return MockTextEncoder(seed), MockAudioEncoder(seed)
    if kind == "conv-random":
        return MockTextEncoder(seed), ConvAudioEncoder("random", seed)
    if kind == "pretrained":
        audio = ConvAudioEncoder(audio_weights) if audio_weights else ConvAudioEncoder("random", seed)
        return PretrainedTextEncoder(text_model), audio
    raise ValueError(f"unknown encoder kind {kind!r}")


def embed_frames(recording, frames, text_encoder, audio_encoder, cache=None):
    """Fill text_emb/audio_emb on every frame, via the cache when given."""
    for frame in frames:
        text_key = (recording.id, frame.t, "text", text_encoder.fingerprint)
        audio_key = (recording.id, frame.t, "audio", audio_encoder.fingerprint)
        frame.text_emb = _cached(cache, text_key, lambda: embed_text(text_encoder, frame.words))
        frame.audio_emb = _cached(
            cache,
            audio_key,
            lambda: extract_audio_features(audio_encoder, frame_samples(recording, frame.t)),
        )
    return frames


def _cached(cache, key, compute):
    if cache is None:
        return compute()
    try:
        return cache.get(key)
    except CacheMiss:
        value = compute()
        cache.put(key, value)
        return value


def embedded_frames(stub_or_recording, text_encoder, audio_encoder, cache=None):
    recording = (
        stub_or_recording.load() if hasattr(stub_or_recording, "load") else stub_or_recording
    )
    frames = make_frames(recording)
    embed_frames(recording, frames, text_encoder, audio_encoder, cache)
    return recording, frames


def labeled_windows(stubs, n_context, text_encoder, audio_encoder, cache=None):
    """Gold-labeled windows across recordings; context never crosses a recording."""
    windows = []
    for stub in stubs:
        _, frames = embedded_frames(stub, text_encoder, audio_encoder, cache)
        for window in build_windows(frames, n_context):
            if window.gold is not None:
                windows.append(window)
    return windows


def infer_timeline(
    params,
    recording,
    text_encoder,
    audio_encoder,
    cache=None,
    smooth_window=5,
    min_segment_s=3.0,
):
    """recording -> smoothed, minimum-duration activity timeline."""
    frames = make_frames(recording)
    embed_frames(recording, frames, text_encoder, audio_encoder, cache)
    preds = predict_frames(params, frames)
    labels = smooth([p[0] for p in preds], smooth_window)
    confidences = [p[1] for p in preds]
    return to_segments(
        labels,
        confidences,
        min_dur_s=min_segment_s,
        recording_id=recording.id,
        model_fingerprint=params.fingerprint,
        duration_s=recording.duration_s,
    )
