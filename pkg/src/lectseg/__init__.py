"""lectseg: teaching-activity timelines for lecture recordings.

Classifies each second of a lecture (audio + transcript) into one of ten
teaching activities with a dual-BiLSTM fusion model and exports the result
as a navigable timeline.
"""

from .encoders import (
    FEATURE_STACK,
    ConvAudioEncoder,
    ConvLayerSpec,
    MockAudioEncoder,
    MockTextEncoder,
    conv_output_length,
)
from .errors import LectsegError
from .estimator import LectureActivityClassifier
from .framing import Frame, WindowSample, build_windows, make_frames
from .ingest import Recording, load_audio, parse_annotations, parse_transcript
from .model import ModelConfig, forward, init_params, predict
from .taxonomy import LABELS, audio_distinguishable, label_by_id, label_by_name
from .timeline import ActivityTimeline, export_json, export_webvtt, smooth, to_segments
from .training import TrainConfig, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "ActivityTimeline",
    "ConvAudioEncoder",
    "ConvLayerSpec",
    "FEATURE_STACK",
    "Frame",
    "LABELS",
    "LectsegError",
    "LectureActivityClassifier",
    "ModelConfig",
    "MockAudioEncoder",
    "MockTextEncoder",
    "Recording",
    "TrainConfig",
    "WindowSample",
    "audio_distinguishable",
    "build_windows",
    "conv_output_length",
    "export_json",
    "export_webvtt",
    "forward",
    "init_params",
    "label_by_id",
    "label_by_name",
    "load_audio",
    "load_checkpoint",
    "make_frames",
    "parse_annotations",
    "parse_transcript",
    "predict",
    "save_checkpoint",
    "smooth",
    "to_segments",
    "train",
]
