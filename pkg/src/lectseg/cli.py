"""Command-line pipeline driver.

Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
"""

import argparse
import json
import sys
from pathlib import Path

from .cache import EmbeddingCache
from .errors import LectsegError
from .evaluation import (
    confusion,
    confusion_to_csv,
    metrics_to_json,
    per_class_metrics,
    render_metrics_table,
)
from .framing import frames_to_jsonl, make_frames
from .ingest import load_manifest, validate_manifest
from .model import ModelConfig
from .pipeline import embedded_frames, infer_timeline, labeled_windows, make_encoders
from .timeline import export_json, export_webvtt, import_json, predict_frames
from .training import (
    TrainConfig,
    load_checkpoint,
    save_checkpoint,
    stratified_split,
    train,
)


def _encoder_args(parser):
    parser.add_argument("--encoder", default="mock", choices=["mock", "conv-random", "pretrained"])
    parser.add_argument("--encoder-seed", type=int, default=0)
    parser.add_argument("--text-model", default="xlm-roberta-large")
    parser.add_argument("--audio-weights", default=None)
    parser.add_argument("--cache-dir", default=None)


def _build_parser():
    parser = argparse.ArgumentParser(prog="lectseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dump-frames", default=None, help="write per-recording frame JSONL here")

    p = sub.add_parser("embed", help="materialize the embedding cache")
    p.add_argument("--manifest", required=True)
    _encoder_args(p)

    p = sub.add_parser("train", help="train a classifier")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--train-config", default=None, help="train.json overriding defaults")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--max-lr", type=float, default=None)
    p.add_argument("--eval-fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-context", type=int, default=15)
    p.add_argument("--lstm-units", type=int, default=512)
    p.add_argument("--head-units", type=int, default=2048)
    _encoder_args(p)

    p = sub.add_parser("eval", help="per-class metrics for a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", default=None, help="write report.json and confusion CSVs here")
    _encoder_args(p)

    p = sub.add_parser("infer", help="write activity timelines")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--smooth-window", type=int, default=5)
    p.add_argument("--min-segment", type=float, default=3.0)
    _encoder_args(p)

    p = sub.add_parser("export", help="convert a .timeline.json to WebVTT chapters")
    p.add_argument("--timeline", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="start the timeline HTTP API")
    p.add_argument("--data-root", default=None)
    p.add_argument("--bind", default=None, help="host:port")
    p.add_argument("--checkpoint", default=None)
    _encoder_args(p)
    return parser


def _encoders_from(args):
    cache = EmbeddingCache(args.cache_dir) if args.cache_dir else None
    text_enc, audio_enc = make_encoders(
        args.encoder,
        seed=args.encoder_seed,
        text_model=args.text_model,
        audio_weights=args.audio_weights,
    )
    return text_enc, audio_enc, cache


def _stubs(manifest_path):
    return validate_manifest(load_manifest(manifest_path))


def cmd_ingest(args):
    stubs = _stubs(args.manifest)
    for stub in stubs:
        n_spans = len(stub.annotations) if stub.annotations else 0
        print(f"{stub.id}: {len(stub.words)} words, {n_spans} annotation spans")
        if args.dump_frames:
            out = Path(args.dump_frames)
            out.mkdir(parents=True, exist_ok=True)
            frames = make_frames(stub.load())
            (out / f"{stub.id}.frames.jsonl").write_text(frames_to_jsonl(frames))
    print(f"manifest OK: {len(stubs)} recording(s)")
    return 0


def cmd_embed(args):
    if not args.cache_dir:
        raise LectsegError("embed requires --cache-dir")
    text_enc, audio_enc, cache = _encoders_from(args)
    total = 0
    for stub in _stubs(args.manifest):
        _, frames = embedded_frames(stub, text_enc, audio_enc, cache)
        total += len(frames)
        print(f"{stub.id}: {len(frames)} frames embedded")
    print(f"cache ready: {total} frames")
    return 0


def _train_config_from(args):
    cfg = TrainConfig.from_json(args.train_config) if args.train_config else TrainConfig()
    overrides = {
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "max_lr": args.max_lr,
        "eval_fraction": args.eval_fraction,
        "seed": args.seed,
    }
    fields = {k: v for k, v in overrides.items() if v is not None}
    if fields:
        d = cfg.to_dict()
        d.update(fields)
        cfg = TrainConfig.from_dict(d)
    return cfg


def cmd_train(args):
    text_enc, audio_enc, cache = _encoders_from(args)
    train_cfg = _train_config_from(args)
    model_cfg = ModelConfig(
        lstm_units=args.lstm_units,
        head_units=args.head_units,
        n_context=args.n_context,
    )
    windows = labeled_windows(_stubs(args.manifest), args.n_context, text_enc, audio_enc, cache)
    if not windows:
        raise LectsegError("no labeled frames in the manifest")
    train_set, eval_set = stratified_split(windows, train_cfg.eval_fraction, train_cfg.seed)
    params, history = train(train_set, eval_set, model_cfg, train_cfg)
    save_checkpoint(params, history, args.out)
    print(f"checkpoint written to {args.out} (best epoch {params.epoch}, "
          f"eval macro-F {params.metrics.get('eval_macro_f', float('nan')):.3f})")
    return 0


def cmd_eval(args):
    params = load_checkpoint(args.checkpoint)
    text_enc, audio_enc, cache = _encoders_from(args)
    preds, golds = [], []
    for stub in _stubs(args.manifest):
        _, frames = embedded_frames(stub, text_enc, audio_enc, cache)
        frame_preds = predict_frames(params, frames)
        for frame, (label_id, _) in zip(frames, frame_preds):
            if frame.gold is not None:
                preds.append(label_id)
                golds.append(frame.gold.id)
    if not golds:
        raise LectsegError("no gold-labeled frames to evaluate")
    cm = confusion(preds, golds)
    report = per_class_metrics(cm)
    print(render_metrics_table(report), end="")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(metrics_to_json(report))
        (out / "confusion.csv").write_text(confusion_to_csv(cm))
        (out / "confusion_rownorm.csv").write_text(confusion_to_csv(cm, normalized=True))
        (out / "report.txt").write_text(render_metrics_table(report))
    return 0


def cmd_infer(args):
    params = load_checkpoint(args.checkpoint)
    text_enc, audio_enc, cache = _encoders_from(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index = []
    for stub in _stubs(args.manifest):
        recording = stub.load()
        tl = infer_timeline(
            params,
            recording,
            text_enc,
            audio_enc,
            cache,
            smooth_window=args.smooth_window,
            min_segment_s=args.min_segment,
        )
        (out / f"{recording.id}.timeline.json").write_text(export_json(tl))
        index.append(
            {
                "id": recording.id,
                "audio_path": str(Path(stub.audio_path).resolve()),
                "meta": stub.meta,
                "duration_s": recording.duration_s,
            }
        )
        print(f"{recording.id}: {len(tl.segments)} segments")
    (out / "index.json").write_text(json.dumps({"recordings": index}, indent=2) + "\n")
    return 0


def cmd_export(args):
    doc = Path(args.timeline).read_text()
    tl = import_json(doc)
    vtt = export_webvtt(tl)
    out = Path(args.out) if args.out else Path(args.timeline).with_suffix("").with_suffix(".vtt")
    out.write_text(vtt)
    print(f"wrote {out}")
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.from_sources(
        data_root=args.data_root,
        bind=args.bind,
        checkpoint=args.checkpoint,
        encoder=args.encoder,
        encoder_seed=args.encoder_seed,
    )
    host, _, port = config.bind.rpartition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port))
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "embed": cmd_embed,
    "train": cmd_train,
    "eval": cmd_eval,
    "infer": cmd_infer,
    "export": cmd_export,
    "serve": cmd_serve,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return _COMMANDS[args.command](args)
    except LectsegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
