"""Read-mostly HTTP API for the navigator UI.

Serves exported timelines and audio byte-ranges from a data root (as written
by `lectseg infer`), plus an on-demand classify endpoint backed by a loaded
checkpoint. Training never runs through the API.
"""

import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from .errors import LectsegError
from .ingest import Recording, load_audio, parse_transcript
from .pipeline import infer_timeline, make_encoders
from .taxonomy import taxonomy_map
from .timeline import export_json
from .training import load_checkpoint

TIMELINE_SUFFIX = ".timeline.json"


@dataclass
class ServiceConfig:
    data_root: Path
    bind: str = "127.0.0.1:8000"
    checkpoint: Path | None = None
    encoder: str = "mock"
    encoder_seed: int = 0
    cors_origins: list = field(default_factory=lambda: ["*"])
    smooth_window: int = 5
    min_segment_s: float = 3.0

    @classmethod
    def from_sources(cls, **flags):
        """Flags win over SERVICE_* environment variables."""
        env = {
            "data_root": os.environ.get("SERVICE_DATA_ROOT"),
            "bind": os.environ.get("SERVICE_BIND"),
            "checkpoint": os.environ.get("SERVICE_CHECKPOINT"),
            "encoder": os.environ.get("SERVICE_ENCODER"),
            "encoder_seed": os.environ.get("SERVICE_ENCODER_SEED"),
        }
        merged = {k: v for k, v in env.items() if v is not None}
        merged.update({k: v for k, v in flags.items() if v is not None})
        if "data_root" not in merged:
            raise LectsegError("service needs --data-root or SERVICE_DATA_ROOT")
        origins = os.environ.get("SERVICE_CORS_ORIGIN")
        return cls(
            data_root=Path(merged["data_root"]),
            bind=merged.get("bind") or "127.0.0.1:8000",
            checkpoint=Path(merged["checkpoint"]) if merged.get("checkpoint") else None,
            encoder=merged.get("encoder") or "mock",
            encoder_seed=int(merged.get("encoder_seed") or 0),
            cors_origins=[origins] if origins else ["*"],
        )


class _Catalog:
    """Recordings visible under the data root; reread per request so the API
    reflects on-disk state between mutations."""

    def __init__(self, root):
        self.root = Path(root)

    def _index(self):
        index_path = self.root / "index.json"
        if index_path.exists():
            entries = json.loads(index_path.read_text())["recordings"]
            return {e["id"]: e for e in entries}
        return {}

    def ids(self):
        found = {p.name[: -len(TIMELINE_SUFFIX)] for p in self.root.glob(f"*{TIMELINE_SUFFIX}")}
        return sorted(found | set(self._index()))

    def entry(self, recording_id):
        return self._index().get(recording_id, {})

    def timeline_path(self, recording_id):
        return self.root / f"{recording_id}{TIMELINE_SUFFIX}"

    def media_path(self, recording_id):
        entry = self.entry(recording_id)
        if entry.get("audio_path"):
            p = Path(entry["audio_path"])
            if p.exists():
                return p
        p = self.root / f"{recording_id}.wav"
        return p if p.exists() else None


def _parse_range(header, size):
    """`bytes=a-b` -> (start, end inclusive) or None when unusable."""
    if not header or not header.startswith("bytes="):
        return None
    spec = header[len("bytes=") :].split(",")[0].strip()
    start_s, _, end_s = spec.partition("-")
    try:
        if start_s:
            start = int(start_s)
            end = int(end_s) if end_s else size - 1
        else:
            length = int(end_s)  # suffix form bytes=-N
            start, end = max(0, size - length), size - 1
    except ValueError:
        return None
    if start > end or start >= size:
        return None
    return start, min(end, size - 1)


def create_app(config):
    app = FastAPI(title="lectseg timeline service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    catalog = _Catalog(config.data_root)
    state = {"params": None, "encoders": None}
    classify_lock = threading.Lock()

    def _params():
        if state["params"] is None and config.checkpoint:
            state["params"] = load_checkpoint(config.checkpoint)
        return state["params"]

    def _encoders():
        if state["encoders"] is None:
            state["encoders"] = make_encoders(config.encoder, seed=config.encoder_seed)
        return state["encoders"]

    @app.get("/api/recordings")
    def recordings():
        out = []
        for rid in catalog.ids():
            entry = catalog.entry(rid)
            out.append(
                {
                    "id": rid,
                    "duration_s": entry.get("duration_s"),
                    "meta": entry.get("meta", {}),
                    "has_timeline": catalog.timeline_path(rid).exists(),
                    "has_media": catalog.media_path(rid) is not None,
                }
            )
        return out

    @app.get("/api/recordings/{recording_id}/timeline")
    def timeline(recording_id: str):
        path = catalog.timeline_path(recording_id)
        if not path.exists():
            raise HTTPException(404, f"no timeline for {recording_id!r}")
        return Response(content=path.read_bytes(), media_type="application/json")

    @app.get("/api/recordings/{recording_id}/media")
    def media(recording_id: str, request: Request):
        path = catalog.media_path(recording_id)
        if path is None:
            raise HTTPException(404, f"no media for {recording_id!r}")
        blob = path.read_bytes()
        headers = {"Accept-Ranges": "bytes"}
        rng = _parse_range(request.headers.get("range"), len(blob))
        if rng is None:
            return Response(content=blob, media_type="audio/wav", headers=headers)
        start, end = rng
        headers["Content-Range"] = f"bytes {start}-{end}/{len(blob)}"
        return Response(
            content=blob[start : end + 1],
            status_code=206,
            media_type="audio/wav",
            headers=headers,
        )

    @app.get("/api/taxonomy")
    def taxonomy():
        return {str(i): name for i, name in taxonomy_map().items()}

    @app.post("/api/classify")
    def classify(audio: UploadFile, transcript: UploadFile):
        params = _params()
        if params is None:
            raise HTTPException(503, "no checkpoint loaded")
        with tempfile.TemporaryDirectory() as tmp:
            audio_path = Path(tmp) / (audio.filename or "upload.wav")
            audio_path.write_bytes(audio.file.read())
            transcript_path = Path(tmp) / (transcript.filename or "upload.json")
            transcript_path.write_bytes(transcript.file.read())
            try:
                samples, duration = load_audio(audio_path)
                words = parse_transcript(transcript_path)
                recording = Recording(
                    id=audio_path.stem,
                    samples=samples,
                    duration_s=duration,
                    words=words,
                ).validate()
            except LectsegError as exc:
                raise HTTPException(422, str(exc)) from exc
            text_enc, audio_enc = _encoders()
            with classify_lock:
                tl = infer_timeline(
                    params,
                    recording,
                    text_enc,
                    audio_enc,
                    smooth_window=config.smooth_window,
                    min_segment_s=config.min_segment_s,
                )
        return Response(content=export_json(tl), media_type="application/json")

    return app
