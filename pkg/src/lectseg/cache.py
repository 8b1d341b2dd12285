"""On-disk embedding cache.

Embedding extraction dominates pipeline runtime, so per-frame embeddings are
written once and reused. One file per entry, keyed by
(recording id, frame t, modality, encoder fingerprint).

Entry layout: magic "LATL1", u8 modality (0=text, 1=audio), u32-le rows,
u32-le cols, payload row-major float32-le, trailing CRC32 of the payload.
Writes are atomic (temp file + rename).
"""

import hashlib
import os
import re
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import CacheMiss, CorruptEntry

MAGIC = b"LATL1"
_MODALITY_CODES = {"text": 0, "audio": 1}
_HEADER = struct.Struct("<5sBII")
_CRC = struct.Struct("<I")


class EmbeddingCache:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key):
        recording_id, frame_t, modality, fingerprint = key
        if modality not in _MODALITY_CODES:
            raise ValueError(f"modality must be 'text' or 'audio', got {modality!r}")
        digest = hashlib.blake2b(
            "\x1f".join((str(recording_id), str(frame_t), modality, str(fingerprint))).encode(),
            digest_size=12,
        ).hexdigest()
        stem = re.sub(r"[^A-Za-z0-9_.-]", "-", str(recording_id))[:48]
        return self.root / f"{stem}_{frame_t}_{modality}_{digest}.latl"

    def put(self, key, embedding):
        arr = np.ascontiguousarray(embedding, dtype="<f4")
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError(f"embedding must be 1-d or 2-d, got shape {arr.shape}")
        payload = arr.tobytes()
        blob = (
            _HEADER.pack(MAGIC, _MODALITY_CODES[key[2]], arr.shape[0], arr.shape[1])
            + payload
            + _CRC.pack(zlib.crc32(payload) & 0xFFFFFFFF)
        )
        path = self._path(key)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_bytes(blob)
        os.replace(tmp, path)

    def get(self, key):
        path = self._path(key)
        try:
            blob = path.read_bytes()
        except FileNotFoundError:
            raise CacheMiss(f"no cache entry for {key}") from None
        if len(blob) < _HEADER.size + _CRC.size:
            raise CorruptEntry(f"{path}: truncated entry")
        magic, modality, rows, cols = _HEADER.unpack_from(blob)
        if magic != MAGIC:
            raise CorruptEntry(f"{path}: bad magic {magic!r}")
        if modality != _MODALITY_CODES[key[2]]:
            raise CorruptEntry(f"{path}: modality byte {modality} does not match key")
        payload = blob[_HEADER.size : _HEADER.size + rows * cols * 4]
        trailer = blob[_HEADER.size + rows * cols * 4 :]
        if len(payload) != rows * cols * 4 or len(trailer) != _CRC.size:
            raise CorruptEntry(f"{path}: truncated entry")
        if _CRC.unpack(trailer)[0] != zlib.crc32(payload) & 0xFFFFFFFF:
            raise CorruptEntry(f"{path}: checksum failure")
        arr = np.frombuffer(payload, dtype="<f4").reshape(rows, cols).copy()
        return arr[0] if rows == 1 else arr

    def has(self, key):
        return self._path(key).exists()


def cache_put(store, key, embedding):
    store.put(key, embedding)


def cache_get(store, key):
    return store.get(key)
