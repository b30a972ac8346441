"""Versioned binary tensor dump.

Layout: 6-byte magic "SEERv1", a little-endian uint32 header length, a UTF-8
JSON header {"tensors": [{"name", "dims", "offset"}], "meta": {...}}, then the
concatenated row-major float64 little-endian tensor payloads.
"""

from __future__ import annotations

import json
import struct
from typing import Mapping

import numpy as np

from .errors import CheckpointError

MAGIC = b"SEERv1"


def save_tensors(path: str, tensors: Mapping[str, np.ndarray], meta: dict | None = None) -> None:
    entries = []
    blobs = []
    offset = 0
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype="<f8")
        entries.append({"name": name, "dims": list(arr.shape), "offset": offset})
        blob = arr.tobytes()
        blobs.append(blob)
        offset += len(blob)
    header = json.dumps({"tensors": entries, "meta": meta or {}}, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def load_tensors(path: str) -> tuple[dict[str, np.ndarray], dict]:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path}: bad magic, expected {MAGIC!r}")
    (header_len,) = struct.unpack_from("<I", data, len(MAGIC))
    header_start = len(MAGIC) + 4
    try:
        header = json.loads(data[header_start : header_start + header_len].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header: {exc}") from None
    payload = data[header_start + header_len :]
    tensors: dict[str, np.ndarray] = {}
    for entry in header.get("tensors", []):
        dims = tuple(entry["dims"])
        count = int(np.prod(dims)) if dims else 1
        start = entry["offset"]
        end = start + count * 8
        if end > len(payload):
            raise CheckpointError(f"{path}: truncated payload for tensor {entry['name']!r}", element=entry["name"])
        arr = np.frombuffer(payload[start:end], dtype="<f8").reshape(dims).copy()
        tensors[entry["name"]] = arr
    return tensors, header.get("meta", {})
