"""Versioned JSON checkpoints mapping parameter names to shaped arrays.

The on-disk layout is deliberately plain:

    {"format": "pathrel-checkpoint", "version": 1,
     "meta": {...},
     "tensors": {"name": {"shape": [2, 3], "data": [flat floats...]}}}

Keys are sorted and floats use Python repr, so identical parameters
always serialize to identical bytes (the determinism contract).
"""

from __future__ import annotations

import json

import numpy as np

FORMAT_NAME = "pathrel-checkpoint"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def checkpoint_bytes(tensors: dict[str, np.ndarray], meta: dict | None = None) -> bytes:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "meta": meta or {},
        "tensors": {
            name: {"shape": list(arr.shape), "data": [float(v) for v in arr.reshape(-1)]}
            for name, arr in sorted(tensors.items())
        },
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_checkpoint(path, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(checkpoint_bytes(tensors, meta))


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read a checkpoint back into (name -> array, meta)."""
    with open(path, "rb") as fh:
        doc = json.loads(fh.read().decode("utf-8"))
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise CheckpointError(f"{path}: not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported version {doc.get('version')!r}")
    tensors = {}
    for name, spec in doc["tensors"].items():
        arr = np.asarray(spec["data"], dtype=np.float64)
        shape = tuple(spec["shape"])
        if arr.size != int(np.prod(shape)):
            raise CheckpointError(f"{path}: tensor {name!r} data length {arr.size} != shape {shape}")
        tensors[name] = arr.reshape(shape)
    return tensors, doc.get("meta", {})
