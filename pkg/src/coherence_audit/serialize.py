"""JSON wire formats for matrices, vectors, channels, witnesses and reports."""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import FormatError


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"dim": int(m.shape[0]),
            "entries": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def _pairs(raw, n: int, what: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.shape != (n, 2):
        raise FormatError(f"{what}: expected {n} [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def _dim(doc: dict, what: str) -> int:
    d = doc.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError(f"{what}: 'dim' must be a positive integer")
    return d


def matrix_from_json(doc: Any) -> np.ndarray:
    if not isinstance(doc, dict) or "entries" not in doc:
        raise FormatError("matrix: expected an object with 'dim' and 'entries'")
    d = _dim(doc, "matrix")
    return _pairs(doc["entries"], d * d, "matrix").reshape(d, d)


def vector_to_json(v: np.ndarray) -> dict:
    v = np.asarray(v, dtype=np.complex128)
    return {"dim": int(v.shape[0]),
            "amplitudes": [[float(z.real), float(z.imag)] for z in v]}


def vector_from_json(doc: Any) -> np.ndarray:
    if not isinstance(doc, dict) or "amplitudes" not in doc:
        raise FormatError("vector: expected an object with 'dim' and 'amplitudes'")
    d = _dim(doc, "vector")
    return _pairs(doc["amplitudes"], d, "vector")


def channel_to_json(channel) -> dict:
    return {"dim": channel.dim,
            "operators": [matrix_to_json(a) for a in channel.operators]}


def channel_from_json(doc: Any):
    from .channels import kraus_channel

    if not isinstance(doc, dict) or not isinstance(doc.get("operators"), list):
        raise FormatError("channel: expected an object with 'dim' and 'operators'")
    d = _dim(doc, "channel")
    ops = [matrix_from_json(m) for m in doc["operators"]]
    if any(a.shape != (d, d) for a in ops):
        raise FormatError(f"channel: every operator must be {d}x{d}")
    return kraus_channel(ops)


def dumps(doc: Any) -> str:
    """Canonical text form; identical documents give identical bytes."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_path(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
