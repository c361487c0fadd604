"""Deterministic artifact serialization.

Every artifact is a JSON object with two top-level blocks: ``header`` (kind,
timestamps, host, payload digest — anything run-specific) and ``payload``
(the result itself).  Payloads are serialized canonically — sorted keys, 17
significant digits, no whitespace variation — so identical configurations
produce byte-identical payload blocks; headers absorb everything that may
legitimately differ between runs.
"""

from __future__ import annotations

import hashlib
import json
import platform
import time
from pathlib import Path

import numpy as np

__all__ = [
    "float17",
    "canonical_json",
    "payload_bytes",
    "write_artifact",
    "read_artifact",
    "write_csv",
    "csv_text",
    "render_table",
    "write_operator_bin",
    "read_operator_bin",
    "TOOL_NAME",
]

TOOL_NAME = "spectral-forge"


def float17(x: float) -> str:
    """17-significant-digit decimal form (round-trips float64)."""
    return format(float(x), ".17g")


def _canon(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not np.isfinite(f):
            return "null"
        return float17(f)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(
            json.dumps(str(k), ensure_ascii=True) + ":" + _canon(v)
            for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def canonical_json(obj) -> str:
    """Canonical JSON text: sorted keys, %.17g floats, non-finite -> null."""
    return _canon(obj)


def payload_bytes(payload) -> bytes:
    return canonical_json(payload).encode("utf-8")


def write_artifact(path: str | Path, kind: str, payload,
                   header_extra: dict | None = None) -> Path:
    """Write {header, payload}; only the header carries run-specific data."""
    path = Path(path)
    body = payload_bytes(payload)
    header = {
        "kind": kind,
        "tool": TOOL_NAME,
        "created_unix": time.time(),
        "host": platform.node(),
        "payload_sha256": hashlib.sha256(body).hexdigest(),
    }
    if header_extra:
        header.update(header_extra)
    text = '{"header":' + canonical_json(header) + ',"payload":' + \
        body.decode("utf-8") + "}\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def read_artifact(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _cell(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return float17(v) if np.isfinite(v) else "nan"
    return str(v)


def _csv_cell(v) -> str:
    s = _cell(v)
    if any(ch in s for ch in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def csv_text(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, header: str, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def render_table(headers: list[str], rows) -> str:
    """Aligned-column text table."""
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))
    out = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    out.append("  ".join("-" * w for w in widths))
    for row in cells:
        out.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)))
    return "\n".join(out) + "\n"


def write_operator_bin(path: str | Path, mat: np.ndarray) -> Path:
    """Row-major little-endian float64 (re, im) pairs."""
    path = Path(path)
    m = np.ascontiguousarray(mat, dtype=np.complex128)
    inter = np.empty(m.shape + (2,), dtype="<f8")
    inter[..., 0] = m.real
    inter[..., 1] = m.imag
    path.parent.mkdir(parents=True, exist_ok=True)
    inter.tofile(path)
    return path


def read_operator_bin(path: str | Path, dim: int) -> np.ndarray:
    raw = np.fromfile(Path(path), dtype="<f8")
    if raw.size != dim * dim * 2:
        raise ValueError(f"operator file has {raw.size} floats, "
                         f"expected {dim * dim * 2}")
    raw = raw.reshape(dim, dim, 2)
    return (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex128)
