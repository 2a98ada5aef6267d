"""Deterministic report serialization.

Reports must be byte-identical across reruns of the same configuration, so
there are no timestamps, dict keys are emitted sorted, and every float is
written with 17 significant digits through one formatter. File names carry
a hash of the rendered configuration.
"""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np


def format_real(x: float) -> str:
    """Canonical 17-significant-digit decimal form."""
    return format(float(x), ".17g")


def _render(obj, indent: int) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if v != v:
            return '"nan"'
        if v in (float("inf"), float("-inf")):
            return f'"{v}"'
        return format_real(v)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ", ".join(_render(v, indent + 1) for v in obj)
        if len(inner) <= 100:
            return f"[{inner}]"
        body = (",\n" + pad + "  ").join(_render(v, indent + 1) for v in obj)
        return "[\n" + pad + "  " + body + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        body = (",\n" + pad + "  ").join(
            f'"{k}": ' + _render(v, indent + 1) for k, v in items
        )
        return "{\n" + pad + "  " + body + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def render_json(obj) -> str:
    return _render(obj, 0) + "\n"


def config_hash(cfg: dict) -> str:
    """Short stable digest of a rendered configuration mapping."""
    return hashlib.sha256(render_json(cfg).encode()).hexdigest()[:12]


def write_report(directory, stem: str, body: dict) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}.json"
    path.write_text(render_json(body))
    return path


def write_curve_csv(directory, stem: str, header, rows) -> Path:
    """CSV of numeric rows (each cell through the canonical formatter)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else format_real(c)
                             for c in row])
    return path
