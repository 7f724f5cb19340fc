"""CSV/JSON emission and run records."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__


def format_value(x) -> str:
    """Render a cell: floats with 17 significant digits, '.' decimal."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def emit(results, fmt: str, path=None, columns=None) -> str:
    """Serialise ``results`` and write it to ``path`` (or just return it).

    CSV expects a list of row dicts plus ``columns``; JSON takes any
    JSON-compatible structure.  Python's shortest-repr floats make JSON
    round-trips exact; the 17-digit CSV rendering is exact as well.
    """
    if fmt == "csv":
        if columns is None:
            raise ValueError("CSV output needs explicit columns")
        text = to_csv(results, columns)
    elif fmt == "json":
        text = to_json(results)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@dataclass
class RunRecord:
    config: dict
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
        }


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def manifest_entry(path, fmt) -> dict:
    data = Path(path).read_bytes()
    return {"path": str(path), "format": fmt, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()}


def record_path(out_path) -> Path:
    p = Path(out_path)
    return p.with_name(p.name + ".run.json")
