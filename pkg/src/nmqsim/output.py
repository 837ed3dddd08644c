"""Deterministic CSV/JSON emission with config-echo metadata headers."""
from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, dump_config


def metadata_lines(cfg: RunConfig) -> list[str]:
    lines = [f"nmqsim_version = {json.dumps(__version__)}"]
    lines.extend(dump_config(cfg).splitlines())
    return lines


def format_float(v: float) -> str:
    return f"{v:.17g}"


def write_csv(path, cfg: RunConfig, columns: dict[str, np.ndarray]) -> Path:
    """Comma-separated columns with '#'-prefixed metadata, 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n_rows = len(arrays[0])
    for name, a in zip(names, arrays):
        if len(a) != n_rows:
            raise ValueError(f"column {name!r} has mismatched length")
    with open(path, "w", encoding="utf-8") as fh:
        for line in metadata_lines(cfg):
            fh.write(f"# {line}\n" if line else "#\n")
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            fh.write(",".join(format_float(float(a[i])) for a in arrays) + "\n")
    return path


def read_csv(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Read back a CSV written by `write_csv`: (metadata lines, columns)."""
    meta: list[str] = []
    header: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                meta.append(line[2:] if line.startswith("# ") else line[1:])
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([float(x) for x in line.split(",")])
    data = np.asarray(rows, dtype=float)
    cols = {name: data[:, i] for i, name in enumerate(header or [])}
    return meta, cols


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def default(obj):
        if is_dataclass(obj):
            return asdict(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        raise TypeError(f"not JSON serializable: {type(obj)}")

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")
    return path
