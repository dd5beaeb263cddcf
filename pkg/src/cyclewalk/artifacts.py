"""CSV tables and key=value manifests with deterministic formatting.

Output format is part of the reproducibility contract: UTF-8, comma
separator, `.` decimal point, one header row.  Floats are written with
"%.12g" so identical inputs give byte-identical files on any platform.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(path: str | Path, columns: dict[str, np.ndarray]) -> Path:
    """Write named columns of equal length; column order is dict order."""
    path = Path(path)
    names = list(columns)
    if not names:
        raise ValueError("no columns to write")
    arrays = [np.asarray(columns[name]) for name in names]
    length = len(arrays[0])
    for name, arr in zip(names, arrays):
        if arr.ndim != 1 or len(arr) != length:
            raise ValueError(f"column {name!r} is not a 1-d array of length {length}")
    lines = [",".join(names)]
    for row in range(length):
        lines.append(",".join(format_cell(arr[row]) for arr in arrays))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read back a write_csv file; numeric columns become float64 arrays."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    names = text[0].split(",")
    cells = [line.split(",") for line in text[1:]]
    out: dict[str, np.ndarray] = {}
    for idx, name in enumerate(names):
        raw = [row[idx] for row in cells]
        try:
            out[name] = np.asarray([float(x) for x in raw])
        except ValueError:
            out[name] = np.asarray(raw)
    return out


def write_manifest(path: str | Path, entries: dict[str, object]) -> Path:
    """key=value lines, insertion order; values flattened to plain strings."""
    path = Path(path)
    lines = []
    for key, value in entries.items():
        if isinstance(value, (tuple, list, np.ndarray)):
            value = ",".join(format_cell(v) for v in value)
        else:
            value = format_cell(value)
        if "\n" in str(key) or "\n" in value:
            raise ValueError("manifest entries must be single-line")
        lines.append(f"{key}={value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_manifest(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key] = value
    return out
