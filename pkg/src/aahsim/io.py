"""Tabular text writers and a minimal greyscale image encoder.

Every table starts with ``#`` header lines naming the tool version, the
preset and figure label, resolved parameters and column units.  No
timestamps are written, so reruns are byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._version import __version__


def format_value(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def header_lines(meta: Mapping[str, object], columns: Sequence[str], units: Sequence[str]) -> list[str]:
    lines = [f"# aahsim {__version__}"]
    for key, value in meta.items():
        lines.append(f"# {key}: {value}")
    lines.append("# units: " + "\t".join(units))
    lines.append("# " + "\t".join(columns))
    return lines


def write_table(path: Path, meta: Mapping[str, object], columns: Sequence[str], units: Sequence[str],
                rows: Iterable[Sequence]) -> Path:
    if len(columns) != len(units):
        raise ValueError("one unit per column")
    lines = header_lines(meta, columns, units)
    for row in rows:
        lines.append("\t".join(format_value(x) for x in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path: Path) -> np.ndarray:
    """Numeric body of a table written by :func:`write_table`."""
    rows = [line.split("\t") for line in Path(path).read_text().splitlines() if line and not line.startswith("#")]
    return np.array([[float(x) for x in row] for row in rows]) if rows else np.zeros((0, 0))


def write_key_values(path: Path, meta: Mapping[str, object], values: Mapping[str, object]) -> Path:
    lines = [f"# aahsim {__version__}"] + [f"# {k}: {v}" for k, v in meta.items()]
    lines += [f"{k} = {format_value(v)}" for k, v in values.items()]
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)


def encode_pgm(image: np.ndarray) -> bytes:
    """Binary 8-bit PGM of a 2D array scaled linearly to its own range.

    Row 0 of ``image`` becomes the top row of the picture.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("need a non-empty 2D array")
    lo, hi = np.nanmin(img), np.nanmax(img)
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pix = np.nan_to_num((img - lo) * scale).round().clip(0, 255).astype(np.uint8)
    h, w = pix.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pix.tobytes()


def write_pgm(path: Path, image: np.ndarray) -> Path:
    Path(path).write_bytes(encode_pgm(image))
    return Path(path)
