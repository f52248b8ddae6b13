"""Binary PGM rendering of 2-D scalar fields.

PGM (P5, 8-bit) keeps the output dependency-free and byte-exact for tests.
Rows follow the phi grid; columns the second axis.  Linear scaling maps
[min, max] onto [0, 255]; log scaling maps log10 of the values clamped to
[1e-6, max].  Invalid (non-finite) cells render as 255.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

LOG_CLAMP = 1e-6


def render_pgm(values: np.ndarray, scale: str = "linear") -> bytes:
    """Encode a 2-D field as a binary PGM image."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("heatmap input must be 2-D")
    finite = np.isfinite(values)
    pixels = np.full(values.shape, 255, dtype=np.uint8)
    if finite.any():
        v = values[finite]
        if scale == "linear":
            lo, hi = v.min(), v.max()
        elif scale == "log":
            hi = max(v.max(), LOG_CLAMP)
            v = np.log10(np.clip(v, LOG_CLAMP, hi))
            lo, hi = np.log10(LOG_CLAMP), np.log10(hi)
        else:
            raise ValueError(f"unknown scale {scale!r}")
        span = hi - lo
        scaled = np.zeros_like(v) if span == 0 else (v - lo) / span * 255.0
        pixels[finite] = np.clip(np.rint(scaled), 0, 255).astype(np.uint8)
    header = f"P5\n{values.shape[1]} {values.shape[0]}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_heatmap(values: np.ndarray, path: Path | str, scale: str = "linear") -> None:
    """Render ``values`` to a PGM file at ``path``."""
    data = render_pgm(values, scale)
    path = Path(path)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write heatmap {path}: {exc}") from exc
