"""Palettes and the escape-ratio coloring map.

The coloring function is C(x) = ceil(p*x) on the open interval (0, 1),
1-based into a palette of p colors. x = 1 (the orbit never left the radius
within budget, or left exactly at the last step) falls outside that domain
and maps to a dedicated interior color; the sentinel index 0 encodes it.
"""

from __future__ import annotations

import colorsys
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

INTERIOR_SENTINEL = 0


@dataclass(frozen=True)
class Palette:
    id: str
    colors: np.ndarray  # (p, 3) uint8
    interior: np.ndarray  # (3,) uint8

    @property
    def size(self) -> int:
        return int(self.colors.shape[0])

    def describe(self) -> dict:
        return {"id": self.id, "size": self.size, "interior": self.interior.tolist()}


def _gray256() -> Palette:
    levels = np.arange(256, dtype=np.uint8)
    colors = np.stack([levels, levels, levels], axis=1)
    return Palette("gray256", colors, np.zeros(3, dtype=np.uint8))


def _spectrum256() -> Palette:
    rows = []
    for j in range(256):
        r, g, b = colorsys.hsv_to_rgb(j / 256.0, 0.85, 1.0 if j else 0.2)
        rows.append((round(r * 255), round(g * 255), round(b * 255)))
    return Palette("spectrum256", np.array(rows, dtype=np.uint8), np.zeros(3, dtype=np.uint8))


def builtin_palettes() -> dict[str, Palette]:
    """Built-ins, default 256-gray first."""
    out: dict[str, Palette] = {}
    for pal in (_gray256(), _spectrum256()):
        out[pal.id] = pal
    return out


def _check_rgb(v) -> np.ndarray:
    arr = np.asarray(v)
    if arr.shape[-1] != 3:
        raise ValueError("RGB triple expected")
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("RGB components must be in [0, 255]")
    return arr.astype(np.uint8)


def load_palette(path: str | Path) -> Palette:
    """Read one palette JSON: {"id": ..., "interior": [r,g,b], "colors": [[r,g,b], ...]}."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    pal_id = data["id"]
    if not isinstance(pal_id, str) or not pal_id:
        raise ValueError("palette id must be a non-empty string")
    colors = _check_rgb(data["colors"])
    if colors.ndim != 2 or colors.shape[0] < 1:
        raise ValueError("palette needs at least one color")
    interior = _check_rgb(data["interior"])
    if interior.ndim != 1:
        raise ValueError("interior must be a single RGB triple")
    return Palette(pal_id, colors, interior)


def load_palette_dir(directory: str | Path, warn=None) -> dict[str, Palette]:
    """Load every *.json palette in a directory, skipping malformed files.

    `warn` is called with a message per skipped file (defaults to no-op)."""
    out: dict[str, Palette] = {}
    directory = Path(directory)
    if not directory.is_dir():
        return out
    for path in sorted(directory.glob("*.json")):
        try:
            pal = load_palette(path)
        except (OSError, ValueError, KeyError, TypeError) as ex:
            if warn is not None:
                warn(f"skipping palette file {path.name}: {ex}")
            continue
        out[pal.id] = pal
    return out


def color_index(x: float, p: int) -> int:
    """1-based palette index for escape ratio x; 0 is the interior sentinel."""
    if p < 1:
        raise ValueError(f"palette size must be >= 1, got {p}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"escape ratio must be in [0, 1], got {x}")
    if x == 1.0:
        return INTERIOR_SENTINEL
    if x == 0.0:
        return 1
    return min(max(math.ceil(p * x), 1), p)
