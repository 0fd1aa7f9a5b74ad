"""Escape-time iteration over a pixel grid, tiled and parallel.

The orbit starts at z0 = c (the pixel's plane point) and applies the
compiled map until |z| > k or the iteration budget N runs out; m is the
first escaping step (1-based) or N for interior points, and x = m/N feeds
the coloring map. Non-finite z counts as escaped at its first appearance,
which makes poles of tan/cotan maps behave as instant escapes.

Rendering is decomposed into 64x64 tiles. Each tile is iterated as a numpy
batch with escaped pixels compacted away, and placed into the output by
absolute pixel rectangle, so the result is byte-identical for any worker
count or tile schedule. The escape test is modulus-squared against k*k
(no square root per iteration) and `not (|z|^2 <= k^2)` so NaN counts as
escaped.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import vm
from .palette import Palette

TILE_SIZE = 64
MAX_ITER_LIMIT = 99999

# Below roughly this many plane units per pixel, float64 pixel centers
# collide and zooming deeper only rerenders the same points.
MIN_SCALE = 1e-14


@dataclass(frozen=True)
class Viewport:
    center: complex
    scale: float  # plane units per pixel
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if self.width < 1 or self.height < 1:
            raise ValueError("viewport must be at least 1x1 pixels")

    def pixel_to_plane(self, px: float, py: float) -> complex:
        """Plane point of the pixel center; 0-indexed from top-left, y-down."""
        re = self.center.real + (px + 0.5 - self.width / 2) * self.scale
        im = self.center.imag - (py + 0.5 - self.height / 2) * self.scale
        return complex(re, im)

    def plane_to_pixel(self, point: complex) -> tuple[float, float]:
        px = (point.real - self.center.real) / self.scale - 0.5 + self.width / 2
        py = -(point.imag - self.center.imag) / self.scale - 0.5 + self.height / 2
        return px, py


@dataclass(frozen=True)
class RenderParams:
    program: vm.Program
    log_k: float  # escape radius k = e^log_k
    max_iter: int
    palette_id: str = "gray256"

    def __post_init__(self) -> None:
        if not math.isfinite(self.log_k):
            raise ValueError("log_k must be finite")
        if not 1 <= self.max_iter <= MAX_ITER_LIMIT:
            raise ValueError(
                f"max_iter must be in [1, {MAX_ITER_LIMIT}], got {self.max_iter}"
            )

    @property
    def k(self) -> float:
        return math.exp(self.log_k)


@dataclass(frozen=True)
class EscapeGrid:
    m: np.ndarray  # (height, width) uint32, first escaping step or N
    escaped: np.ndarray  # (height, width) bool
    max_iter: int

    @property
    def width(self) -> int:
        return int(self.m.shape[1])

    @property
    def height(self) -> int:
        return int(self.m.shape[0])

    def x(self) -> np.ndarray:
        """Escape ratios m/N; interior cells are exactly 1."""
        return self.m.astype(np.float64) / self.max_iter

    def interior_mask(self) -> np.ndarray:
        return ~self.escaped

    def interior_fraction(self) -> float:
        return float(np.count_nonzero(~self.escaped)) / self.m.size

    def to_bytes(self) -> bytes:
        """Flat little-endian u32 m per pixel, row-major."""
        return self.m.astype("<u4").tobytes()


def iterate_point(program: vm.Program, c: complex, k: float, max_iter: int):
    """Scalar reference iteration: (escaped, m) for one plane point."""
    if k <= 0:
        raise ValueError("escape radius must be positive")
    if max_iter < 1:
        raise ValueError("need at least one iteration")
    k2 = k * k
    z = c
    for m in range(1, max_iter + 1):
        z = vm.execute(program, z, c)
        az2 = z.real * z.real + z.imag * z.imag
        if not az2 <= k2:
            return True, m
    return False, max_iter


def _iterate_tile(program: vm.Program, c_flat: np.ndarray, k2: float, max_iter: int):
    """Batch iteration with escaped-pixel compaction; mirrors iterate_point."""
    n = c_flat.size
    m = np.full(n, max_iter, dtype=np.uint32)
    escaped = np.zeros(n, dtype=bool)
    alive = np.arange(n)
    z = c_flat.copy()
    c_cur = c_flat
    with np.errstate(all="ignore"):
        for step in range(1, max_iter + 1):
            z = vm.execute_batch(program, z, c_cur)
            az2 = z.real * z.real + z.imag * z.imag
            esc = ~(az2 <= k2)
            if esc.any():
                gone = alive[esc]
                m[gone] = step
                escaped[gone] = True
                keep = ~esc
                alive = alive[keep]
                if alive.size == 0:
                    break
                z = z[keep]
                c_cur = c_cur[keep]
    return m, escaped


def _tile_plane_points(
    center: complex, scale: float, width: int, height: int, rect
) -> np.ndarray:
    x0, y0, tw, th = rect
    px = np.arange(x0, x0 + tw, dtype=np.float64)
    py = np.arange(y0, y0 + th, dtype=np.float64)
    re = center.real + (px + 0.5 - width / 2) * scale
    im = center.imag - (py + 0.5 - height / 2) * scale
    return re[np.newaxis, :] + 1j * im[:, np.newaxis]


def _render_tile(args):
    program, center, scale, width, height, rect, k2, max_iter = args
    c_grid = _tile_plane_points(center, scale, width, height, rect)
    th, tw = c_grid.shape
    m, escaped = _iterate_tile(program, c_grid.ravel(), k2, max_iter)
    return rect, m.reshape(th, tw), escaped.reshape(th, tw)


def _tile_rects(width: int, height: int):
    for y0 in range(0, height, TILE_SIZE):
        th = min(TILE_SIZE, height - y0)
        for x0 in range(0, width, TILE_SIZE):
            tw = min(TILE_SIZE, width - x0)
            yield (x0, y0, tw, th)


def render(
    viewport: Viewport,
    params: RenderParams,
    workers: int | None = None,
) -> EscapeGrid:
    """Iterate every pixel of the viewport; deterministic for any worker count."""
    if viewport.scale < MIN_SCALE:
        warnings.warn(
            f"scale {viewport.scale:g} is below the float64 limit (~{MIN_SCALE:g} "
            "plane units per pixel); pixel centers are no longer distinct",
            stacklevel=2,
        )
    if workers is None:
        workers = os.cpu_count() or 1
    k = params.k
    k2 = k * k
    m = np.zeros((viewport.height, viewport.width), dtype=np.uint32)
    escaped = np.zeros((viewport.height, viewport.width), dtype=bool)
    tasks = [
        (params.program, viewport.center, viewport.scale, viewport.width,
         viewport.height, rect, k2, params.max_iter)
        for rect in _tile_rects(viewport.width, viewport.height)
    ]
    if workers <= 1 or len(tasks) == 1:
        results = map(_render_tile, tasks)
        for rect, tile_m, tile_esc in results:
            x0, y0, tw, th = rect
            m[y0 : y0 + th, x0 : x0 + tw] = tile_m
            escaped[y0 : y0 + th, x0 : x0 + tw] = tile_esc
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rect, tile_m, tile_esc in pool.map(
                _render_tile, tasks, chunksize=max(1, len(tasks) // (workers * 4))
            ):
                x0, y0, tw, th = rect
                m[y0 : y0 + th, x0 : x0 + tw] = tile_m
                escaped[y0 : y0 + th, x0 : x0 + tw] = tile_esc
    return EscapeGrid(m, escaped, params.max_iter)


def colorize(grid: EscapeGrid, palette: Palette) -> np.ndarray:
    """(height, width, 3) uint8 image; vectorized color_index application."""
    p = palette.size
    x = grid.x()
    idx = np.ceil(p * x)
    np.clip(idx, 1, p, out=idx)
    idx = idx.astype(np.int64)
    img = palette.colors[idx - 1]
    img[x == 1.0] = palette.interior
    return img
