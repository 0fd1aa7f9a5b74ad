"""Generate golden pixel<->plane vectors from the renderer's own viewport.

The explorer re-implements the pixel-to-plane mapping in TypeScript; this
script pins that reimplementation to the Python renderer by sampling
random (viewport, pixel) pairs and recording what the renderer computes.
Run from the frontend directory after any viewport change:

    python scripts/make_golden_vectors.py > test/golden-vectors.json
"""

from __future__ import annotations

import json
import random
import sys

from fracdom.engine import Viewport


def main() -> None:
    rng = random.Random(20240811)
    cases = []
    for index in range(100):
        width = rng.randint(1, 2048)
        height = rng.randint(1, 2048)
        center = complex(
            rng.uniform(-4, 4) * 10 ** rng.randint(-6, 1),
            rng.uniform(-4, 4) * 10 ** rng.randint(-6, 1),
        )
        scale = rng.uniform(0.1, 4) * 10 ** rng.randint(-12, 0)
        viewport = Viewport(center=center, scale=scale, width=width, height=height)
        # Mix integer pixel indices (tile math) with fractional positions
        # (pointer events land between pixel centers).
        if index % 3 == 0:
            px = float(rng.randint(0, width - 1))
            py = float(rng.randint(0, height - 1))
        else:
            px = rng.uniform(-0.5, width - 0.5)
            py = rng.uniform(-0.5, height - 0.5)
        point = viewport.pixel_to_plane(px, py)
        back = viewport.plane_to_pixel(point)
        cases.append(
            {
                "width": width,
                "height": height,
                "centerRe": center.real,
                "centerIm": center.imag,
                "scale": scale,
                "px": px,
                "py": py,
                "re": point.real,
                "im": point.imag,
                "backPx": back[0],
                "backPy": back[1],
            }
        )
    json.dump(cases, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
