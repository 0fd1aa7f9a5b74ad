"""Scene files: a JSON description of one render.

A scene bundles the expression text, the viewport, the escape
parameters, and the palette name, so any render is reproducible from a
single human-diffable file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

from .engine import Viewport

SCENE_KEYS = {
    "expr",
    "center",
    "scale",
    "width",
    "height",
    "log_k",
    "max_iter",
    "palette",
}


@dataclass(frozen=True, slots=True)
class Scene:
    expr: str
    viewport: Viewport
    log_k: float
    max_iter: int
    palette_id: str = "gray256"

    def __post_init__(self) -> None:
        if not isinstance(self.expr, str) or not self.expr.strip():
            raise ValueError("scene expr must be a nonempty string")
        if not math.isfinite(self.log_k):
            raise ValueError("log_k must be finite")
        if not (1 <= self.max_iter <= 99_999):
            raise ValueError("max_iter must be between 1 and 99999")
        if not self.palette_id:
            raise ValueError("palette name must be nonempty")


def scene_to_dict(scene: Scene) -> dict[str, Any]:
    vp = scene.viewport
    return {
        "expr": scene.expr,
        "center": [vp.center.real, vp.center.imag],
        "scale": vp.scale,
        "width": vp.width,
        "height": vp.height,
        "log_k": scene.log_k,
        "max_iter": scene.max_iter,
        "palette": scene.palette_id,
    }


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def scene_from_dict(data: dict[str, Any]) -> Scene:
    _require(isinstance(data, dict), "scene must be a JSON object")
    missing = SCENE_KEYS - data.keys()
    _require(not missing, f"scene is missing keys: {', '.join(sorted(missing))}")
    unknown = data.keys() - SCENE_KEYS
    _require(not unknown, f"scene has unknown keys: {', '.join(sorted(unknown))}")
    center = data["center"]
    _require(
        isinstance(center, (list, tuple))
        and len(center) == 2
        and all(isinstance(v, (int, float)) for v in center),
        "center must be a [re, im] pair of numbers",
    )
    for key in ("scale", "log_k"):
        _require(isinstance(data[key], (int, float)), f"{key} must be a number")
    for key in ("width", "height", "max_iter"):
        _require(
            isinstance(data[key], int) and not isinstance(data[key], bool),
            f"{key} must be an integer",
        )
    _require(isinstance(data["expr"], str), "expr must be a string")
    _require(isinstance(data["palette"], str), "palette must be a string")
    viewport = Viewport(
        center=complex(center[0], center[1]),
        scale=float(data["scale"]),
        width=data["width"],
        height=data["height"],
    )
    return Scene(
        expr=data["expr"],
        viewport=viewport,
        log_k=float(data["log_k"]),
        max_iter=data["max_iter"],
        palette_id=data["palette"],
    )


def dumps_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


def loads_scene(text: str) -> Scene:
    return scene_from_dict(json.loads(text))


def save_scene(scene: Scene, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_scene(scene))


def load_scene(path: str) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_scene(fh.read())
