"""HTTP service: tile rendering, map analysis, palette listing.

A thin, stateless layer over the engine and analyzer. Identical
requests produce byte-identical responses; the only mutable state is a
bounded compiled-expression cache and a semaphore that caps concurrent
renders.
"""

from __future__ import annotations

import hashlib
import io
import logging
import os
import threading
from functools import lru_cache

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response

from . import dominance
from .engine import RenderParams, Viewport, colorize, render
from .expr import ExprError, ParseError, UnknownFunctionError, parse
from .palette import Palette, builtin_palettes, load_palette_dir
from .series import NotExpandable
from .vm import Program, compile_expr

log = logging.getLogger("fracdom.service")

MAX_TILE_DIM = 1024
EXPR_CACHE_SIZE = 64


@lru_cache(maxsize=EXPR_CACHE_SIZE)
def _compiled(expr_text: str) -> Program:
    # lru_cache does not memoize raised errors, so bad expressions are
    # re-parsed (and re-reported) on every request.
    return compile_expr(parse(expr_text))


def _error_json(status: int, exc: Exception) -> JSONResponse:
    body: dict = {"error": str(exc)}
    if isinstance(exc, (ParseError, UnknownFunctionError)):
        body["offset"] = exc.offset
    return JSONResponse(status_code=status, content=body)


def _etag_for(parts: tuple) -> str:
    digest = hashlib.sha256("\x1f".join(map(repr, parts)).encode()).hexdigest()
    return f'"{digest[:32]}"'


def create_app(
    workers: int | None = None,
    palette_dir: str | None = None,
    frontend_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="fracdom tile service")
    max_renders = workers if workers else (os.cpu_count() or 1)
    render_gate = threading.Semaphore(max_renders)

    palettes: dict[str, Palette] = builtin_palettes()
    if palette_dir:
        palettes.update(
            load_palette_dir(palette_dir, warn=lambda msg: log.warning("%s", msg))
        )

    @app.get("/api/tile")
    def get_tile(
        request: Request,
        expr: str,
        center_re: float,
        center_im: float,
        scale: float,
        width: int,
        height: int,
        log_k: float,
        max_iter: int,
        palette: str = Query(default="gray256"),
    ) -> Response:
        if width > MAX_TILE_DIM or height > MAX_TILE_DIM:
            return JSONResponse(
                status_code=413,
                content={
                    "error": f"tile dimensions are capped at {MAX_TILE_DIM}",
                    "width": width,
                    "height": height,
                },
            )
        try:
            program = _compiled(expr)
            viewport = Viewport(
                center=complex(center_re, center_im),
                scale=scale,
                width=width,
                height=height,
            )
            params = RenderParams(
                program=program,
                log_k=log_k,
                max_iter=max_iter,
                palette_id=palette,
            )
            if palette not in palettes:
                raise ValueError(f"unknown palette {palette!r}")
        except ExprError as exc:
            return _error_json(400, exc)
        except ValueError as exc:
            return _error_json(400, exc)
        etag = _etag_for(
            (expr, center_re, center_im, scale, width, height, log_k, max_iter,
             palette)
        )
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        with render_gate:
            grid = render(viewport, params, workers=1)
        image = colorize(grid, palettes[palette])

        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(image, mode="RGB").save(buf, format="PNG")
        return Response(
            content=buf.getvalue(),
            media_type="image/png",
            headers={"ETag": etag, "Cache-Control": "public, max-age=3600"},
        )

    @app.post("/api/analyze")
    async def post_analyze(body: dict) -> JSONResponse:
        expr_text = body.get("expr")
        if not isinstance(expr_text, str):
            return JSONResponse(
                status_code=400, content={"error": "body must include 'expr' text"}
            )
        order = body.get("order", dominance.DEFAULT_EXPANSION_ORDER)
        if not isinstance(order, int) or not (0 <= order <= 64):
            return JSONResponse(
                status_code=400, content={"error": "order must be an int in [0, 64]"}
            )
        try:
            report = dominance.predict_embedded(parse(expr_text), order)
        except ExprError as exc:
            return _error_json(400, exc)
        except NotExpandable as exc:
            return JSONResponse(
                status_code=422,
                content={"error": str(exc), "construct": exc.construct},
            )
        except ValueError as exc:
            return _error_json(400, exc)
        return JSONResponse(content=dominance.report_to_dict(report))

    @app.get("/api/palettes")
    def get_palettes() -> list[dict]:
        return [pal.describe() for pal in palettes.values()]

    if frontend_dir and os.path.isdir(frontend_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True))

    return app
