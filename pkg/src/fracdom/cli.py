"""Command-line entry point.

Subcommands: render a scene file to PNG, analyze a map's embedded
Multibrot, transform a truncated polynomial map, verify the transform
identities numerically, and serve the tile API.

Exit codes: 0 on success, 2 on domain errors (bad parameter values,
unsupported constructs), 1 on IO and parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time

from . import dominance, transforms
from .engine import RenderParams, Viewport, colorize, render
from .expr import ExprError, parse
from .palette import builtin_palettes, load_palette_dir
from .scene import load_scene
from .vm import compile_expr, disassemble

_ANGLE_SNAP_UNIT = math.pi / 12
_ANGLE_SNAP_TOL = 1e-3


def _snap_angle(theta: float) -> float:
    """Treat angles a hair from a multiple of pi/12 as exactly that multiple.

    Humans type "1.5708" meaning pi/2; keeping the angle exact lets the
    transformed coefficients come out as exact units (i, -1, ...).
    Multiples of pi/12 are 0.26 apart, so a 1e-3 window is unambiguous.
    """
    k = round(theta / _ANGLE_SNAP_UNIT)
    exact = k * _ANGLE_SNAP_UNIT
    if theta != exact and abs(theta - exact) <= _ANGLE_SNAP_TOL:
        return exact
    return theta


def _complex_pair(text: str) -> complex:
    # argparse maps ValueError from type= to a usage error; cmd_analyze
    # reuses this directly, where ValueError means a domain error.
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected re,im (e.g. '1,0'), got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError("must be a positive integer")
    return value


def _load_palettes(palette_dir: str | None, warn) -> dict:
    palettes = builtin_palettes()
    if palette_dir:
        palettes.update(load_palette_dir(palette_dir, warn=warn))
    return palettes


def cmd_render(args: argparse.Namespace) -> int:
    scene = load_scene(args.scene)
    program = compile_expr(parse(scene.expr))
    if args.dump_bytecode:
        print(disassemble(program), file=sys.stderr)
    palettes = _load_palettes(
        args.palette_dir, lambda msg: print(f"warning: {msg}", file=sys.stderr)
    )
    if scene.palette_id not in palettes:
        raise ValueError(
            f"unknown palette {scene.palette_id!r}; "
            f"available: {', '.join(sorted(palettes))}"
        )
    params = RenderParams(
        program=program,
        log_k=scene.log_k,
        max_iter=scene.max_iter,
        palette_id=scene.palette_id,
    )
    started = time.perf_counter()
    grid = render(scene.viewport, params, workers=args.workers)
    elapsed = time.perf_counter() - started
    image = colorize(grid, palettes[scene.palette_id])

    from PIL import Image

    Image.fromarray(image, mode="RGB").save(args.out, format="PNG")
    if args.grid_out:
        with open(args.grid_out, "wb") as fh:
            fh.write(grid.to_bytes())
    pixels = grid.m.size
    escaped = 1.0 - grid.interior_fraction()
    print(
        f"{pixels} pixels, escaped fraction {escaped:.4f}, {elapsed:.2f}s"
        f" -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    if args.tg:
        a_text, b_text, n_text = args.tg
        result = dominance.analyze_tg(
            _complex_pair(a_text), _complex_pair(b_text), int(n_text)
        )
        from .expr import format_expr

        payload = {
            "exact": format_expr(result.exact),
            "approx": format_expr(result.approx),
            "predicted_order": result.predicted_order,
        }
        print(json.dumps(payload, indent=2))
        return 0
    if not args.expr:
        raise ValueError("analyze needs --expr or --tg")
    regime = (
        dominance.REGIME_INFINITY if args.regime == "inf" else dominance.REGIME_ZERO
    )
    report = dominance.predict_embedded(parse(args.expr), args.order, regime)
    print(json.dumps(dominance.report_to_dict(report), indent=2))
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    if (args.poly is None) == (args.expr is None):
        raise ValueError("transform needs exactly one of --poly or --expr")
    if args.poly is not None:
        poly = transforms.poly_from_pairs(args.poly)
    else:
        from .expr import Add, VarC

        tree = parse(args.expr)
        # maps are written "f(z) + c"; the transform acts on f alone
        if isinstance(tree, Add) and isinstance(tree.right, VarC):
            tree = tree.left
        poly = transforms.poly_from_expr(tree)
    spec = transforms.TransformSpec(
        u_scale=args.scale_u,
        theta=_snap_angle(args.theta),
        b=args.shift,
    )
    transformed = transforms.transform_polynomial(poly, spec)
    from .expr import format_expr

    print(format_expr(transforms.map_expr(transformed)))
    if transformed.needs_radius_review:
        print(
            "note: negative powers present; review the escape radius for this map",
            file=sys.stderr,
        )
    if args.scale_u != 1.0:
        print(
            "note: escape radius is not recomputed for the scaled map",
            file=sys.stderr,
        )
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(args.seed)

    def sample_c() -> complex:
        r = math.sqrt(rng.random())
        phi = 2.0 * math.pi * rng.random()
        return complex(r * math.cos(phi), r * math.sin(phi))

    worst = 0.0
    for _ in range(args.trials):
        c = sample_c()
        if args.theorem == "translation":
            dev = transforms.verify_translation(args.n, args.shift, c, args.length)
        elif args.theorem == "rotation":
            dev = transforms.verify_rotation(args.n, args.theta, c, args.length)
        else:
            dev = transforms.verify_scaling(args.n, args.scale, c, args.length)
        worst = max(worst, dev)
    ok = worst <= args.tolerance
    payload = {
        "theorem": args.theorem,
        "n": args.n,
        "trials": args.trials,
        "orbit_length": args.length,
        "max_deviation": worst,
        "tolerance": args.tolerance,
        "ok": ok,
    }
    print(json.dumps(payload, indent=2))
    return 0 if ok else 2


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        workers=args.workers,
        palette_dir=args.palette_dir,
        frontend_dir=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdom",
        description="Escape-time fractal renderer, transformer, and analyzer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render a scene JSON file to PNG")
    p_render.add_argument("scene", help="path to the scene JSON file")
    p_render.add_argument("-o", "--out", required=True, help="output PNG path")
    p_render.add_argument(
        "--workers", type=_positive_int, default=None, help="render worker count"
    )
    p_render.add_argument(
        "--palette-dir", default=None, help="directory of extra palette JSON files"
    )
    p_render.add_argument(
        "--grid-out",
        default=None,
        help="also dump the iteration grid as flat little-endian u32, row-major",
    )
    p_render.add_argument(
        "--dump-bytecode",
        action="store_true",
        help="print the compiled program, one instruction per line, to stderr",
    )
    p_render.set_defaults(func=cmd_render)

    p_analyze = sub.add_parser(
        "analyze", help="predict the embedded Multibrot order of a map"
    )
    p_analyze.add_argument("--expr", default=None, help="map text, e.g. 'cos(z)-1+c'")
    p_analyze.add_argument(
        "--order", type=int, default=dominance.DEFAULT_EXPANSION_ORDER,
        help="series expansion order",
    )
    p_analyze.add_argument(
        "--regime", choices=("zero", "inf"), default="zero",
        help="limit regime for the dominant term",
    )
    p_analyze.add_argument(
        "--tg", nargs=3, metavar=("A", "B", "N"), default=None,
        help="analyze (a/z - z/b)^n + c; a and b as re,im pairs",
    )
    p_analyze.set_defaults(func=cmd_analyze)

    p_transform = sub.add_parser(
        "transform", help="scale/rotate/shift a truncated polynomial map"
    )
    p_transform.add_argument(
        "--poly", default=None,
        help="coefficient:degree pairs, e.g. '1:2,1:3' for z^2+z^3",
    )
    p_transform.add_argument("--expr", default=None, help="polynomial expression text")
    p_transform.add_argument(
        "--scale-u", type=float, default=1.0, help="zoom factor u > 0"
    )
    p_transform.add_argument(
        "--theta", type=float, default=0.0,
        help="rotation angle in radians (near-multiples of pi/12 snap exact)",
    )
    p_transform.add_argument(
        "--shift", type=_complex_pair, default=0j,
        help="recenter point b as re,im",
    )
    p_transform.set_defaults(func=cmd_transform)

    p_verify = sub.add_parser(
        "verify", help="check a transform identity on random orbits"
    )
    p_verify.add_argument(
        "--theorem", required=True, choices=("translation", "rotation", "scaling")
    )
    p_verify.add_argument("--n", type=int, default=2, help="map power n >= 2")
    p_verify.add_argument(
        "--theta", type=float, default=math.pi / 2, help="rotation angle (rotation)"
    )
    p_verify.add_argument(
        "--shift", type=_complex_pair, default=1 + 0j,
        help="translation offset a as re,im (translation)",
    )
    p_verify.add_argument(
        "--scale", type=float, default=2.0, help="scale factor a > 0 (scaling)"
    )
    p_verify.add_argument("--trials", type=_positive_int, default=1000)
    p_verify.add_argument(
        "--length", type=_positive_int, default=30, help="orbit length per trial"
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tolerance", type=float, default=1e-9)
    p_verify.set_defaults(func=cmd_verify)

    p_serve = sub.add_parser("serve", help="run the tile/analysis HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument(
        "--workers", type=_positive_int, default=None,
        help="max concurrent renders",
    )
    p_serve.add_argument("--palette-dir", default=None)
    p_serve.add_argument(
        "--frontend", default=None, help="static frontend directory to mount at /"
    )
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
