"""Dominant-term analysis of iteration maps.

Near a point, an analytic map is sandwiched (in modulus) between constant
multiples of its lowest-degree series term, so the fractal of ``f(z) + c``
contains embedded copies of the Multibrot ``z^m + c`` where ``m`` is that
dominant degree.  This module extracts dominant terms from exact series,
checks the modulus sandwich empirically, classifies which embedded
Multibrot (if any) a map carries, and analyzes the reciprocal-pole family
``(a/z - z/b)^n + c`` whose linearization near z = 1 is a scaled and
rotated Multibrot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expr import Add, Const, Div, Expr, Mul, Pow, Sub, VarC, VarZ, format_expr
from .series import (
    QC,
    FormalSeries,
    NotExpandable,
    compose,
    polynomial_series,
    series_of,
)
from .vm import compile_expr, execute_batch

__all__ = [
    "Regime",
    "REGIME_ZERO",
    "REGIME_INFINITY",
    "regime_at",
    "EmptySeries",
    "InfinityOnTruncated",
    "DominantTerm",
    "dominant_term",
    "CircleSample",
    "ThetaBoundReport",
    "check_theta_bound",
    "CLASS_MULTIBROT",
    "CLASS_LINEAR",
    "CLASS_POLE",
    "CLASS_CONSTANT",
    "DominanceReport",
    "predict_embedded",
    "TgAnalysis",
    "analyze_tg",
    "iterate_theta_consistency",
    "report_to_dict",
    "NotExpandable",
]

DEFAULT_EXPANSION_ORDER = 12
DEGREE_GUARD = 10_000


@dataclass(frozen=True, slots=True)
class Regime:
    """Limit regime for dominance: toward 0, toward infinity, or a point."""

    kind: str  # "zero" | "infinity" | "point"
    point: complex | None = None

    def describe(self) -> str:
        if self.kind == "point":
            return f"z -> {self.point}"
        return "z -> 0" if self.kind == "zero" else "z -> infinity"


REGIME_ZERO = Regime("zero")
REGIME_INFINITY = Regime("infinity")


def regime_at(point: complex) -> Regime:
    return Regime("point", complex(point))


class EmptySeries(ValueError):
    """The series has no known nonzero term to dominate."""


class InfinityOnTruncated(ValueError):
    """Highest-degree queries need the full polynomial, not a truncation."""


@dataclass(frozen=True, slots=True)
class DominantTerm:
    degree: int
    coefficient: QC


def dominant_term(series: FormalSeries, regime: Regime) -> DominantTerm:
    """Dominant monomial of a series in the given limit regime.

    Toward zero the lowest-degree term dominates; toward infinity the
    highest.  The infinity query is refused on truncated series, where
    the true top degree is unknown.
    """
    if not series.coeffs:
        raise EmptySeries("series has no nonzero terms")
    if regime.kind == "zero":
        d = min(series.coeffs)
    elif regime.kind == "infinity":
        if series.order is not None:
            raise InfinityOnTruncated(
                "highest-degree term of a truncated series is unknown"
            )
        d = max(series.coeffs)
    else:
        raise ValueError("dominant_term supports the zero and infinity regimes")
    return DominantTerm(d, series.coeffs[d])


@dataclass(frozen=True, slots=True)
class CircleSample:
    """Empirical modulus-ratio extrema on one sampling circle."""

    radius: float
    k1: float
    k2: float

    def spread(self) -> float:
        return self.k2 / self.k1 if self.k1 > 0 else math.inf


@dataclass(frozen=True, slots=True)
class ThetaBoundReport:
    """Empirical two-sided modulus bound |f(z)| vs |(z - z0)^m| near z0."""

    regime: Regime
    dominant_degree: int
    k1: float
    k2: float
    samples: int
    disk_radius: float
    circles: tuple[CircleSample, ...]
    holds: bool
    tightening: bool
    note: str


def check_theta_bound(
    f: Expr,
    m: int,
    radius: float,
    samples: int = 256,
    center: complex = 0j,
) -> ThetaBoundReport:
    """Sample |f(z)| / |z - center|^m on three shrinking circles.

    Circles of radius {radius, radius/2, radius/4} about ``center`` are
    sampled uniformly; k1/k2 are the min/max ratios over all samples.
    The bound is reported as failing when the ratios are not finite and
    positive, or when k2 blows up as the circles shrink (the max ratio
    on the smallest circle more than doubles the one on the largest),
    which is the signature of querying a non-dominant degree.

    The variable c, if present in ``f``, evaluates as 0.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if samples < 100:
        raise ValueError("at least 100 samples are required")
    prog = compile_expr(f)
    center = complex(center)
    circles: list[CircleSample] = []
    for r in (radius, radius / 2.0, radius / 4.0):
        # Half-step offset keeps samples off the axis-aligned extrema, so
        # the empirical min/max sit strictly inside the exact range rather
        # than one rounding error outside it.
        angles = 2.0 * math.pi * (np.arange(samples) + 0.5) / samples
        z = center + r * np.exp(1j * angles)
        values = execute_batch(prog, z, np.zeros_like(z))
        ratio = np.abs(values) / r**m
        circles.append(CircleSample(r, float(np.min(ratio)), float(np.max(ratio))))
    k1 = min(c.k1 for c in circles)
    k2 = max(c.k2 for c in circles)
    finite = math.isfinite(k1) and math.isfinite(k2) and k1 > 0
    tightening = finite and not (circles[-1].k2 > 2.0 * circles[0].k2)
    holds = finite and tightening
    if holds:
        note = ""
    elif not finite:
        note = "ratio |f(z)|/|z^m| is not finite and positive on the sampled circles"
    else:
        note = (
            "bound not tightening: max ratio grows as the circles shrink, "
            f"so degree {m} does not dominate toward {center}"
        )
    regime = REGIME_ZERO if center == 0 else regime_at(center)
    return ThetaBoundReport(
        regime=regime,
        dominant_degree=m,
        k1=k1,
        k2=k2,
        samples=3 * samples,
        disk_radius=radius,
        circles=tuple(circles),
        holds=holds,
        tightening=tightening,
        note=note,
    )


CLASS_MULTIBROT = "EmbeddedMultibrot"
CLASS_LINEAR = "LinearTermBlocks"
CLASS_POLE = "LaurentPole"
CLASS_CONSTANT = "ConstantOnly"


@dataclass(frozen=True, slots=True)
class DominanceReport:
    """Embedded-fractal prediction for an iteration map."""

    input_expr: Expr
    series: FormalSeries
    regime: Regime
    predicted_order: int | None
    classification: str
    note: str
    suggested_radius: float | None


def _strip_trailing_c(expr: Expr) -> Expr:
    if isinstance(expr, Add) and isinstance(expr.right, VarC):
        return expr.left
    return expr


def _suggest_radius(series: FormalSeries, low: int) -> float:
    """Disk radius where the dominant term is at least 4x the runner-up."""
    rest = sorted(d for d in series.coeffs if d > low)
    if not rest:
        return 1.0
    d2 = rest[0]
    a1 = abs(series.coeffs[low].to_complex())
    a2 = abs(series.coeffs[d2].to_complex())
    if a2 == 0.0:
        return 1.0
    return min(1.0, (a1 / (4.0 * a2)) ** (1.0 / (d2 - low)))


def _predict_at_infinity(expr: Expr, body: Expr) -> DominanceReport:
    try:
        series = polynomial_series(body)
    except ValueError as exc:
        raise InfinityOnTruncated(
            "the map is not a finite polynomial, so its top degree is unknown"
        ) from exc
    shape = {d: v for d, v in series.coeffs.items() if d != 0}
    predicted: int | None = None
    if not shape or max(shape) < 1:
        classification = CLASS_CONSTANT
        note = "no growing term; the map stays bounded toward infinity"
    elif max(shape) == 1:
        classification = CLASS_LINEAR
        note = "a linear term dominates toward infinity; no power map emerges"
    else:
        classification = CLASS_MULTIBROT
        predicted = max(shape)
        note = f"degree {predicted} dominates toward infinity"
    return DominanceReport(
        input_expr=expr,
        series=series,
        regime=REGIME_INFINITY,
        predicted_order=predicted,
        classification=classification,
        note=note,
        suggested_radius=None,
    )


def predict_embedded(
    expr: Expr,
    order: int = DEFAULT_EXPANSION_ORDER,
    regime: Regime = REGIME_ZERO,
) -> DominanceReport:
    """Predict the embedded Multibrot order of a map ``f(z) + c``.

    A trailing ``+ c`` is stripped, the body is expanded about the
    origin, and the constant term is discarded (it shifts the parameter
    c, not the shape).  The lowest remaining degree ``l`` classifies the
    map: l >= 2 embeds a Multibrot of order l; l == 1 blocks prediction
    (no clean dominant power survives a linear term); negative degrees
    flag a pole at the origin; a bare constant has no dynamics to
    classify.

    In the infinity regime the highest degree classifies instead, and
    the map must be a finite polynomial.
    """
    body = _strip_trailing_c(expr)
    if regime.kind == "infinity":
        return _predict_at_infinity(expr, body)
    if regime.kind != "zero":
        raise ValueError("prediction supports the zero and infinity regimes")
    series = series_of(body, order)
    shape = {d: v for d, v in series.coeffs.items() if d != 0}
    had_constant = 0 in series.coeffs
    predicted: int | None = None
    suggested: float | None = None
    if any(d < 0 for d in shape):
        classification = CLASS_POLE
        note = (
            "negative powers of z present; pole-family maps of the form "
            "(a/z - z/b)^n + c are handled by analyze_tg"
        )
    elif not shape:
        classification = CLASS_CONSTANT
        note = "no nonconstant terms up to the expansion order; the map only shifts c"
    else:
        low = min(shape)
        if low == 1:
            classification = CLASS_LINEAR
            note = (
                "a linear term dominates toward 0, so no Multibrot of order "
                ">= 2 is predicted"
            )
        else:
            classification = CLASS_MULTIBROT
            predicted = low
            suggested = _suggest_radius(series, low)
            coeff = shape[low]
            sign = "+" if coeff.im >= 0 else ""
            note = (
                f"dominant term ({coeff.re}{sign}{coeff.im}i)*z^{low} near 0; expect "
                f"embedded copies of z^{low} + c within about |z| <= {suggested:.3g}"
            )
    if had_constant and classification != CLASS_CONSTANT:
        note += "; a constant series term was absorbed into c"
    return DominanceReport(
        input_expr=expr,
        series=series,
        regime=REGIME_ZERO,
        predicted_order=predicted,
        classification=classification,
        note=note,
        suggested_radius=suggested,
    )


@dataclass(frozen=True, slots=True)
class TgAnalysis:
    """Exact and linearized forms of the map ((a/z - z/b)^n + c)."""

    exact: Expr
    approx: Expr
    predicted_order: int


def analyze_tg(a: complex, b: complex, n: int) -> TgAnalysis:
    """Analyze the reciprocal-pole family g(z) = a/z - z/b raised to n.

    Returns the exact map ``(a/z - z/b)^n + c`` together with its
    linearization about z = 1, ``(2a - z*(a + 1/b))^n + c``, an affine
    map whose n-th power embeds a Multibrot of order n.
    """
    a = complex(a)
    b = complex(b)
    if a == 0:
        raise ValueError("parameter a must be nonzero")
    if b == 0:
        raise ValueError("parameter b must be nonzero")
    if n < 2:
        raise ValueError("power n must be at least 2")
    g = Sub(Div(Const(a), VarZ()), Div(VarZ(), Const(b)))
    exact = Add(Pow(g, Const(complex(n))), VarC())
    linear = Sub(Const(2.0 * a), Mul(Const(a + 1.0 / b), VarZ()))
    approx = Add(Pow(linear, Const(complex(n))), VarC())
    return TgAnalysis(exact=exact, approx=approx, predicted_order=n)


def iterate_theta_consistency(
    f_series: FormalSeries, m: int, n_iter: int
) -> bool:
    """Check that n-fold self-composition has lowest degree m**n_iter.

    Requires an exact finite polynomial whose dominant degree toward 0
    is ``m``.  Composition degree grows as m**n_iter, so n_iter is
    capped at 4 and the composed degree at 10^4.
    """
    if f_series.order is not None:
        raise ValueError("self-composition requires an exact finite polynomial")
    if not (1 <= n_iter <= 4):
        raise ValueError("n_iter must be between 1 and 4")
    low = dominant_term(f_series, REGIME_ZERO).degree
    if low != m:
        raise ValueError(f"dominant degree toward 0 is {low}, not {m}")
    if m**n_iter > DEGREE_GUARD:
        raise ValueError(
            f"composed degree {m}^{n_iter} exceeds the {DEGREE_GUARD} guard"
        )
    composed = f_series
    for _ in range(n_iter - 1):
        composed = compose(f_series, composed)
    return dominant_term(composed, REGIME_ZERO).degree == m**n_iter


def _qc_str(v: QC) -> dict[str, str]:
    return {"re": str(v.re), "im": str(v.im)}


def report_to_dict(report: DominanceReport) -> dict:
    """JSON-ready form of a DominanceReport; rationals stay exact strings."""
    terms = [
        {"degree": d, **_qc_str(v)}
        for d, v in sorted(report.series.coeffs.items())
    ]
    return {
        "expr": format_expr(report.input_expr),
        "classification": report.classification,
        "predicted_order": report.predicted_order,
        "regime": report.regime.describe(),
        "note": report.note,
        "suggested_radius": report.suggested_radius,
        "series": {"order": report.series.order, "terms": terms},
    }
