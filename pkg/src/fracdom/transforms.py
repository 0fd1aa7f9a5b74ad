"""Shape-preserving transforms of iteration maps and their orbit identities.

A left-truncated polynomial (no degree-1 term) can be uniformly rotated by
theta and scaled by u as an image by multiplying each degree-j coefficient
with u^(1-j) * e^(i(j-1)theta) and recentering at b; the induced image
motion of a single power map z^n + c is a clockwise rotation rho =
theta/(n-1) and scale sigma = a^(1/(1-n)).

The verify_* functions check the three orbit identities by independent dual
iteration. The identities are exact in exact arithmetic, and the returned
deviation is supposed to measure the identity, not accumulated rounding:
near Julia-boundary orbits float64 noise amplifies chaotically (worst cases
measured around 1e-4), so the dual orbits run at 120-bit precision, keeping
deviations many orders below the 1e-9 everywhere that matters. The overflow
guard stops a trial before recording anything once |z| exceeds 1e6.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

from . import cplx
from . import series as series_mod
from .expr import Add, Const, Div, Expr, FnCall, Mul, Neg, Pow, Sub, VarC, VarZ

OVERFLOW_GUARD = 1e6
# The dual orbit amplifies the rotation/scale factor's representation
# error by ~n |z|^(n-1) per step (the map's derivative), so a chaotic
# 30-step orbit can magnify it by 1e40 or more before the guard trips.
# 512 bits keeps the seed error ~1e-154, leaving deviations far below
# any sub-1e-9 acceptance threshold even for worst-case orbits.
_ORBIT_PRECISION_BITS = 512

_SNAP_EPS = 1e-14


class TruncationError(ValueError):
    """A degree-1 term is present; the transform vector excludes it."""


def snap_unit(w: complex, eps: float = _SNAP_EPS) -> complex:
    """Round components within eps of 0 or +-1 to those exact values.

    cis(pi/2) and friends then come out as exact i / -1, so built maps and
    transformed coefficients match their closed forms instead of carrying
    1e-16 trig residue."""
    re, im = w.real, w.imag
    for target in (0.0, 1.0, -1.0):
        if abs(re - target) < eps:
            re = target
        if abs(im - target) < eps:
            im = target
    return complex(re, im)


def _cis(theta: float) -> complex:
    return snap_unit(cmath.exp(1j * theta))


@dataclass(frozen=True)
class SparseLaurentPolynomial:
    """Finitely many terms coeff * (z - center)^degree; degrees may be negative."""

    terms: dict[int, complex]
    center: complex = 0j

    @staticmethod
    def make(terms: dict[int, complex], center: complex = 0j) -> "SparseLaurentPolynomial":
        return SparseLaurentPolynomial(
            {j: v for j, v in terms.items() if v != 0}, center
        )

    def is_empty(self) -> bool:
        return not self.terms

    def lowest_degree(self) -> int:
        if not self.terms:
            raise ValueError("empty polynomial has no lowest degree")
        return min(self.terms)

    def highest_degree(self) -> int:
        if not self.terms:
            raise ValueError("empty polynomial has no highest degree")
        return max(self.terms)

    @property
    def is_left_truncated(self) -> bool:
        """All degrees >= 2, with a degree-0 constant optionally allowed."""
        return all(j == 0 or j >= 2 for j in self.terms)

    @property
    def needs_radius_review(self) -> bool:
        """Negative powers change escape behavior; k must be re-examined."""
        return any(j < 0 for j in self.terms)

    def evaluate(self, z: complex) -> complex:
        w = z - self.center
        total = 0j
        for j, coeff in self.terms.items():
            total += coeff * cplx.ipow(w, j)
        return total

    def coefficient(self, degree: int) -> complex:
        return self.terms.get(degree, 0j)


def poly_from_pairs(text: str) -> SparseLaurentPolynomial:
    """Parse "coeff:degree,coeff:degree" pairs, e.g. "1:2,1:3" for z^2+z^3."""
    terms: dict[int, complex] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            coeff_text, degree_text = part.rsplit(":", 1)
            coeff = complex(coeff_text.strip().replace("i", "j"))
            degree = int(degree_text.strip())
        except ValueError as ex:
            raise ValueError(f"bad coefficient:degree pair {part!r}: {ex}") from None
        terms[degree] = terms.get(degree, 0j) + coeff
    if not terms:
        raise ValueError("polynomial text contains no terms")
    return SparseLaurentPolynomial.make(terms)


def poly_from_expr(expr: Expr) -> SparseLaurentPolynomial:
    """Exact Laurent polynomial of an expression, centered at 0."""
    s = series_mod.polynomial_series(expr)
    return SparseLaurentPolynomial.make(
        {j: v.to_complex() for j, v in s.coeffs.items()}
    )


def _center_base(b: complex) -> Expr:
    if b == 0:
        return VarZ()
    if b.real < 0 or (b.real == 0 and b.imag < 0):
        return Add(VarZ(), Const(-b))
    return Sub(VarZ(), Const(b))


def _scaled(coeff: complex, body: Expr) -> Expr:
    if coeff == 1:
        return body
    if coeff == -1:
        return Neg(body)
    return Mul(Const(coeff), body)


def poly_to_expr(poly: SparseLaurentPolynomial) -> Expr:
    """Polynomial as an AST, terms in ascending degree."""
    if poly.is_empty():
        return Const(0j)
    base = _center_base(poly.center)
    acc: Expr | None = None
    for j in sorted(poly.terms):
        coeff = poly.terms[j]
        if j == 0:
            term_body: Expr | None = None
        elif j == 1:
            term_body = base
        else:
            term_body = Pow(base, Const(complex(j)))
        negative_form = coeff.real < 0 or (coeff.real == 0 and coeff.imag < 0)
        mag = -coeff if negative_form else coeff
        term = Const(mag) if term_body is None else _scaled(mag, term_body)
        if acc is None:
            acc = Neg(term) if negative_form else term
        elif negative_form:
            acc = Sub(acc, term)
        else:
            acc = Add(acc, term)
    assert acc is not None
    return acc


def map_expr(poly: SparseLaurentPolynomial) -> Expr:
    """The iteration map AST: polynomial + c."""
    return Add(poly_to_expr(poly), VarC())


@dataclass(frozen=True)
class TransformSpec:
    """Target uniform scale u, rotation theta (radians) and translation b."""

    u_scale: float
    theta: float
    b: complex = 0j

    def __post_init__(self) -> None:
        if not (self.u_scale > 0):
            raise ValueError(f"u_scale must be > 0, got {self.u_scale}")

    @property
    def theta_normalized(self) -> float:
        t = math.remainder(self.theta, math.tau)
        return t if t != -math.pi else math.pi


def transform_polynomial(
    poly: SparseLaurentPolynomial, spec: TransformSpec
) -> SparseLaurentPolynomial:
    """Per-degree multiplier u^(1-j) e^(i(j-1)theta), recentered at spec.b.

    Requires a polynomial centered at 0 with no degree-1 term; degree 0 is
    transformed by the same formula. Negative degrees pass through (the
    escape radius of such maps must be re-examined; see needs_radius_review).
    """
    if poly.center != 0:
        raise ValueError("transform expects a polynomial centered at 0")
    if 1 in poly.terms:
        raise TruncationError(
            "degree-1 term present; the transform vector is defined for "
            "left-truncated polynomials only"
        )
    u = spec.u_scale
    terms: dict[int, complex] = {}
    for j, coeff in poly.terms.items():
        multiplier = u ** (1 - j) * _cis((j - 1) * spec.theta)
        terms[j] = coeff * multiplier
    return SparseLaurentPolynomial.make(terms, spec.b)


# ---------------------------------------------------------------------------
# Map builders

def build_translated(n: float, a: complex) -> Expr:
    """(z - a)^n + c: the fractal of z^n + c translated by a."""
    if not (n > 0):
        raise ValueError(f"power must be > 0, got {n}")
    return Add(Pow(_center_base(a), Const(complex(n))), VarC())


def build_rotated(n: float, theta: float) -> tuple[Expr, float]:
    """e^(i theta) z^n + c and the induced image rotation rho = theta/(n-1).

    For n > 0 the image rotation is clockwise; for n < 0 anti-clockwise.
    """
    if n == 1:
        raise ValueError("rotation is undefined for n = 1")
    coeff = _cis(theta)
    ast = Add(_scaled(coeff, Pow(VarZ(), Const(complex(n)))), VarC())
    return ast, theta / (n - 1)


def build_scaled(n: float, a: float) -> tuple[Expr, float]:
    """a z^n + c and the induced image scale sigma = a^(1/(1-n))."""
    if not (a > 0):
        raise ValueError(f"scale coefficient must be > 0, got {a}")
    if n == 1 or not (n > 0):
        raise ValueError(f"power must be > 0 and != 1, got {n}")
    ast = Add(_scaled(complex(a), Pow(VarZ(), Const(complex(n)))), VarC())
    return ast, a ** (1 / (1 - n))


def build_spt(n: float, a: complex, b: complex) -> Expr:
    """a (z - b)^n + c, the generic shape-preserving transform of z^n + c.

    The image motion is translation b, clockwise rotation arg(a)/(n-1) and
    scale |a|^(1/(1-n)); see spt_motion.
    """
    if n == 1 or not (n > 0):
        raise ValueError(f"power must be > 0 and != 1, got {n}")
    if a == 0:
        raise ValueError("coefficient a must be nonzero")
    return Add(_scaled(snap_unit(a), Pow(_center_base(b), Const(complex(n)))), VarC())


def spt_motion(n: float, a: complex, b: complex) -> dict:
    """Image motion induced by a (z - b)^n + c on the fractal of z^n + c."""
    if n == 1:
        raise ValueError("motion is undefined for n = 1")
    if a == 0:
        raise ValueError("coefficient a must be nonzero")
    return {
        "translation": b,
        "rotation": cmath.phase(a) / (n - 1),
        "rotation_sense": "clockwise" if n > 0 else "anti-clockwise",
        "scale": abs(a) ** (1 / (1 - n)),
    }


def _substitute_z(expr: Expr, replacement: Expr) -> Expr:
    match expr:
        case VarZ():
            return replacement
        case Const() | VarC():
            return expr
        case Neg(operand=x):
            return Neg(_substitute_z(x, replacement))
        case Add(left=l, right=r):
            return Add(_substitute_z(l, replacement), _substitute_z(r, replacement))
        case Sub(left=l, right=r):
            return Sub(_substitute_z(l, replacement), _substitute_z(r, replacement))
        case Mul(left=l, right=r):
            return Mul(_substitute_z(l, replacement), _substitute_z(r, replacement))
        case Div(left=l, right=r):
            return Div(_substitute_z(l, replacement), _substitute_z(r, replacement))
        case Pow(base=b, exponent=e):
            return Pow(_substitute_z(b, replacement), _substitute_z(e, replacement))
        case FnCall(name=name, arg=a):
            return FnCall(name, _substitute_z(a, replacement))
    raise TypeError(f"not an expression node: {expr!r}")


def build_zoom(f: Expr, s: float, phi: float, a: complex) -> Expr:
    """s e^(i phi) f(z - a) + c: zoom/rotate/pan applied through the map."""
    if not (s > 0):
        raise ValueError(f"zoom scale must be > 0, got {s}")
    shifted = _substitute_z(f, _center_base(a))
    coeff = snap_unit(s * _cis(phi))
    return Add(_scaled(coeff, shifted), VarC())


# ---------------------------------------------------------------------------
# Orbit-identity verifiers (dual iteration at extended precision)

def _check_orbit_args(n: float, L: int) -> int:
    if n != int(n) or int(n) < 2:
        raise ValueError(f"orbit identity needs an integer power >= 2, got {n}")
    if L < 1:
        raise ValueError(f"iteration count must be >= 1, got {L}")
    return int(n)


def verify_translation(n: int, a: complex, c: complex, L: int) -> float:
    """Max |t_l - (z_l + a)| over the dual orbits of z^n + c and (z-a)^n + c."""
    n = _check_orbit_args(n, L)
    with mpmath.workprec(_ORBIT_PRECISION_BITS):
        am = mpmath.mpc(a)
        cm = mpmath.mpc(c)
        z = cm
        tc = cm + am
        t = tc
        dev = mpmath.mpf(0)
        for _ in range(L):
            z = z**n + cm
            t = (t - am) ** n + tc
            if abs(z) > OVERFLOW_GUARD:
                break
            d = abs(t - (z + am))
            if d > dev:
                dev = d
        return float(dev)


def verify_rotation(n: int, theta: float, c: complex, L: int) -> float:
    """Max |t_l - e^(-i theta/(n-1)) z_l| for e^(i theta) z^n + c."""
    if n == 1:
        raise ValueError("rotation is undefined for n = 1")
    n = _check_orbit_args(n, L)
    with mpmath.workprec(_ORBIT_PRECISION_BITS):
        cm = mpmath.mpc(c)
        # divide inside mpmath: a float64 theta/(n-1) would seed the dual
        # orbit with a 1e-16 phase error that the dynamics then amplify
        w = mpmath.exp(-mpmath.mpc(0, theta) / (n - 1))
        rot = mpmath.exp(mpmath.mpc(0, theta))
        z = cm
        tc = cm * w
        t = tc
        dev = mpmath.mpf(0)
        for _ in range(L):
            z = z**n + cm
            t = rot * t**n + tc
            if abs(z) > OVERFLOW_GUARD:
                break
            d = abs(t - w * z)
            if d > dev:
                dev = d
        return float(dev)


def verify_scaling(n: int, a: float, c: complex, L: int) -> float:
    """Max |t_l - a^(1/(1-n)) z_l| for a z^n + c."""
    if not (a > 0):
        raise ValueError(f"scale coefficient must be > 0, got {a}")
    if n == 1:
        raise ValueError("scaling is undefined for n = 1")
    n = _check_orbit_args(n, L)
    with mpmath.workprec(_ORBIT_PRECISION_BITS):
        cm = mpmath.mpc(c)
        am = mpmath.mpf(a)
        sigma = am ** (mpmath.mpf(1) / (1 - n))
        z = cm
        tc = cm * sigma
        t = tc
        dev = mpmath.mpf(0)
        for _ in range(L):
            z = z**n + cm
            t = am * t**n + tc
            if abs(z) > OVERFLOW_GUARD:
                break
            d = abs(t - sigma * z)
            if d > dev:
                dev = d
        return float(dev)
