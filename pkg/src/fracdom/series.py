"""Formal Laurent/Taylor series over exact rational complex coefficients.

Coefficients are pairs of Fractions (arbitrary-precision rationals), so the
series engine never touches floating point; floats appear only at the
evaluate() boundary. Each series carries a truncation order: coefficients of
every degree <= order are exact, higher degrees are unknown. order=None means
the series is an exact finite polynomial (every absent degree is exactly 0).

Order propagation through arithmetic is the load-bearing part:

    add/sub:    min(order_a, order_b)
    mul:        min(low_a + order_b, low_b + order_a)
    reciprocal: order - 2*d where d is the lowest degree (Laurent shift)
    compose:    tracked per term; substituting z^n into an order-p series
                yields order n*p + n - 1

where None behaves as +infinity throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import cplx
from .expr import (
    Add,
    Const,
    Div,
    Expr,
    FnCall,
    Mul,
    Neg,
    Pow,
    Sub,
    VarC,
    VarZ,
)


class NotExpandable(ValueError):
    """Expression has no exact formal series (by construct or by value)."""

    def __init__(self, construct: str, detail: str = ""):
        self.construct = construct
        message = f"not series-expandable: {construct}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True, slots=True)
class QC:
    """Rational complex number: exact re + im*i."""

    re: Fraction
    im: Fraction

    @staticmethod
    def from_complex(v: complex) -> "QC":
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise NotExpandable("non-finite constant")
        return QC(Fraction(v.real), Fraction(v.imag))

    @staticmethod
    def from_int(n: int) -> "QC":
        return QC(Fraction(n), _ZERO)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other: "QC") -> "QC":
        return QC(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QC") -> "QC":
        return QC(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "QC":
        return QC(-self.re, -self.im)

    def __mul__(self, other: "QC") -> "QC":
        return QC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def inverse(self) -> "QC":
        d = self.re * self.re + self.im * self.im
        if d == 0:
            raise ZeroDivisionError("inverse of rational-complex zero")
        return QC(self.re / d, -self.im / d)

    def __truediv__(self, other: "QC") -> "QC":
        return self * other.inverse()

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


QC_ZERO = QC(_ZERO, _ZERO)
QC_ONE = QC(_ONE, _ZERO)


def _min_order(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True, slots=True)
class FormalSeries:
    """Sparse Laurent series; degrees may be negative."""

    coeffs: dict[int, QC]
    order: int | None  # truncation order; None = exact polynomial

    @staticmethod
    def make(coeffs: dict[int, QC], order: int | None) -> "FormalSeries":
        clean = {
            j: v
            for j, v in coeffs.items()
            if not v.is_zero() and (order is None or j <= order)
        }
        return FormalSeries(clean, order)

    @staticmethod
    def zero(order: int | None = None) -> "FormalSeries":
        return FormalSeries({}, order)

    @staticmethod
    def constant(v: QC) -> "FormalSeries":
        return FormalSeries.make({0: v}, None)

    @staticmethod
    def monomial(degree: int, coeff: QC = QC_ONE) -> "FormalSeries":
        return FormalSeries.make({degree: coeff}, None)

    def is_zero(self) -> bool:
        return not self.coeffs

    def lowest_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero series has no lowest degree")
        return min(self.coeffs)

    def highest_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero series has no highest degree")
        return max(self.coeffs)

    def coefficient(self, degree: int) -> QC:
        return self.coeffs.get(degree, QC_ZERO)

    def _low_for_order(self) -> int:
        """Lowest known degree, or just past the order for an all-unknown series."""
        if self.coeffs:
            return min(self.coeffs)
        if self.order is None:
            return 0  # exact zero; value irrelevant, product is exact zero
        return self.order + 1

    def truncate(self, order: int) -> "FormalSeries":
        new_order = order if self.order is None else min(order, self.order)
        return FormalSeries.make(dict(self.coeffs), new_order)

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        out = dict(self.coeffs)
        for j, v in other.coeffs.items():
            out[j] = out.get(j, QC_ZERO) + v
        return FormalSeries.make(out, _min_order(self.order, other.order))

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries({j: -v for j, v in self.coeffs.items()}, self.order)

    def scale(self, k: QC) -> "FormalSeries":
        if k.is_zero():
            return FormalSeries.zero(self.order)
        return FormalSeries({j: v * k for j, v in self.coeffs.items()}, self.order)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        if self.is_zero() and self.order is None:
            return self
        if other.is_zero() and other.order is None:
            return other
        order: int | None = None
        if self.order is not None:
            order = other._low_for_order() + self.order
        if other.order is not None:
            order = _min_order(order, self._low_for_order() + other.order)
        out: dict[int, QC] = {}
        for ja, va in self.coeffs.items():
            for jb, vb in other.coeffs.items():
                j = ja + jb
                if order is not None and j > order:
                    continue
                prev = out.get(j)
                out[j] = va * vb if prev is None else prev + va * vb
        return FormalSeries.make(out, order)

    def pow_int(self, n: int, target_order: int | None = None) -> "FormalSeries":
        if n < 0:
            return self.reciprocal(target_order).pow_int(-n, target_order)
        result = FormalSeries.constant(QC_ONE)
        for _ in range(n):
            result = result * self
        return result

    def reciprocal(self, target_order: int | None = None) -> "FormalSeries":
        """1/series as a Laurent series.

        For a truncated input of order p with lowest degree d the result is
        exact through order p - 2d; an exact-polynomial input needs an
        explicit target_order (its reciprocal is generally infinite).
        """
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero series")
        d = self.lowest_degree()
        if self.order is None and len(self.coeffs) == 1:
            p = None  # reciprocal of a monomial is exact
        elif self.order is not None:
            p = self.order - d  # relative exactness of the normalized series
        elif target_order is not None:
            p = target_order + d  # request enough relative terms
        else:
            raise ValueError("reciprocal of an exact polynomial needs target_order")
        lead = self.coeffs[d]
        lead_inv = lead.inverse()
        if p is None:
            return FormalSeries.monomial(-d, lead_inv)
        # normalized = series / (lead * z^d) = 1 + u, with u of lowest degree >= 1
        u = {j - d: v * lead_inv for j, v in self.coeffs.items() if j != d}
        inv = {0: QC_ONE}  # accumulates (1+u)^-1 = 1 - u + u^2 - ...
        term = {0: QC_ONE}
        for _ in range(p):
            nxt: dict[int, QC] = {}
            for ja, va in term.items():
                for jb, vb in u.items():
                    j = ja + jb
                    if j > p:
                        continue
                    prev = nxt.get(j)
                    prod = va * vb
                    nxt[j] = prod if prev is None else prev + prod
            term = {j: -v for j, v in nxt.items()}
            if not term:
                break
            for j, v in term.items():
                prev = inv.get(j)
                inv[j] = v if prev is None else prev + v
        out = {j - d: v * lead_inv for j, v in inv.items()}
        # relative exactness p maps to absolute order p - d; for a truncated
        # input (p = order - d) that is the Laurent shift order - 2d
        return FormalSeries.make(out, p - d)

    def evaluate(self, z: complex) -> complex:
        total = 0j
        for j, v in self.coeffs.items():
            if j >= 0:
                total += v.to_complex() * cplx.ipow(z, j)
            else:
                total += cplx.cdiv(v.to_complex(), cplx.ipow(z, -j))
        return total


def compose(outer: FormalSeries, inner: FormalSeries) -> FormalSeries:
    """outer(inner), requiring inner to vanish at 0 (lowest degree >= 1).

    Negative outer degrees (Laurent, e.g. cotan) substitute via reciprocal.
    """
    if inner.is_zero():
        if any(j < 0 for j in outer.coeffs):
            raise NotExpandable("function argument", "pole at an identically-zero argument")
        zero_low = 1 if inner.order is None else inner.order + 1
        order = None
        if outer.order is not None or inner.order is not None:
            order = (zero_low - 1) if inner.order is not None else None
        return FormalSeries.make({0: outer.coefficient(0)}, order)
    if inner.lowest_degree() < 1:
        raise NotExpandable(
            "function argument", "argument series must vanish at z=0"
        )
    low = inner.lowest_degree()
    order: int | None = None
    if outer.order is not None:
        order = (outer.order + 1) * low - 1
    result = FormalSeries.zero(order)
    if not outer.coeffs:
        return result
    # positive powers, ascending so each multiply reuses the previous power
    pos = sorted(j for j in outer.coeffs if j > 0)
    if pos:
        power = inner
        k = 1
        for j in pos:
            while k < j:
                power = power * inner
                k += 1
            result = result + power.scale(outer.coeffs[j])
    if 0 in outer.coeffs:
        result = result + FormalSeries.constant(outer.coeffs[0])
    neg = sorted((j for j in outer.coeffs if j < 0), reverse=True)
    if neg:
        target = order if order is not None else inner.order
        rec = inner.reciprocal(target)
        power = rec
        k = 1
        for j in neg:
            while k < -j:
                power = power * rec
                k += 1
            result = result + power.scale(outer.coeffs[j])
    return result


# ---------------------------------------------------------------------------
# Primitive series, exact by construction

def sin_series(order: int) -> FormalSeries:
    coeffs: dict[int, QC] = {}
    k = 0
    while 2 * k + 1 <= order:
        j = 2 * k + 1
        coeffs[j] = QC(Fraction((-1) ** k, math.factorial(j)), _ZERO)
        k += 1
    return FormalSeries.make(coeffs, order)


def cos_series(order: int) -> FormalSeries:
    coeffs: dict[int, QC] = {}
    k = 0
    while 2 * k <= order:
        j = 2 * k
        coeffs[j] = QC(Fraction((-1) ** k, math.factorial(j)), _ZERO)
        k += 1
    return FormalSeries.make(coeffs, order)


def exp_series(order: int) -> FormalSeries:
    coeffs = {
        j: QC(Fraction(1, math.factorial(j)), _ZERO) for j in range(order + 1)
    }
    return FormalSeries.make(coeffs, order)


def tan_series(order: int) -> FormalSeries:
    # sin/cos at inflated order so the quotient is exact through `order`
    work = order + 2
    return (sin_series(work) * cos_series(work).reciprocal()).truncate(order)


def cotan_series(order: int) -> FormalSeries:
    work = order + 4
    return (cos_series(work) * sin_series(work).reciprocal()).truncate(order)


_PRIMITIVES = {
    "sin": sin_series,
    "cos": cos_series,
    "tan": tan_series,
    "cotan": cotan_series,
    "exp": exp_series,
}


# ---------------------------------------------------------------------------
# Expression expansion

def _series_raw(expr: Expr, work_order: int) -> FormalSeries:
    match expr:
        case Const(value=v):
            return FormalSeries.constant(QC.from_complex(v))
        case VarZ():
            return FormalSeries.monomial(1)
        case VarC():
            raise NotExpandable("variable c", "c may only appear as a trailing + c")
        case Neg(operand=x):
            return -_series_raw(x, work_order)
        case Add(left=l, right=r):
            return _series_raw(l, work_order) + _series_raw(r, work_order)
        case Sub(left=l, right=r):
            return _series_raw(l, work_order) - _series_raw(r, work_order)
        case Mul(left=l, right=r):
            return _series_raw(l, work_order) * _series_raw(r, work_order)
        case Div(left=l, right=r):
            denom = _series_raw(r, work_order)
            return _series_raw(l, work_order) * denom.reciprocal(work_order)
        case Pow(base=b, exponent=e):
            if not isinstance(e, Const):
                raise NotExpandable("power", "exponent must be a constant integer")
            ev = e.value
            if ev.imag != 0 or ev.real != int(ev.real):
                raise NotExpandable(
                    "power", f"exponent must be a constant integer, got {ev}"
                )
            return _series_raw(b, work_order).pow_int(int(ev.real), work_order)
        case FnCall(name=name, arg=a):
            if name not in _PRIMITIVES:
                raise NotExpandable(f"function {name}")
            inner = _series_raw(a, work_order)
            return compose(_PRIMITIVES[name](work_order), inner)
    raise TypeError(f"not an expression node: {expr!r}")


def polynomial_series(expr: Expr) -> FormalSeries:
    """Exact Laurent-polynomial series of expr; error if transcendental.

    Unlike series_of, the result is never truncated, so the highest
    degree is the expression's true top degree.
    """
    s = _series_raw(expr, 0)
    if s.order is not None:
        raise ValueError("expression is not a finite polynomial in z")
    return s


def series_of(expr: Expr, order: int) -> FormalSeries:
    """Exact series of expr through the given order.

    Internally computed with margin and retried at larger working order if
    reciprocal/composition shifts eat into the requested exactness.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    work = order + 4
    while True:
        s = _series_raw(expr, work)
        if s.order is None or s.order >= order:
            return s.truncate(order)
        if work > 8 * (order + 8):
            raise NotExpandable(
                "order collapse",
                "series order degrades faster than the working order grows",
            )
        work *= 2
