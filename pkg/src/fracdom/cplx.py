"""Total complex arithmetic for escape-time iteration.

Every operation here returns a value instead of raising, so an orbit that
hits a pole or overflows simply produces non-finite components. The escape
test downstream treats any non-finite value as escaped, which makes poles
behave as instant escapes rather than crashes.

Conventions are chosen to agree with numpy's vectorized semantics so the
scalar and batch executors stay interchangeable:

    1/0        -> (inf, nan)       0/0  -> (nan, nan)
    log(0)     -> (-inf, 0)        exp(-inf + nan*i) -> 0
    0^r, r>0   -> 0                0^r, r <= 0 -> non-finite
"""

from __future__ import annotations

import cmath
import math

CNAN = complex(math.nan, math.nan)
CINF = complex(math.inf, math.nan)

# Exponents in this range compile to repeated squaring; beyond it the
# general exp/log form is used.
MAX_INT_POW = 64


def is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def cdiv(a: complex, b: complex) -> complex:
    try:
        return a / b
    except ZeroDivisionError:
        return CNAN if a == 0 else CINF
    except OverflowError:
        return CINF


def ipow(z: complex, n: int) -> complex:
    """z**n by binary exponentiation; n may be negative (reciprocal)."""
    if n < 0:
        return cdiv(complex(1.0), ipow(z, -n))
    result = complex(1.0)
    base = z
    m = n
    while m:
        if m & 1:
            result = result * base
        m >>= 1
        if m:
            base = base * base
    return result


def rpow(z: complex, r: float) -> complex:
    """Principal branch z**r for real r, total at z=0."""
    if z == 0:
        if r > 0:
            return complex(0.0)
        if r == 0:
            return CNAN
        return CINF
    try:
        return cmath.exp(r * cmath.log(z))
    except (OverflowError, ValueError):
        return CINF


def cpow(z: complex, w: complex) -> complex:
    """General power with value-based dispatch.

    Real integer exponents within MAX_INT_POW use exact repeated squaring,
    other real exponents the principal real-power branch, and everything
    else exp(w*log z) with log(0) taken as -inf.
    """
    if w.imag == 0.0:
        r = w.real
        if math.isfinite(r) and r == int(r) and -MAX_INT_POW <= r <= MAX_INT_POW:
            return ipow(z, int(r))
        return rpow(z, r)
    if z == 0:
        lg = complex(-math.inf, 0.0)
    else:
        try:
            lg = cmath.log(z)
        except ValueError:
            lg = CNAN
    try:
        return cmath.exp(w * lg)
    except (OverflowError, ValueError):
        return CINF


def csin(z: complex) -> complex:
    try:
        return cmath.sin(z)
    except (OverflowError, ValueError):
        return CINF


def ccos(z: complex) -> complex:
    try:
        return cmath.cos(z)
    except (OverflowError, ValueError):
        return CINF


def ctan(z: complex) -> complex:
    try:
        return cmath.tan(z)
    except (OverflowError, ValueError):
        return CINF


def ccotan(z: complex) -> complex:
    """cos z / sin z; a pole yields non-finite components, never a raise."""
    try:
        return cdiv(cmath.cos(z), cmath.sin(z))
    except (OverflowError, ValueError):
        return CINF


def cexp(z: complex) -> complex:
    try:
        return cmath.exp(z)
    except (OverflowError, ValueError):
        return CINF


def clog(z: complex) -> complex:
    if z == 0:
        return complex(-math.inf, 0.0)
    try:
        return cmath.log(z)
    except (OverflowError, ValueError):
        return CNAN


def csqrt(z: complex) -> complex:
    try:
        return cmath.sqrt(z)
    except (OverflowError, ValueError):
        return CINF
