"""Shared hypothesis strategies for expression ASTs."""

from __future__ import annotations

import cmath

from hypothesis import strategies as st

from fracdom.expr import (
    FUNCTIONS,
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
    fold_constants,
)

_safe_reals = st.one_of(
    st.integers(min_value=0, max_value=9).map(float),
    st.floats(
        allow_nan=False,
        allow_infinity=False,
        min_value=-1e3,
        max_value=1e3,
    ),
)

consts = st.builds(lambda re, im: Const(complex(re, im)), _safe_reals, _safe_reals)
leaves = st.one_of(st.builds(VarZ), st.builds(VarC), consts)


def _extend(children: st.SearchStrategy[Expr]) -> st.SearchStrategy[Expr]:
    binary = st.sampled_from((Add, Sub, Mul, Div, Pow))
    return st.one_of(
        st.builds(Neg, children),
        st.builds(lambda op, a, b: op(a, b), binary, children, children),
        st.builds(FnCall, st.sampled_from(FUNCTIONS), children),
    )


raw_exprs = st.recursive(leaves, _extend, max_leaves=12)


def consts_finite(tree: Expr) -> bool:
    """True when every literal in the tree is a finite complex number."""
    match tree:
        case Const(value=v):
            return cmath.isfinite(v)
        case VarZ() | VarC():
            return True
        case Neg(operand=a) | FnCall(arg=a):
            return consts_finite(a)
        case Add(left=a, right=b) | Sub(left=a, right=b) | Mul(
            left=a, right=b
        ) | Div(left=a, right=b) | Pow(base=a, exponent=b):
            return consts_finite(a) and consts_finite(b)
    raise TypeError(f"unknown node {tree!r}")


# Folded ASTs with finite literals: the canonical parser output space,
# on which format/parse round-trips are exact.
folded_exprs = raw_exprs.map(fold_constants).filter(consts_finite)
