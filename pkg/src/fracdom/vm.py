"""Stack bytecode for expression evaluation at per-pixel iteration speed.

compile_expr lowers an AST to a linear instruction list with constant
folding (any variable-free subtree becomes one PUSH) and power
specialization: constant integer exponents in [-64, 64] become POWI
(repeated squaring), other constant real exponents POWR, anything else POWG.

Two executors share the instruction set and must agree within the oracle
tolerance (the AST evaluator is the reference):

    execute        scalar, one (z, c) pair per call
    execute_batch  numpy arrays of z and c, used by the tile renderer

Non-finite values flow through instructions uninspected; escape detection
belongs to the engine. Programs are immutable and safely shared across
workers; each executor owns a private stack sized by max_stack_depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

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
    eval_ast,
    has_variables,
)

(
    OP_PUSH,
    OP_LOADZ,
    OP_LOADC,
    OP_ADD,
    OP_SUB,
    OP_MUL,
    OP_DIV,
    OP_NEG,
    OP_POWI,
    OP_POWR,
    OP_POWG,
    OP_SIN,
    OP_COS,
    OP_TAN,
    OP_COTAN,
    OP_EXP,
    OP_LOG,
    OP_SQRT,
) = range(18)

OP_NAMES = (
    "PUSH",
    "LOADZ",
    "LOADC",
    "ADD",
    "SUB",
    "MUL",
    "DIV",
    "NEG",
    "POWI",
    "POWR",
    "POWG",
    "SIN",
    "COS",
    "TAN",
    "COTAN",
    "EXP",
    "LOG",
    "SQRT",
)

_FN_OPS = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "tan": OP_TAN,
    "cotan": OP_COTAN,
    "exp": OP_EXP,
    "log": OP_LOG,
    "sqrt": OP_SQRT,
}

_PUSH_OPS = (OP_PUSH, OP_LOADZ, OP_LOADC)
_BINARY_OPS = (OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POWG)

Instruction = tuple[int, object]


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]
    max_stack_depth: int
    source: Expr

    def __len__(self) -> int:
        return len(self.instructions)


def _simulate_stack(instructions: tuple[Instruction, ...]) -> int:
    depth = 0
    max_depth = 0
    for op, _ in instructions:
        if op in _PUSH_OPS:
            depth += 1
        elif op in _BINARY_OPS:
            if depth < 2:
                raise ValueError("stack underflow in compiled program")
            depth -= 1
        else:
            if depth < 1:
                raise ValueError("stack underflow in compiled program")
        max_depth = max(max_depth, depth)
    if depth != 1:
        raise ValueError(f"program leaves {depth} values on the stack, expected 1")
    return max_depth


def _is_small_int(v: complex) -> bool:
    return (
        v.imag == 0.0
        and math.isfinite(v.real)
        and v.real == int(v.real)
        and -cplx.MAX_INT_POW <= v.real <= cplx.MAX_INT_POW
    )


def _emit(expr: Expr, fold: bool, out: list[Instruction]) -> None:
    if fold and not isinstance(expr, Const) and not has_variables(expr):
        out.append((OP_PUSH, eval_ast(expr)))
        return
    match expr:
        case Const(value=v):
            out.append((OP_PUSH, v))
        case VarZ():
            out.append((OP_LOADZ, None))
        case VarC():
            out.append((OP_LOADC, None))
        case Neg(operand=x):
            _emit(x, fold, out)
            out.append((OP_NEG, None))
        case Add(left=l, right=r):
            _emit(l, fold, out)
            _emit(r, fold, out)
            out.append((OP_ADD, None))
        case Sub(left=l, right=r):
            _emit(l, fold, out)
            _emit(r, fold, out)
            out.append((OP_SUB, None))
        case Mul(left=l, right=r):
            _emit(l, fold, out)
            _emit(r, fold, out)
            out.append((OP_MUL, None))
        case Div(left=l, right=r):
            _emit(l, fold, out)
            _emit(r, fold, out)
            out.append((OP_DIV, None))
        case Pow(base=b, exponent=e):
            _emit(b, fold, out)
            if fold and not isinstance(e, Const) and not has_variables(e):
                e = Const(eval_ast(e))
            if isinstance(e, Const):
                if _is_small_int(e.value):
                    out.append((OP_POWI, int(e.value.real)))
                    return
                if e.value.imag == 0.0:
                    out.append((OP_POWR, e.value.real))
                    return
            _emit(e, fold, out)
            out.append((OP_POWG, None))
        case FnCall(name=name, arg=a):
            _emit(a, fold, out)
            out.append((_FN_OPS[name], None))
        case _:
            raise TypeError(f"not an expression node: {expr!r}")


def compile_expr(expr: Expr) -> Program:
    out: list[Instruction] = []
    _emit(expr, True, out)
    instructions = tuple(out)
    return Program(instructions, _simulate_stack(instructions), expr)


def compile_without_folding(expr: Expr) -> Program:
    out: list[Instruction] = []
    _emit(expr, False, out)
    instructions = tuple(out)
    return Program(instructions, _simulate_stack(instructions), expr)


def _fmt_component(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def disassemble(prog: Program) -> str:
    """One instruction per line: PUSH 3+0i / LOADZ / POWI 2 / ..."""
    lines = []
    for op, arg in prog.instructions:
        name = OP_NAMES[op]
        if op == OP_PUSH:
            v: complex = arg  # type: ignore[assignment]
            sign = "-" if (v.imag < 0 or (v.imag == 0 and math.copysign(1, v.imag) < 0)) else "+"
            lines.append(
                f"{name} {_fmt_component(v.real)}{sign}{_fmt_component(abs(v.imag))}i"
            )
        elif op == OP_POWI:
            lines.append(f"{name} {arg}")
        elif op == OP_POWR:
            lines.append(f"{name} {_fmt_component(arg)}")  # type: ignore[arg-type]
        else:
            lines.append(name)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Scalar executor

def execute(prog: Program, z: complex, c: complex) -> complex:
    stack: list[complex] = [0j] * prog.max_stack_depth
    sp = 0
    for op, arg in prog.instructions:
        if op == OP_LOADZ:
            stack[sp] = z
            sp += 1
        elif op == OP_LOADC:
            stack[sp] = c
            sp += 1
        elif op == OP_PUSH:
            stack[sp] = arg  # type: ignore[assignment]
            sp += 1
        elif op == OP_ADD:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == OP_SUB:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] - stack[sp]
        elif op == OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == OP_DIV:
            sp -= 1
            stack[sp - 1] = cplx.cdiv(stack[sp - 1], stack[sp])
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_POWI:
            stack[sp - 1] = cplx.ipow(stack[sp - 1], arg)  # type: ignore[arg-type]
        elif op == OP_POWR:
            stack[sp - 1] = cplx.rpow(stack[sp - 1], arg)  # type: ignore[arg-type]
        elif op == OP_POWG:
            sp -= 1
            stack[sp - 1] = cplx.cpow(stack[sp - 1], stack[sp])
        elif op == OP_SIN:
            stack[sp - 1] = cplx.csin(stack[sp - 1])
        elif op == OP_COS:
            stack[sp - 1] = cplx.ccos(stack[sp - 1])
        elif op == OP_TAN:
            stack[sp - 1] = cplx.ctan(stack[sp - 1])
        elif op == OP_COTAN:
            stack[sp - 1] = cplx.ccotan(stack[sp - 1])
        elif op == OP_EXP:
            stack[sp - 1] = cplx.cexp(stack[sp - 1])
        elif op == OP_LOG:
            stack[sp - 1] = cplx.clog(stack[sp - 1])
        elif op == OP_SQRT:
            stack[sp - 1] = cplx.csqrt(stack[sp - 1])
    return stack[0]


# ---------------------------------------------------------------------------
# Batch executor (numpy)

def _ipow_batch(z, n: int):
    if n < 0:
        return np.divide(np.complex128(1.0), _ipow_batch(z, -n))
    result = np.ones_like(z)
    base = z
    m = n
    while m:
        if m & 1:
            result = result * base
        m >>= 1
        if m:
            base = base * base
    return result


def _rpow_batch(z, r: float):
    out = np.exp(r * np.log(z))
    zero = z == 0
    if zero.any():
        if r > 0:
            out[zero] = 0j
        elif r == 0:
            out[zero] = cplx.CNAN
        else:
            out[zero] = cplx.CINF
    return out


def _cotan_batch(x):
    return np.cos(x) / np.sin(x)


def _pow_general(a, b):
    # exp(w log z) reproduces the scalar zero-conventions through numpy's
    # own inf/nan propagation (log(0) = -inf, exp(-inf + nan i) = 0),
    # except 0^0 where 0 * log(0) is nan while the scalar dispatch routes
    # integer exponents through repeated squaring and yields 1
    out = np.exp(b * np.log(a))
    both_zero = np.broadcast_to((a == 0) & (b == 0), np.shape(out))
    if both_zero.any():
        out = np.where(both_zero, np.complex128(1.0), out)
    return out


_BATCH_BINARY = {
    OP_ADD: (np.add, lambda a, b: a + b),
    OP_SUB: (np.subtract, lambda a, b: a - b),
    OP_MUL: (np.multiply, lambda a, b: a * b),
    OP_DIV: (np.divide, cplx.cdiv),
    OP_POWG: (_pow_general, cplx.cpow),
}

_BATCH_UNARY = {
    OP_NEG: (np.negative, lambda v: -v),
    OP_SIN: (np.sin, cplx.csin),
    OP_COS: (np.cos, cplx.ccos),
    OP_TAN: (np.tan, cplx.ctan),
    OP_COTAN: (_cotan_batch, cplx.ccotan),
    OP_EXP: (np.exp, cplx.cexp),
    OP_LOG: (np.log, cplx.clog),
    OP_SQRT: (np.sqrt, cplx.csqrt),
}


def execute_batch(prog: Program, z: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized execute over arrays of z and c (same shape).

    Pushed constants stay scalar until an operation broadcasts them, so
    constant-heavy programs cost no full-size temporaries.
    """
    stack: list = []
    with np.errstate(all="ignore"):
        for op, arg in prog.instructions:
            if op == OP_LOADZ:
                stack.append(z)
            elif op == OP_LOADC:
                stack.append(c)
            elif op == OP_PUSH:
                stack.append(arg)
            elif op == OP_POWI:
                v = stack[-1]
                if isinstance(v, np.ndarray):
                    stack[-1] = _ipow_batch(v, arg)  # type: ignore[arg-type]
                else:
                    stack[-1] = cplx.ipow(v, arg)  # type: ignore[arg-type]
            elif op == OP_POWR:
                v = stack[-1]
                if isinstance(v, np.ndarray):
                    stack[-1] = _rpow_batch(v, arg)  # type: ignore[arg-type]
                else:
                    stack[-1] = cplx.rpow(v, arg)  # type: ignore[arg-type]
            elif op in _BATCH_BINARY:
                b = stack.pop()
                a = stack[-1]
                np_fn, scalar_fn = _BATCH_BINARY[op]
                if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                    stack[-1] = np_fn(a, b)
                else:
                    stack[-1] = scalar_fn(a, b)
            else:
                v = stack[-1]
                np_fn, scalar_fn = _BATCH_UNARY[op]
                if isinstance(v, np.ndarray):
                    stack[-1] = np_fn(v)
                else:
                    stack[-1] = scalar_fn(v)
    top = stack[0]
    if not isinstance(top, np.ndarray):
        top = np.full(np.shape(z), top, dtype=np.complex128)
    return top
