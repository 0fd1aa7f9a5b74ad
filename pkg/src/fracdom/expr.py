"""Expression front end for complex iteration maps in variables z and c.

Grammar (lowest to highest precedence):

    sum     := term (('+' | '-') term)*
    term    := power (('*' | '/') power)*
    power   := unary ('^' power)?          right-associative
    unary   := '-' unary | atom            unary minus binds tighter than '^'
    atom    := NUMBER | IDENT | IDENT '(' sum ')' | '(' sum ')'

so "-z^2" is (-z)^2 and "z^-2" is z^(-2).  NUMBER is a decimal literal with
optional fraction and exponent part ("2e3" is scientific notation, not 2*e*3).
Identifiers: variables z and c; constants i, pi, e (plus inf and nan so that
formatted values always reparse); functions sin, cos, tan, cotan, exp, log,
sqrt.  Implicit multiplication exists only between a numeric literal and a
following identifier or parenthesis: "6(z-sin(z))" means 6*(z-sin(z)).

The parser folds constant-only subtrees ("(1+2)*z" parses as Mul(Const 3, z)),
which is what makes parse/format a true round trip: the grammar has no
negative or complex literals, so format(Const(-2)) = "-2" must come back as a
Const, not Neg(Const 2).  Round-trip equality therefore holds on folded ASTs
(everything parse can produce); a hand-built constant-only subtree reparses
as its folded value.

ASTs are immutable (frozen dataclasses) and safely shareable across threads.
Parsing is reentrant with no global state.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from . import cplx

FUNCTIONS = ("sin", "cos", "tan", "cotan", "exp", "log", "sqrt")

_CONSTANTS: dict[str, complex] = {
    "i": 1j,
    "pi": complex(math.pi),
    "e": complex(math.e),
    "inf": complex(math.inf),
    "nan": complex(math.nan),
}


class ExprError(ValueError):
    """Base for expression front-end errors."""


class ParseError(ExprError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + ", ".join(expected) + ")"
        super().__init__(detail)


class UnknownFunctionError(ExprError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(
            f"unknown function '{name}' at offset {offset}"
            f" (known: {', '.join(FUNCTIONS)})"
        )


class Expr:
    """Base class for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True, slots=True)
class VarZ(Expr):
    pass


@dataclass(frozen=True, slots=True)
class VarC(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True, slots=True)
class FnCall(Expr):
    name: str
    arg: Expr


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>     \s+)
    | (?P<number> (?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<ident>  [A-Za-z_][A-Za-z_0-9]*)
    | (?P<op>     [-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # 'number' | 'ident' | 'op' | 'end'
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        text = m.group()
        # Implicit multiplication: numeric literal directly before an
        # identifier or an opening parenthesis.
        if (
            kind in ("ident", "op")
            and (kind == "ident" or text == "(")
            and tokens
            and tokens[-1].kind == "number"
        ):
            tokens.append(_Token("op", "*", m.start()))
        tokens.append(_Token(kind, text, m.start()))
    tokens.append(_Token("end", "", len(source)))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_ATOM_EXPECTED = ("number", "identifier", "'('", "'-'")


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    def parse(self) -> Expr:
        node = self.parse_sum()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(
                f"unexpected {tok.text!r}", tok.offset, ("operator", "end of input")
            )
        return node

    def parse_sum(self) -> Expr:
        node = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance().text
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_power()
        while self.at_op("*", "/"):
            op = self.advance().text
            rhs = self.parse_power()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_power(self) -> Expr:
        base = self.parse_unary()
        if self.at_op("^"):
            self.advance()
            return Pow(base, self.parse_power())
        return base

    def parse_unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Const(complex(float(tok.text)))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if self.at_op("("):
                if name not in FUNCTIONS:
                    raise UnknownFunctionError(name, tok.offset)
                self.advance()
                arg = self.parse_sum()
                self.expect_close(tok)
                return FnCall(name, arg)
            if name == "z":
                return VarZ()
            if name == "c":
                return VarC()
            if name in _CONSTANTS:
                return Const(_CONSTANTS[name])
            raise ParseError(
                f"unknown identifier {name!r}",
                tok.offset,
                ("z", "c", "i", "pi", "e", "function name"),
            )
        if self.at_op("("):
            open_tok = self.advance()
            node = self.parse_sum()
            self.expect_close(open_tok)
            return node
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, _ATOM_EXPECTED)

    def expect_close(self, open_tok: _Token) -> None:
        tok = self.peek()
        if not self.at_op(")"):
            raise ParseError(
                f"unclosed '(' opened at offset {open_tok.offset}",
                tok.offset,
                ("')'",),
            )
        self.advance()


def parse(source: str) -> Expr:
    """Parse expression text into a constant-folded AST."""
    return fold_constants(_Parser(source).parse())


# ---------------------------------------------------------------------------
# Evaluation

_FN_EVAL = {
    "sin": cplx.csin,
    "cos": cplx.ccos,
    "tan": cplx.ctan,
    "cotan": cplx.ccotan,
    "exp": cplx.cexp,
    "log": cplx.clog,
    "sqrt": cplx.csqrt,
}


def eval_ast(expr: Expr, z: complex = 0j, c: complex = 0j) -> complex:
    """Reference tree-walking evaluator; never raises, non-finite propagates."""
    match expr:
        case Const(value=v):
            return v
        case VarZ():
            return z
        case VarC():
            return c
        case Neg(operand=x):
            return -eval_ast(x, z, c)
        case Add(left=l, right=r):
            return eval_ast(l, z, c) + eval_ast(r, z, c)
        case Sub(left=l, right=r):
            return eval_ast(l, z, c) - eval_ast(r, z, c)
        case Mul(left=l, right=r):
            return eval_ast(l, z, c) * eval_ast(r, z, c)
        case Div(left=l, right=r):
            return cplx.cdiv(eval_ast(l, z, c), eval_ast(r, z, c))
        case Pow(base=b, exponent=e):
            return cplx.cpow(eval_ast(b, z, c), eval_ast(e, z, c))
        case FnCall(name=name, arg=a):
            return _FN_EVAL[name](eval_ast(a, z, c))
    raise TypeError(f"not an expression node: {expr!r}")


def has_variables(expr: Expr) -> bool:
    match expr:
        case VarZ() | VarC():
            return True
        case Const():
            return False
        case Neg(operand=x):
            return has_variables(x)
        case Add(left=l, right=r) | Sub(left=l, right=r) | Mul(left=l, right=r) | Div(
            left=l, right=r
        ):
            return has_variables(l) or has_variables(r)
        case Pow(base=b, exponent=e):
            return has_variables(b) or has_variables(e)
        case FnCall(arg=a):
            return has_variables(a)
    raise TypeError(f"not an expression node: {expr!r}")


def fold_constants(expr: Expr) -> Expr:
    """Collapse every variable-free subtree to a single Const."""
    match expr:
        case Const() | VarZ() | VarC():
            return expr
        case Neg(operand=x):
            folded = fold_constants(x)
            if isinstance(folded, Const):
                return Const(-folded.value)
            return Neg(folded)
        case Add(left=l, right=r) | Sub(left=l, right=r) | Mul(left=l, right=r) | Div(
            left=l, right=r
        ) | Pow(base=l, exponent=r):
            fl, fr = fold_constants(l), fold_constants(r)
            node = type(expr)(fl, fr)
            if isinstance(fl, Const) and isinstance(fr, Const):
                return Const(eval_ast(node))
            return node
        case FnCall(name=name, arg=a):
            fa = fold_constants(a)
            node = FnCall(name, fa)
            if isinstance(fa, Const):
                return Const(eval_ast(node))
            return node
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------------------
# Formatting

def _fmt_real(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _const_text(v: complex) -> tuple[str, str]:
    """Return (text, shape) where shape is 'atom', 'neg' or 'term'."""
    re_, im = v.real, v.imag
    if im == 0.0:
        text = _fmt_real(re_)
        return text, ("neg" if text.startswith("-") else "atom")
    if re_ == 0.0:
        if im == 1.0:
            return "i", "atom"
        if im == -1.0:
            return "-i", "neg"
        # "x*i" is a product term grammatically, whatever the sign of x;
        # labeling negatives "neg" would leave them bare in ^ and * slots
        text = _fmt_real(im) + "*i"
        return text, "term"
    if im == 1.0:
        imag_part = "i"
    elif im == -1.0:
        imag_part = "-i"
    else:
        imag_part = _fmt_real(im) + "*i"
    if imag_part.startswith("-"):
        return f"({_fmt_real(re_)} - {imag_part[1:]})", "atom"
    return f"({_fmt_real(re_)} + {imag_part})", "atom"


def _shape(expr: Expr) -> str:
    """Grammar shape of the node's rendering: how it may appear bare."""
    match expr:
        case Const(value=v):
            return _const_text(v)[1]
        case VarZ() | VarC() | FnCall():
            return "atom"
        case Neg():
            return "neg"
        case Pow():
            return "pow"
        case Mul() | Div():
            return "term"
        case Add() | Sub():
            return "sum"
    raise TypeError(f"not an expression node: {expr!r}")


def _wrap(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def format_expr(expr: Expr) -> str:
    """Canonical text form; parse(format_expr(e)) == e for folded ASTs."""
    match expr:
        case Const(value=v):
            return _const_text(v)[0]
        case VarZ():
            return "z"
        case VarC():
            return "c"
        case Neg(operand=x):
            body = format_expr(x)
            return "-" + _wrap(body, _shape(x) not in ("atom", "neg"))
        case Add(left=l, right=r):
            lt = format_expr(l)
            rt = _wrap(format_expr(r), _shape(r) == "sum")
            return f"{lt} + {rt}"
        case Sub(left=l, right=r):
            lt = format_expr(l)
            rt = _wrap(format_expr(r), _shape(r) == "sum")
            return f"{lt} - {rt}"
        case Mul(left=l, right=r):
            lt = _wrap(format_expr(l), _shape(l) == "sum")
            rt = _wrap(format_expr(r), _shape(r) in ("sum", "term"))
            return f"{lt}*{rt}"
        case Div(left=l, right=r):
            lt = _wrap(format_expr(l), _shape(l) == "sum")
            rt = _wrap(format_expr(r), _shape(r) in ("sum", "term"))
            return f"{lt}/{rt}"
        case Pow(base=b, exponent=e):
            bt = _wrap(format_expr(b), _shape(b) not in ("atom", "neg"))
            et = _wrap(format_expr(e), _shape(e) in ("sum", "term"))
            return f"{bt}^{et}"
        case FnCall(name=name, arg=a):
            return f"{name}({format_expr(a)})"
    raise TypeError(f"not an expression node: {expr!r}")
