"""Expression front end: lexing, parsing, evaluation, formatting."""

import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import consts_finite, folded_exprs
from fracdom.expr import (
    Add,
    Const,
    Div,
    ExprError,
    FnCall,
    Mul,
    Neg,
    ParseError,
    Pow,
    Sub,
    UnknownFunctionError,
    VarC,
    VarZ,
    eval_ast,
    fold_constants,
    format_expr,
    has_variables,
    parse,
)

Z, C = VarZ(), VarC()


def const(v) -> Const:
    return Const(complex(v))


# --- parsing -------------------------------------------------------------

def test_parse_power_map():
    assert parse("z^2+c") == Add(Pow(Z, const(2)), C)


def test_parse_tan_square():
    assert parse("tan(z)^2+c") == Add(Pow(FnCall("tan", Z), const(2)), C)


def test_parse_six_sine_gap():
    expected = Add(Mul(const(6), Sub(Z, FnCall("sin", Z))), C)
    assert parse("6*(z-sin(z))+c") == expected


def test_implicit_multiplication_number_ident():
    assert parse("6(z-sin(z))+c") == parse("6*(z-sin(z))+c")
    assert parse("2z") == Mul(const(2), Z)
    assert parse("3(z)") == Mul(const(3), Z)


def test_no_implicit_multiplication_elsewhere():
    with pytest.raises(ExprError):
        parse("z c")
    with pytest.raises(ExprError):
        parse("(z)(c)")


def test_unary_minus_binds_tighter_than_power():
    assert parse("-z^2") == Pow(Neg(Z), const(2))
    assert parse("-(z^2)") == Neg(Pow(Z, const(2)))


def test_power_right_associative():
    # constant folding collapses 2^3 to 8
    assert parse("z^2^3") == Pow(Z, const(8))
    assert parse("z^c^2") == Pow(Z, Pow(C, const(2)))


def test_precedence_mul_over_add():
    assert parse("z+2*c") == Add(Z, Mul(const(2), C))
    assert parse("z*2+c") == Add(Mul(Z, const(2)), C)


def test_negative_exponent_literal():
    assert parse("z^-2") == Pow(Z, const(-2))


def test_scientific_notation():
    assert parse("2e3") == const(2000.0)
    assert parse("1.5e-2") == const(0.015)
    # "2e" is 2 times the constant e, not a truncated exponent
    assert parse("2e") == const(2 * math.e)


def test_constants():
    assert parse("i") == const(1j)
    assert parse("pi") == const(math.pi)
    assert parse("e") == const(math.e)
    assert parse("2*i") == const(2j)


def test_complex_literal_folding():
    assert parse("(1 + 2*i)") == const(1 + 2j)
    assert parse("-3") == const(-3)


def test_parse_error_offsets():
    with pytest.raises(ParseError) as err:
        parse("z^^2")
    assert err.value.offset == 2
    assert "offset 2" in str(err.value)
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError):
        parse("(z")
    with pytest.raises(ParseError):
        parse("z+")
    with pytest.raises(ParseError):
        parse("z @ c")


def test_unknown_function():
    with pytest.raises(UnknownFunctionError) as err:
        parse("foo(z)")
    assert err.value.name == "foo"
    with pytest.raises(ExprError):
        parse("sinh(z)")


def test_unknown_bare_identifier():
    with pytest.raises(ExprError):
        parse("w + 1")


# --- evaluation ----------------------------------------------------------

def test_eval_fixed_point():
    assert eval_ast(parse("z^2+c"), 0j, 0j) == 0j


def test_eval_direct_arithmetic():
    assert eval_ast(parse("z^2+c"), 1 + 0j, 1 + 0j) == 2 + 0j


def test_eval_cotan_against_laurent_sum():
    # independent oracle: the first four Laurent terms at z=0.1
    z = 0.1
    oracle = 1 / z - z / 3 - z**3 / 45 - 2 * z**5 / 945
    got = eval_ast(parse("cotan(z)"), complex(z), 0j)
    assert abs(got - oracle) <= 1e-9


def test_eval_matches_cmath():
    z, c = 0.37 - 1.2j, -0.8 + 0.3j
    cases = {
        "sin(z)": cmath.sin(z),
        "cos(z)": cmath.cos(z),
        "tan(z)": cmath.tan(z),
        "exp(z)": cmath.exp(z),
        "log(z)": cmath.log(z),
        "sqrt(z)": cmath.sqrt(z),
        "cotan(z)": cmath.cos(z) / cmath.sin(z),
        "z^3 - c/z": z**3 - c / z,
        "z^0.5": cmath.exp(0.5 * cmath.log(z)),
        "z^c": cmath.exp(c * cmath.log(z)),
    }
    for text, want in cases.items():
        got = eval_ast(parse(text), z, c)
        assert cmath.isclose(got, want, rel_tol=1e-12), text


def test_eval_division_by_zero_is_a_value():
    v = eval_ast(parse("1/z"), 0j, 0j)
    assert not cmath.isfinite(v)
    v = eval_ast(parse("z/z"), 0j, 0j)
    assert not cmath.isfinite(v)


def test_eval_zero_powers():
    assert eval_ast(parse("z^2"), 0j, 0j) == 0j
    assert eval_ast(parse("z^0.5"), 0j, 0j) == 0j
    assert not cmath.isfinite(eval_ast(parse("z^-1"), 0j, 0j))


@given(folded_exprs, st.complex_numbers(max_magnitude=1e3),
       st.complex_numbers(max_magnitude=1e3))
def test_eval_total(expr, z, c):
    value = eval_ast(expr, z, c)
    assert isinstance(value, complex)


def test_principal_branch_consistency():
    import random

    rng = random.Random(7)
    for _ in range(10_000):
        n = rng.randint(0, 12)
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if z == 0:
            continue
        via_pow = eval_ast(Pow(Z, const(float(n))), z, 0j)
        direct = 1 + 0j
        for _ in range(n):
            direct *= z
        assert abs(via_pow - direct) <= 1e-10 * max(1.0, abs(direct))


# --- formatting ----------------------------------------------------------

def test_format_canonical_spacing():
    assert format_expr(Add(Pow(Z, const(2)), C)) == "z^2 + c"
    assert format_expr(Neg(Z)) == "-z"


def test_format_rotated_demo_form():
    text = "i*(z - 1)^2 - (z - 1)^3 + c"
    assert format_expr(parse(text)) == text


def test_format_negated_power_is_parenthesized():
    # -(z^2) and (-z)^2 differ; the formatter must keep them distinct
    neg_pow = Neg(Pow(Z, const(2)))
    assert format_expr(neg_pow) == "-(z^2)"
    assert parse(format_expr(neg_pow)) == neg_pow
    pow_neg = Pow(Neg(Z), const(2))
    assert format_expr(pow_neg) == "-z^2"
    assert parse(format_expr(pow_neg)) == pow_neg


def test_format_negative_exponent():
    assert format_expr(Pow(Z, const(-2))) == "z^-2"


def test_format_complex_constant():
    text = format_expr(const(1 + 2j))
    assert parse(text) == const(1 + 2j)


def test_format_negative_imaginary_operands():
    # a pure-imaginary constant renders as a product ("x*i"), so tight
    # slots must parenthesize it even when x is negative
    cases = [
        Mul(VarZ(), const(-1.5j)),
        Div(VarZ(), const(-1.5j)),
        Pow(VarZ(), const(-1.5j)),
        Pow(const(-1.5j), VarZ()),
        Mul(const(-1.5j), VarZ()),
        Add(VarZ(), const(-1.5j)),
        Sub(VarZ(), const(-1.5j)),
        Pow(const(-1j), VarZ()),
        Pow(const(-3 + 0j), VarZ()),
    ]
    for tree in cases:
        text = format_expr(tree)
        assert parse(text) == tree, text
    assert format_expr(Pow(VarZ(), const(-1.5j))) == "z^(-1.5*i)"
    assert format_expr(Mul(VarZ(), const(-1.5j))) == "z*(-1.5*i)"


@settings(max_examples=1000, deadline=None)
@given(folded_exprs)
def test_format_parse_round_trip(expr):
    assert parse(format_expr(expr)) == expr


# --- folding -------------------------------------------------------------

def test_fold_constants_collapses_variable_free_subtrees():
    tree = parse("(1+2)*z + sin(0)")
    assert tree == Add(Mul(const(3), Z), const(0))


@given(folded_exprs)
def test_folded_trees_have_no_const_only_operators(expr):
    def check(node):
        match node:
            case Const():
                return
            case VarZ() | VarC():
                return
            case Neg(operand=a) | FnCall(arg=a):
                assert has_variables(a) or not consts_finite(fold_constants(node))
                check(a)
            case (Add(left=a, right=b) | Sub(left=a, right=b)
                  | Mul(left=a, right=b) | Div(left=a, right=b)
                  | Pow(base=a, exponent=b)):
                assert (has_variables(a) or has_variables(b)
                        or not consts_finite(fold_constants(node)))
                check(a)
                check(b)

    check(expr)
