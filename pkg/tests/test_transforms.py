"""Coefficient transforms, shape-preserving map builders, orbit verifiers."""

import cmath
import math
import random

import pytest

from fracdom.expr import eval_ast, format_expr, parse
from fracdom.transforms import (
    SparseLaurentPolynomial,
    TransformSpec,
    TruncationError,
    build_rotated,
    build_scaled,
    build_spt,
    build_translated,
    build_zoom,
    map_expr,
    poly_from_expr,
    poly_from_pairs,
    snap_unit,
    spt_motion,
    transform_polynomial,
    verify_rotation,
    verify_scaling,
    verify_translation,
)


# --- snapping and parsing ----------------------------------------------------

def test_snap_unit_cleans_trig_residue():
    assert snap_unit(cmath.exp(1j * math.pi / 2)) == 1j
    assert snap_unit(cmath.exp(1j * math.pi)) == -1 + 0j
    assert snap_unit(complex(1 - 1e-16, 1e-17)) == 1 + 0j
    v = complex(0.7071067811865476, 0.7071067811865475)
    assert snap_unit(v) == v


def test_poly_from_pairs():
    p = poly_from_pairs("1:2,1:3")
    assert p.terms == {2: 1 + 0j, 3: 1 + 0j}
    assert p.center == 0j
    q = poly_from_pairs("0.5+0.5i:2, -1:0, 2:-0")
    assert q.coefficient(2) == 0.5 + 0.5j
    assert q.coefficient(0) == 1 + 0j  # -1 and 2 summed at degree 0
    r = poly_from_pairs("1:5,-1:5")
    assert r.is_empty()


def test_poly_from_pairs_errors():
    with pytest.raises(ValueError):
        poly_from_pairs("")
    with pytest.raises(ValueError):
        poly_from_pairs("junk")
    with pytest.raises(ValueError):
        poly_from_pairs("1:two")


def test_poly_from_expr_exact():
    p = poly_from_expr(parse("z^4 + z^7 - z^10"))
    assert p.terms == {4: 1 + 0j, 7: 1 + 0j, 10: -1 + 0j}
    q = poly_from_expr(parse("1/z + z^2"))
    assert q.terms == {-1: 1 + 0j, 2: 1 + 0j}
    with pytest.raises(ValueError):
        poly_from_expr(parse("sin(z)"))


def test_poly_predicates():
    assert SparseLaurentPolynomial.make({2: 1, 3: 1}).is_left_truncated
    assert SparseLaurentPolynomial.make({0: 5, 2: 1}).is_left_truncated
    assert not SparseLaurentPolynomial.make({1: 1, 2: 1}).is_left_truncated
    assert not SparseLaurentPolynomial.make({-1: 1, 2: 1}).is_left_truncated
    assert SparseLaurentPolynomial.make({-1: 1}).needs_radius_review
    assert not SparseLaurentPolynomial.make({2: 1}).needs_radius_review
    p = SparseLaurentPolynomial.make({2: 1, 5: -3})
    assert p.lowest_degree() == 2 and p.highest_degree() == 5


# --- the coefficient transform -------------------------------------------------

def test_transform_demo_rotation_by_right_angle():
    poly = poly_from_pairs("1:2,1:3")
    spec = TransformSpec(u_scale=1.0, theta=math.pi / 2, b=1 + 0j)
    out = transform_polynomial(poly, spec)
    assert out.center == 1 + 0j
    assert abs(out.coefficient(2) - 1j) <= 1e-12
    assert abs(out.coefficient(3) - (-1 + 0j)) <= 1e-12
    assert format_expr(map_expr(out)) == "i*(z - 1)^2 - (z - 1)^3 + c"


def test_transform_scale_multipliers():
    poly = SparseLaurentPolynomial.make({0: 3 + 0j, 2: 1 + 0j, 3: 1 + 0j})
    out = transform_polynomial(poly, TransformSpec(2.0, 0.0, 0j))
    # degree j picks up u^(1-j)
    assert abs(out.coefficient(0) - 6) <= 1e-12
    assert abs(out.coefficient(2) - 0.5) <= 1e-12
    assert abs(out.coefficient(3) - 0.25) <= 1e-12


def test_transform_negative_degree_multiplier():
    poly = SparseLaurentPolynomial.make({-1: 1 + 0j, 2: 1 + 0j})
    theta = 0.7
    u = 1.5
    out = transform_polynomial(poly, TransformSpec(u, theta, 0j))
    want = u**2 * cmath.exp(-2j * theta)
    assert abs(out.coefficient(-1) - want) <= 1e-12
    assert out.needs_radius_review


def test_transform_rejects_degree_one_and_offcenter():
    with pytest.raises(TruncationError):
        transform_polynomial(poly_from_pairs("1:1,1:2"), TransformSpec(1.0, 0.0, 0j))
    off = SparseLaurentPolynomial.make({2: 1 + 0j}, center=1 + 0j)
    with pytest.raises(ValueError):
        transform_polynomial(off, TransformSpec(1.0, 0.0, 0j))


def test_transform_composes():
    rng = random.Random(41)
    for _ in range(50):
        degrees = rng.sample([0, 2, 3, 4, 5, 7, -1, -2], rng.randint(1, 4))
        poly = SparseLaurentPolynomial.make(
            {j: complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for j in degrees}
        )
        u1, u2 = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        t1, t2 = rng.uniform(-3, 3), rng.uniform(-3, 3)
        b = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        step1 = transform_polynomial(poly, TransformSpec(u1, t1, 0j))
        two_step = transform_polynomial(step1, TransformSpec(u2, t2, b))
        one_step = transform_polynomial(poly, TransformSpec(u1 * u2, t1 + t2, b))
        assert two_step.center == one_step.center == b
        for j in set(poly.terms):
            a, want = two_step.coefficient(j), one_step.coefficient(j)
            assert abs(a - want) <= 1e-12 * max(1.0, abs(want)), (j, a, want)


def test_identity_transform_is_noop():
    poly = poly_from_pairs("2:2,-1:3,0.5:0")
    out = transform_polynomial(poly, TransformSpec(1.0, 0.0, 0j))
    assert out.terms == poly.terms
    assert out.center == 0j


def test_map_expr_evaluates_like_polynomial_plus_c():
    rng = random.Random(43)
    poly = SparseLaurentPolynomial.make(
        {2: 1j, 3: -1 + 0j, 0: 0.5 + 0j, -1: 0.25j}, center=1 - 0.5j
    )
    ast = map_expr(poly)
    for _ in range(100):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        want = poly.evaluate(z) + c
        got = eval_ast(ast, z, c)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_map_expr_round_trips_through_parser():
    poly = poly_from_pairs("1:-1,1:2")
    text = format_expr(map_expr(poly))
    assert text == "z^-1 + z^2 + c"
    back = parse(text)
    z, c = 0.3 + 0.7j, 0.1j
    assert abs(eval_ast(back, z, c) - (poly.evaluate(z) + c)) < 1e-12


# --- builders ------------------------------------------------------------------

def test_build_translated():
    ast = build_translated(2, 1 + 0j)
    assert format_expr(ast) == "(z - 1)^2 + c"
    assert eval_ast(ast, 3 + 0j, 0.5j) == 4 + 0.5j
    with pytest.raises(ValueError):
        build_translated(0, 1 + 0j)


def test_build_rotated():
    ast, rho = build_rotated(2, math.pi / 2)
    assert format_expr(ast) == "i*z^2 + c"
    assert rho == pytest.approx(math.pi / 2)
    # the coefficient -1 needs parentheses: "-z^2" would re-parse as (-z)^2
    ast, rho = build_rotated(2, math.pi)
    assert format_expr(ast) == "-(z^2) + c"
    assert parse(format_expr(ast)) == ast or eval_ast(
        parse(format_expr(ast)), 2 + 0j, 0j
    ) == eval_ast(ast, 2 + 0j, 0j)
    _, rho3 = build_rotated(3, math.pi)
    assert rho3 == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        build_rotated(1, 0.5)


def test_build_scaled():
    ast, sigma = build_scaled(2, 4.0)
    assert format_expr(ast) == "4*z^2 + c"
    assert sigma == pytest.approx(0.25)
    _, sigma3 = build_scaled(3, 4.0)
    assert sigma3 == pytest.approx(0.5)
    with pytest.raises(ValueError):
        build_scaled(2, 0.0)
    with pytest.raises(ValueError):
        build_scaled(1, 2.0)


def test_build_spt_and_motion():
    ast = build_spt(3, 8 + 0j, 1 + 2j)
    assert format_expr(ast) == "8*(z - (1 + 2*i))^3 + c"
    motion = spt_motion(3, 8 + 0j, 1 + 2j)
    assert motion["translation"] == 1 + 2j
    assert motion["rotation"] == pytest.approx(0.0)
    assert motion["rotation_sense"] == "clockwise"
    assert motion["scale"] == pytest.approx(8 ** (-0.5))
    rot = spt_motion(2, 1j, 0j)
    assert rot["rotation"] == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        build_spt(2, 0j, 0j)
    with pytest.raises(ValueError):
        spt_motion(1, 1 + 0j, 0j)


def test_build_zoom():
    ast = build_zoom(parse("z^2"), 2.0, 0.0, 1 + 0j)
    assert format_expr(ast) == "2*(z - 1)^2 + c"
    f = parse("sin(z^2) + z^3")
    s, phi, a = 1.5, 0.8, 0.3 - 0.2j
    zoomed = build_zoom(f, s, phi, a)
    rng = random.Random(47)
    for _ in range(50):
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        want = s * cmath.exp(1j * phi) * eval_ast(f, z - a, c) + c
        got = eval_ast(zoomed, z, c)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))
    with pytest.raises(ValueError):
        build_zoom(f, 0.0, 0.0, 0j)


# --- orbit identity verifiers ---------------------------------------------------

def test_verify_translation_tiny_deviation():
    dev = verify_translation(2, 0.3 + 0.4j, 0.1 + 0.2j, 30)
    assert dev <= 1e-9
    dev = verify_translation(5, -0.7 + 0.1j, -0.3 + 0.5j, 30)
    assert dev <= 1e-9


def test_verify_rotation_tiny_deviation():
    assert verify_rotation(2, 1.234, 0.2 + 0.3j, 30) <= 1e-9
    assert verify_rotation(4, -2.5, -0.4 + 0.1j, 30) <= 1e-9


def test_verify_scaling_tiny_deviation():
    assert verify_scaling(2, 2.0, 0.2 + 0.3j, 30) <= 1e-9
    assert verify_scaling(6, 0.25, 0.1 - 0.2j, 30) <= 1e-9


def test_verify_handles_escaping_orbits():
    # c far outside: the orbit overflows quickly; guard stops before inf-inf
    dev = verify_translation(3, 1 + 1j, 5 + 5j, 30)
    assert math.isfinite(dev)
    assert dev <= 1e-9


def test_verify_argument_validation():
    with pytest.raises(ValueError):
        verify_translation(1, 1 + 0j, 0j, 10)
    with pytest.raises(ValueError):
        verify_translation(2.5, 1 + 0j, 0j, 10)
    with pytest.raises(ValueError):
        verify_translation(2, 1 + 0j, 0j, 0)
    with pytest.raises(ValueError):
        verify_rotation(1, 0.5, 0j, 10)
    with pytest.raises(ValueError):
        verify_scaling(2, -1.0, 0j, 10)
