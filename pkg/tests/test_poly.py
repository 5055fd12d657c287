from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerforge.poly import (
    MPoly, as_rat, eval_poly, jacobian_rank, partial, rank, univariate_taylor, variables,
)

x, y = variables("x", "y")


def test_as_rat_accepts_exact_inputs_only():
    assert as_rat("3/4") == Fraction(3, 4)
    assert as_rat(2) == 2
    with pytest.raises(TypeError):
        as_rat(0.5)
    with pytest.raises(TypeError):
        as_rat(True)


def test_eval_examples():
    x1, x2 = variables("x1", "x2")
    assert eval_poly(x1**2 - x2, {"x1": 2, "x2": 4}) == 0
    assert eval_poly(MPoly.const(5), {}) == 5
    assert eval_poly(1 - x, {"x": Fraction(1, 2), "y": 0}) == Fraction(1, 2)


def test_eval_missing_variable_names_it():
    with pytest.raises(KeyError, match="'y'"):
        eval_poly(x * y, {"x": 1})


def test_partial_examples():
    t, xx = variables("t", "x")
    p = t**2 - xx
    assert partial(p, "t") == 2 * t
    assert partial(p, "x") == MPoly.const(-1, ("t", "x"))
    assert partial(x * y, "x") == y
    with pytest.raises(KeyError):
        partial(p, "z")


def test_jacobian_rank_examples():
    names = ("x", "y", "t1", "t2")
    X, Y, T1, T2 = variables(*names)
    zero = dict.fromkeys(names, 0)
    assert jacobian_rank([T1**2 - X, T2**2 - Y], zero) == 2
    assert jacobian_rank([x**2 + y**2], {"x": 0, "y": 0}) == 0
    assert jacobian_rank([MPoly.var("x")], {"x": 7}) == 1


def test_rank_matches_sympy():
    rows = [[1, 2, 3], [2, 4, 6], [Fraction(1, 3), 0, 1]]
    assert rank(rows) == sympy.Matrix(rows).rank() == 2


def test_taylor_examples():
    t = MPoly.var("t")
    assert univariate_taylor(t**2, 0, 3) == [0, 0, 1, 0]
    assert univariate_taylor((t - 1) ** 2, 1, 2) == [0, 0, 1]
    # oracle: sympy series of 1 - t^4 at 1
    ts = sympy.Symbol("t")
    series = sympy.series(1 - ts**4, ts, 1, 2).removeO()
    expected = [series.subs(ts, 1), sympy.diff(series, ts).subs(ts, 1)]
    assert univariate_taylor(1 - t**4, 1, 1) == [int(c) for c in expected] == [0, -4]


def test_taylor_rejects_multivariate():
    with pytest.raises(ValueError):
        univariate_taylor(x * y, 0, 1)


def test_json_round_trip_and_format():
    p = Fraction(3, 2) * x**2 * y - 1
    data = p.to_json()
    assert data["vars"] == ["x", "y"]
    assert {"coeff": "3/2", "exps": [2, 1]} in data["terms"]
    assert {"coeff": "-1/1", "exps": [0, 0]} in data["terms"]
    assert MPoly.from_json(data) == p


def test_arithmetic_over_variable_union():
    (z,) = variables("z")
    p = x + z
    assert p.vars == ("x", "y", "z")
    assert eval_poly(p * p, {"x": 1, "y": 5, "z": 2}) == 9


small = st.integers(-3, 3)
monomials = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monomials, small, max_size=5).map(lambda d: MPoly(("x", "y"), d))
points = st.tuples(st.fractions(max_denominator=5), st.fractions(max_denominator=5)).map(
    lambda v: {"x": v[0], "y": v[1]})


@settings(max_examples=60, deadline=None)
@given(polys, polys, points)
def test_eval_is_a_ring_homomorphism(p, q, pt):
    assert eval_poly(p + q, pt) == eval_poly(p, pt) + eval_poly(q, pt)
    assert eval_poly(p * q, pt) == eval_poly(p, pt) * eval_poly(q, pt)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_mixed_partials_commute(p):
    assert partial(partial(p, "x"), "y") == partial(partial(p, "y"), "x")


@settings(max_examples=40, deadline=None)
@given(st.lists(polys, min_size=1, max_size=3), points, st.fractions(max_denominator=7).filter(bool))
def test_jacobian_rank_row_operations(ps, pt, c):
    base = jacobian_rank(ps, pt)
    assert jacobian_rank(ps[::-1], pt) == base
    assert jacobian_rank([ps[0] * c] + ps[1:], pt) == base
