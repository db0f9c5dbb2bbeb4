import json
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import R, T as TS, bipolys, from_sympy, small_fractions, to_sympy
from umemura.errors import NotDivisible, ParseError, UnsupportedDivisor
from umemura.exact import (NEG_INF, BiPoly, RatFunc, as_rational, deserialize, differentiate_t,
                           eval_point, exact_div, ring_op, serialize, shift_r)

t, r = BiPoly.t(), BiPoly.r()
SIGMA2 = t.scale(Fraction(1, 8)) - r + Fraction(3, 4)


def test_zero_polynomial_has_empty_terms_and_neg_inf_degrees():
    z = BiPoly({(0, 0): 0, (1, 2): Fraction(0)})
    assert z.terms == {}
    assert z.deg_t == NEG_INF and z.deg_r == NEG_INF
    assert (t - t).terms == {}


def test_rational_scalars_are_canonical():
    c = as_rational("-6/4")
    assert (c.numerator, c.denominator) == (-3, 2)
    assert as_rational(0) == Fraction(0, 1) and as_rational(0).denominator == 1
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_ring_op_examples():
    assert ring_op(t, r, "add") == t + r
    assert ring_op(t, r, "mul").terms == {(1, 1): 1}
    assert ring_op(t, None, "neg") == -t
    assert ring_op(t, Fraction(2, 3), "scalar_mul").coeff(0, 1) == Fraction(2, 3)
    assert ring_op(t + r, t + r, "sub").is_zero()


@given(bipolys(), bipolys(), bipolys())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + b == b + a


@given(bipolys(), bipolys())
def test_multiplication_matches_sympy(a, b):
    assert a * b == from_sympy(to_sympy(a) * to_sympy(b))


def test_large_multiplication_matches_sympy():
    rng = random.Random(7)
    def rand_poly(dr, dt):
        return BiPoly({(i, j): Fraction(rng.randint(-10**12, 10**12), rng.randint(1, 10**6))
                       for i in range(dr + 1) for j in range(dt + 1) if rng.random() < 0.7})
    a, b = rand_poly(5, 30), rand_poly(4, 25)
    assert a * b == from_sympy(sp.expand(to_sympy(a) * to_sympy(b)))


@given(bipolys(), bipolys())
def test_exact_div_recovers_quotient(q, d):
    lc = d.leading_coeff_t() if d else None
    if not d or not lc.is_constant():
        return
    assert exact_div(q * d, d) == q


def test_exact_div_examples():
    assert exact_div(t * t - 1, t - 1) == t + 1
    assert exact_div((t * t).scale(Fraction(1, 8)) + t.scale(Fraction(3, 4)) - t * r, t) == SIGMA2
    with pytest.raises(NotDivisible):
        exact_div(t * t + 1, t - 1)
    assert exact_div(r * r * t - t, r + 1) == (r - 1) * t
    with pytest.raises(UnsupportedDivisor):
        exact_div(t * r * (t + r + 1), t * r + t + r)
    with pytest.raises(ZeroDivisionError):
        exact_div(t, BiPoly())


def test_exact_div_large_against_sympy():
    rng = random.Random(3)
    q = BiPoly({(i, j): Fraction(rng.randint(-99, 99), rng.randint(1, 9)) for i in range(4) for j in range(12)})
    d = BiPoly({(i, j): Fraction(rng.randint(-99, 99), rng.randint(1, 9)) for i in range(3) for j in range(9)})
    d = d - d.coeff_t(8).mul_t_power(8) + t ** 8 * Fraction(5, 7)
    p = q * d
    sq, srem = sp.div(sp.Poly(to_sympy(p), TS, R), sp.Poly(to_sympy(d), TS, R))
    assert srem.is_zero
    assert exact_div(p, d) == from_sympy(sq.as_expr())
    with pytest.raises(NotDivisible):
        exact_div(p + 1, d)


@given(bipolys(), bipolys(), small_fractions)
def test_differentiation_is_linear_and_leibniz(a, b, c):
    assert differentiate_t(a + b.scale(c)) == a.diff_t() + b.diff_t().scale(c)
    assert (a * b).diff_t() == a.diff_t() * b + a * b.diff_t()


def test_differentiate_examples():
    assert differentiate_t(t ** 3 * r) == (t * t * r).scale(3)
    assert differentiate_t(r + 5).is_zero()


@given(bipolys(), bipolys(), small_fractions, small_fractions)
def test_eval_is_ring_homomorphism(a, b, t0, r0):
    assert eval_point(a * b, t0, r0) == eval_point(a, t0, r0) * eval_point(b, t0, r0)
    assert eval_point(a + b, t0, r0) == eval_point(a, t0, r0) + eval_point(b, t0, r0)


def test_eval_point_example():
    assert eval_point(SIGMA2, 8, 0) == Fraction(7, 4)
    assert eval_point(SIGMA2, Fraction(1, 2), Fraction(3)) == Fraction(1, 16) - 3 + Fraction(3, 4)


@given(bipolys(), small_fractions, small_fractions)
def test_shift_composition(p, a, b):
    assert shift_r(shift_r(p, a), b) == shift_r(p, a + b)


def test_shift_r_against_sympy():
    assert shift_r(SIGMA2, Fraction(1, 4)) == from_sympy(to_sympy(SIGMA2).subs(R, R + sp.Rational(1, 4)))
    p = (t * r * r - r ** 3).scale(Fraction(2, 3))
    assert shift_r(p, Fraction(-5, 2)) == from_sympy(to_sympy(p).subs(R, R - sp.Rational(5, 2)))


@given(bipolys())
def test_serialize_round_trip(p):
    text = serialize(p)
    assert deserialize(text) == p
    assert serialize(deserialize(text)) == text


def test_serialize_canonical_order_and_schema():
    doc = json.loads(serialize(SIGMA2))
    assert doc == {"vars": ["r", "t"], "terms": [{"c": "1/8", "e": [0, 1]},
                                                   {"c": "-1/1", "e": [1, 0]},
                                                   {"c": "3/4", "e": [0, 0]}]}
    assert deserialize(serialize(BiPoly())) == BiPoly()


@pytest.mark.parametrize("text", [
    serialize(SIGMA2)[:-7],
    '{"vars":["r","t"],"terms":[{"c":"1/x","e":[0,1]}]}',
    '{"vars":["t","r"],"terms":[]}',
    '{"vars":["r","t"],"terms":[{"c":"1/0","e":[0,1]}]}',
    '{"vars":["r","t"],"terms":[{"c":"1","e":[0,-1]}]}',
    '{"vars":["r","t"],"terms":[{"c":"1","e":[0,1]},{"c":"2","e":[0,1]}]}',
])
def test_malformed_documents_raise_parse_error(text):
    with pytest.raises(ParseError):
        deserialize(text)


def test_parse_error_reports_position():
    text = serialize(SIGMA2)[:20]
    with pytest.raises(ParseError) as info:
        deserialize(text)
    assert info.value.pos is not None and 0 <= info.value.pos <= len(text)


def test_ratfunc_cross_multiplied_equality_and_calculus():
    a = RatFunc(t * t - 1, t - 1)
    assert a == RatFunc(t + 1)
    assert (a - RatFunc(t + 1)).is_zero()
    f = RatFunc(1, t)
    assert f.diff_t() == RatFunc(-1, t * t)
    assert (f * RatFunc(t)).eval(3) == 1
    with pytest.raises(ZeroDivisionError):
        RatFunc(t, BiPoly())


@settings(max_examples=30, deadline=None)
@given(bipolys(max_deg=2), bipolys(max_deg=2), st.integers(1, 9))
def test_ratfunc_quotient_rule(n, d, k):
    d = d + t ** 3 * k  # nonzero denominator
    f = RatFunc(n, d)
    expected = to_sympy(n) / to_sympy(d)
    got = f.diff_t()
    diff = sp.cancel(to_sympy(got.num) / to_sympy(got.den) - sp.diff(expected, TS))
    assert diff == 0
