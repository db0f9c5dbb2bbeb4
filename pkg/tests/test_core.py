import random
from fractions import Fraction

import pytest
import sympy as sp

from conftest import R, T as TS, from_sympy, to_sympy
from umemura.core import (SYMBOLIC, UmemuraCache, bareiss_det, build_hankel, cofactor_det,
                          compute_entries, cross_check, hankel_minors, rho, sigma_hankel,
                          sigma_recurrence, sigma_recurrence_table, verify_scaled_toda)
from umemura.errors import InsufficientEntries
from umemura.exact import BiPoly

t, r = BiPoly.t(), BiPoly.r()
u = t.scale(Fraction(1, 8)) - r + Fraction(3, 4)


def sympy_sigmas(n_max):
    """Independent oracle: the bilinear recurrence in sympy."""
    s = [sp.Integer(1), sp.Integer(1)]
    for n in range(1, n_max):
        f = s[n]
        lhs = (TS * (sp.diff(f, TS, 2) * f - sp.diff(f, TS) ** 2) + sp.diff(f, TS) * f
               + (TS / 8 - R + sp.Rational(3, 4) * n) * f ** 2)
        q, rem = sp.div(sp.expand(lhs), sp.expand(s[n - 1]), TS, R)
        assert rem == 0
        s.append(sp.expand(q))
    return s


def sympy_entries(N):
    a = [sp.Integer(1), sp.Rational(3, 4) * TS]
    for n in range(2, N + 1):
        conv = sum(a[k] * a[n - k - 2] for k in range(n - 1))
        a.append(sp.expand(TS * (sp.diff(a[n - 1], TS) + sp.Rational(3, 4) * a[n - 1])
                           + TS * (TS / 8 - R) * conv))
    return a


def test_entry_examples():
    a = compute_entries(3).entries
    assert a[0] == BiPoly.constant(1)
    assert a[1] == t.scale(Fraction(3, 4))
    assert a[2] == (t * t).scale(Fraction(11, 16)) + t * (Fraction(3, 4) - r)
    assert a[3] == ((t ** 3).scale(Fraction(45, 64)) + (t * t) * (Fraction(31, 16) - r.scale(Fraction(9, 4)))
                    + t * (Fraction(3, 4) - r))


def test_entries_match_sympy_oracle():
    ours = compute_entries(8).entries
    for a, b in zip(ours, sympy_entries(8)):
        assert a == from_sympy(b)


def test_entry_degrees_and_positive_leading_coefficient():
    for n, a in enumerate(compute_entries(12).entries):
        assert a.deg_t == n
        lc = a.leading_coeff_t()
        assert lc.is_constant() and lc.constant_value() > 0


def test_hankel_structure_and_insufficient_entries():
    seq = compute_entries(4)
    H = build_hankel(3, seq)
    assert [[H[i, j] for j in range(1, 4)] for i in range(1, 4)] == [[seq[i + j] for j in range(3)] for i in range(3)]
    assert build_hankel(1, seq).rows() == [[seq[0]]]
    with pytest.raises(InsufficientEntries):
        build_hankel(4, seq)


def test_bareiss_examples():
    assert bareiss_det([[1, 2], [3, 4]]) == BiPoly.constant(-2)
    assert bareiss_det([[0, 1], [1, 0]]) == BiPoly.constant(-1)
    assert bareiss_det([[0, 0], [0, 5]]).is_zero()
    seq = compute_entries(2)
    assert bareiss_det(build_hankel(2, seq)) == (t * t).scale(Fraction(1, 8)) + t * (Fraction(3, 4) - r)


@pytest.mark.parametrize("n", [3, 4])
def test_bareiss_matches_cofactor_on_random_rational_matrices(n):
    rng = random.Random(n)
    for _ in range(25):
        M = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) if rng.random() < 0.8 else 0
              for _ in range(n)] for _ in range(n)]
        assert bareiss_det(M) == cofactor_det(M)
        assert bareiss_det(M).constant_value() == Fraction(sp.Matrix(M).det())


@pytest.mark.parametrize("var", ["t", "r"])
def test_bareiss_matches_cofactor_on_univariate_polynomial_matrices(var):
    rng = random.Random(11)
    for _ in range(5):
        M = [[BiPoly({((0, k) if var == "t" else (k, 0)): rng.randint(-4, 4) for k in range(3)})
              for _ in range(4)] for _ in range(4)]
        M[0][0] = BiPoly()  # force a pivot swap
        assert bareiss_det(M) == cofactor_det(M)


def test_sigma_examples():
    assert sigma_hankel(0) == sigma_hankel(1) == BiPoly.constant(1)
    assert sigma_recurrence(0) == sigma_recurrence(1) == BiPoly.constant(1)
    assert sigma_hankel(2) == sigma_recurrence(2) == u
    assert sigma_recurrence(3) == u ** 3 + (u * u).scale(Fraction(3, 4)) + u.scale(Fraction(1, 8)) - t.scale(Fraction(1, 64))
    assert sigma_hankel(3).eval(8, 0) == Fraction(31, 4)
    assert sigma_recurrence(3).eval(8, 0) == Fraction(31, 4)


def test_sigmas_match_sympy_oracle(sym_sigmas):
    for a, b in zip(sym_sigmas[:6], sympy_sigmas(5)):
        assert a == from_sympy(b)


def test_hankel_determinant_matches_sympy_oracle():
    a = sympy_entries(6)
    for n in range(2, 5):
        det = sp.Matrix(n, n, lambda i, j: a[i + j]).det(method="berkowitz")
        q, rem = sp.div(sp.expand(det), TS ** (n * (n - 1) // 2), TS, R)
        assert rem == 0
        assert sigma_hankel(n) == from_sympy(q)


def test_leading_minors_equal_individual_determinants():
    seq = compute_entries(10)
    minors = hankel_minors(6, seq)
    for n in range(1, 7):
        assert minors[n - 1] == bareiss_det(build_hankel(n, seq))


def test_degree_law(sym_sigmas):
    for n, s in enumerate(sym_sigmas):
        k = n * (n - 1) // 2
        assert s.deg_t == k
        assert s.leading_coeff_t() == BiPoly.constant(Fraction(1, 8 ** k))


@pytest.mark.parametrize("r0", [Fraction(0), Fraction(1, 3), Fraction(-7, 4)])
def test_symbolic_then_substitute_equals_numeric(sym_sigmas, r0):
    num = sigma_recurrence_table(6, r0)
    for n in range(7):
        assert sym_sigmas[n].subs_r(r0) == num[n]
    sym_a, num_a = compute_entries(8).entries, compute_entries(8, r0).entries
    assert all(a.subs_r(r0) == b for a, b in zip(sym_a, num_a))
    assert sigma_hankel(4, r0) == num[4]


def test_rho_and_scaled_toda(sym_sigmas):
    assert rho(2, u) == t * u
    for n in range(1, 7):
        assert verify_scaled_toda(n, sym_sigmas)
    bad = list(sym_sigmas)
    bad[2] = bad[2] + 1
    assert not verify_scaled_toda(1, bad)


def test_scaled_toda_numeric_r():
    assert all(verify_scaled_toda(n, r_mode=Fraction(2, 5)) for n in range(1, 5))


def test_cross_check_reports():
    rep = cross_check(2)
    assert rep.all_equal and [row.n for row in rep.rows] == [2]
    rep = cross_check(6)
    assert rep.all_equal and rep.mismatches == []
    assert [row.deg_t for row in rep.rows] == [n * (n - 1) // 2 for n in range(2, 7)]


def test_cross_check_flags_corrupted_cache():
    cache = UmemuraCache(SYMBOLIC)
    for n, s in enumerate(sigma_recurrence_table(5)):
        cache.put(n, s, "recurrence")
    cache.sigma[4] = cache.sigma[4] + t  # corrupt behind the API's back
    rep = cross_check(5, SYMBOLIC, cache)
    assert rep.mismatches == [4]


def test_cache_is_append_only():
    cache = UmemuraCache()
    cache.put(2, u, "hankel")
    cache.put(2, u, "recurrence")
    assert cache.method[2] == "hankel" and cache.max_n == 2
    with pytest.raises(ValueError):
        cache.put(2, u + 1, "recurrence")
    with pytest.raises(ValueError):
        cache.put(3, u, "guess")
