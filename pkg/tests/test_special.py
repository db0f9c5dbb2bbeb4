import math
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy import special as sps
from scipy.integrate import solve_ivp

from umemura.errors import IntegerB, InvalidB, IrregularPoint, OutsideDisk, ResonantSeries
from umemura.exact import BiPoly, RatFunc
from umemura.special import (HeunCParams, L7Coefficients, derived_heun_parameters,
                             frobenius_exponents, frobenius_series, heun_candidate,
                             heunc_coefficients, heunc_derivs, heunc_ode, heunc_ode_residual,
                             heunc_series, kummer_candidate, kummer_m, kummer_m_derivs,
                             kummer_second, kummer_second_derivs, kummer_u, l7_coefficients,
                             l7_wronskian_ratio, ode_residual, printed_heun_parameters,
                             verify_heun_branch, verify_kummer_branch)

T = BiPoly.t()


def kummer_ode_residual(a, b, x, w, dw, d2w):
    terms = (x * d2w, (b - x) * dw, -a * w)
    return abs(sum(terms)) / max(sum(abs(v) for v in terms), 1e-300)


# -- Kummer ---------------------------------------------------------------------

def test_kummer_m_examples():
    assert kummer_m(0.3, 1.7, 0.0) == 1.0
    assert kummer_m(-1, 2.5, 0.8) == pytest.approx(1 - 0.8 / 2.5, rel=1e-15)
    for x in (0.5, 2.0, 7.0):
        assert kummer_m(1, 1, x) == pytest.approx(math.exp(x), rel=1e-14)
    with pytest.raises(InvalidB):
        kummer_m(1.0, -2.0, 0.5)


@pytest.mark.parametrize("seed", range(4))
def test_kummer_m_matches_scipy(seed):
    rng = random.Random(seed)
    for _ in range(20):
        a, b, x = rng.uniform(-4, 4), rng.uniform(0.2, 6), rng.uniform(0.05, 8)
        assert kummer_m(a, b, x) == pytest.approx(sps.hyp1f1(a, b, x), rel=1e-11, abs=1e-13)


def test_kummer_m_satisfies_its_ode_for_random_draws():
    rng = np.random.default_rng(99)
    for _ in range(20):
        a, b = rng.uniform(-3, 3), rng.uniform(0.3, 5)
        for x in np.linspace(0.1, 5, 15):
            assert kummer_ode_residual(a, b, x, *kummer_m_derivs(a, b, x)) < 1e-10


def test_kummer_derivative_identity():
    for a, b, x in ((0.7, 3.7, 1.2), (-2.3, 1.5, 4.0), (1.9, 0.6, 0.3)):
        dm = kummer_m_derivs(a, b, x)[1]
        assert dm == pytest.approx(a / b * kummer_m(a + 1, b + 1, x), rel=1e-12)


def test_kummer_second_examples():
    a, b = -1.3, 2.4
    for x in np.linspace(0.2, 3, 15):
        assert kummer_ode_residual(a, b, x, *kummer_second_derivs(a, b, x)) < 1e-10
    m, dm, _ = kummer_m_derivs(a, b, 1.0)
    s, ds, _ = kummer_second_derivs(a, b, 1.0)
    assert abs(m * ds - dm * s) > 1e-3
    assert kummer_second(a, b, 1.3) == pytest.approx(1.3 ** (1 - b) * sps.hyp1f1(a - b + 1, 2 - b, 1.3), rel=1e-12)
    with pytest.raises(IntegerB):
        kummer_second(0.5, 3, 1.0)


def test_kummer_u_matches_scipy():
    for a, b, x in ((-1.3, 2.4, 1.0), (0.5, 1.5, 2.0), (1.2, 0.3, 0.7)):
        assert kummer_u(a, b, x) == pytest.approx(sps.hyperu(a, b, x), rel=1e-9)
    with pytest.raises(IntegerB):
        kummer_u(0.5, 2.0, 1.0)


# -- confluent Heun -----------------------------------------------------------------

def random_params(rng):
    alpha, gamma, delta, eta = rng.uniform(-2, 2, 4)
    return HeunCParams(alpha, rng.uniform(0.1, 3), gamma, delta, eta)


def test_heunc_normalisation_and_v1_exact():
    p = HeunCParams(Fraction(1, 3), Fraction(5, 2), Fraction(-2), Fraction(7, 5), Fraction(-1, 6))
    v = heunc_coefficients(p, 4)
    mu, _ = p.mu_nu()
    assert v[0] == 1 and v[1] == -mu / (p.beta + 1)
    assert isinstance(v[3], Fraction)
    assert heunc_series(p.at(0)) == 1.0


def test_heunc_ode_residual_random_draws():
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = random_params(rng)
        for z in np.linspace(-0.5, 0.5, 11):
            if z != 0:
                assert heunc_ode_residual(p.at(z)) < 1e-9


def test_heunc_matches_scipy_integration():
    rng = np.random.default_rng(2)
    for _ in range(10):
        p = random_params(rng)
        mu, nu = p.mu_nu()

        def f(z, y):
            P = p.alpha + (p.beta + 1) / z + (p.gamma + 1) / (z - 1)
            return [y[1], -P * y[1] - (mu / z + nu / (z - 1)) * y[0]]
        h, dh, _ = heunc_derivs(p.at(0.05))
        sol = solve_ivp(f, (0.05, 0.5), [h, dh], method="DOP853", rtol=1e-13, atol=1e-15,
                        t_eval=[0.2, 0.35, 0.5])
        for z, y in zip(sol.t, sol.y[0]):
            assert y == pytest.approx(heunc_series(p.at(z)), rel=1e-8)


def test_heunc_guards():
    p = HeunCParams(0.1, 0.5, 0.2, 0.3, 0.4)
    with pytest.raises(OutsideDisk):
        heunc_series(p.at(0.96))
    with pytest.raises(ResonantSeries):
        heunc_series(HeunCParams(0.1, -2.0, 0.2, 0.3, 0.4, 0.2))


def test_heunc_ode_is_the_stated_convention():
    p = HeunCParams(Fraction(1, 2), Fraction(3, 2), Fraction(-2), Fraction(1, 3), Fraction(1, 5))
    P, Q = heunc_ode(p)
    mu, nu = p.mu_nu()
    z = Fraction(1, 3)
    assert P.eval(z) == -(p.alpha + (p.beta + 1) / z + (p.gamma + 1) / (z - 1))
    assert Q.eval(z) == -(mu / z + nu / (z - 1))


def test_frobenius_engine_reproduces_heunc_coefficients():
    p = HeunCParams(Fraction(1, 2), Fraction(3, 2), Fraction(-2), Fraction(1, 3), Fraction(1, 5))
    ser = frobenius_series(heunc_ode(p), 0, 0.0, 12)
    exact = heunc_coefficients(p, 12)
    assert ser.coeffs == pytest.approx([float(v) for v in exact], rel=1e-13)


def test_frobenius_engine_reproduces_kummer_coefficients():
    a, b = Fraction(-7, 10), Fraction(37, 10)
    x = T
    ode = (RatFunc(x - b, x), RatFunc(a, x))  # x w'' = (x - b) w' + a w
    assert sorted(frobenius_exponents(ode, 0)) == pytest.approx(sorted([0.0, float(1 - b)]))
    ser = frobenius_series(ode, 0, 0.0, 10)
    expected, c = [], 1.0
    for n in range(10):
        expected.append(c)
        c *= float((a + n) / ((b + n) * (n + 1)))
    assert ser.coeffs == pytest.approx(expected, rel=1e-13)


# -- the Y1 ODE and branches -----------------------------------------------------------------

def test_l7_r0_simplification_and_point_value():
    for lam in (0.7, 1.0, 2.3):
        c = L7Coefficients(lam, 0.0)
        for t in (0.5, 1.7, 4.0):
            assert c.p(t) == pytest.approx(1 / t)
            assert c.q(t) == pytest.approx((lam**2 + 4 * lam) / (4 * t**2) - 3 * (1 + lam) / (8 * t) + 1 / 64,
                                           rel=1e-13)
    t, lam, r = 2.0, 1.0, 1 / 3
    printed = (lam / (2 * t**2) + (1 / (t - 8 * r)) * (lam / (2 * t) - 3 / 8)
               + 0.25 * (lam / t - 0.75) ** 2 - (1 / t) * (t / 8 - r))
    assert l7_coefficients(lam, r).q(t) == pytest.approx(printed, rel=1e-15)
    p, q = L7Coefficients(Fraction(1), Fraction(1, 3)).ratfuncs()
    assert float(q.eval(Fraction(2))) == pytest.approx(printed, rel=1e-15)


@pytest.mark.parametrize("lam", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("r", [1 / 3, -0.5, 2.0])
def test_frobenius_exponents_of_l7(lam, r):
    ode = L7Coefficients(lam, r)
    assert sorted(np.real(frobenius_exponents(ode, 0))) == pytest.approx([-lam / 2, 1 + lam / 2], abs=1e-12)
    assert sorted(np.real(frobenius_exponents(ode, 8 * r))) == pytest.approx([0.0, 2.0], abs=1e-12)
    ode0 = L7Coefficients(lam, 0.0)
    assert sorted(np.real(frobenius_exponents(ode0, 0))) == pytest.approx([-lam / 2, 2 + lam / 2], abs=1e-12)


def test_irregular_point_is_rejected():
    with pytest.raises(IrregularPoint):
        frobenius_exponents((RatFunc(1, T * T), RatFunc(0)), 0)


@pytest.mark.parametrize("lam", [0.7, 1.0, 2.3])
def test_kummer_branch(lam):
    rep = verify_kummer_branch(lam)
    assert rep.verdict == "PASS"
    assert rep.max_residual < 1e-9
    assert rep.extra["integration_rel_error"] < 1e-7
    assert len(rep.candidates) == (1 if lam == 1.0 else 2)
    assert any("inconsistent" in note for note in rep.notes)


def test_kummer_candidate_scaling_does_not_change_verdict():
    ode = L7Coefficients(1.3, 0.0)
    for t in (0.7, 2.0, 4.5):
        y = kummer_candidate(1.3, t)
        for k in (17.5, -1e-3, 4e6):
            assert (ode_residual(ode, t, *(k * v for v in y)) < 1e-9) == (ode_residual(ode, t, *y) < 1e-9)


def test_kummer_candidate_matches_scipy():
    lam, t = 2.3, 3.1
    ref = 0.25 ** (lam / 2 + 1.5) * t ** (lam / 2 + 2) * math.exp(-t / 8) * sps.hyp1f1(-lam, lam + 3, t / 4)
    assert kummer_candidate(lam, t)[0] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0])
@pytest.mark.parametrize("r", [0.5, 1.0, -1.0])
def test_heun_branch(lam, r):
    rep = verify_heun_branch(lam, r)
    assert rep.verdict in ("PASS", "MISMATCH")
    block = rep.verdict_block()
    assert set(block) == {"branch", "lambda", "r", "max_residual", "verdict"}
    assert rep.samples
    first = rep.candidates[0]
    assert first.max_residual is not None
    assert first.params["beta"] == 1 + lam
    assert rep.extra["frobenius_exponents_t0"] == pytest.approx(sorted([1 + lam / 2, -lam / 2], reverse=True))


def test_heun_printed_parameters_equal_derived_ones():
    for lam, r in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1), Fraction(-1)), (Fraction(3, 2), Fraction(2, 7))):
        printed = printed_heun_parameters(lam, r)
        derived = derived_heun_parameters(lam, r, 1 + lam / 2)
        assert derived["exact_form"]
        assert tuple(derived[k] for k in ("alpha", "beta", "gamma", "delta", "eta")) == printed


def test_heun_candidate_against_direct_integration():
    lam, r = 0.5, 1.0
    params = printed_heun_parameters(lam, r)
    t0, t1 = 0.5, 5.0
    y, dy, _ = heun_candidate(lam, r, t0, params, 1 + lam / 2)
    ode = L7Coefficients(lam, r)

    def f(t, u):
        return [u[1], ode.p(t) * u[1] + ode.q(t) * u[0]]
    sol = solve_ivp(f, (t0, t1), [y, dy], method="DOP853", rtol=1e-13, atol=1e-15, t_eval=[2.0, 4.0, 5.0])
    for t, v in zip(sol.t, sol.y[0]):
        assert v == pytest.approx(heun_candidate(lam, r, t, params, 1 + lam / 2)[0], rel=1e-9)


def test_heun_branch_rejects_points_outside_disk():
    with pytest.raises(OutsideDisk):
        verify_heun_branch(1.0, 0.5, [1.0, 3.9])


def test_l7_wronskian_proportional_to_t_minus_8r():
    _, ratio = l7_wronskian_ratio(1.5, 1 / 3, 3.0, 5.0)
    assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-8
    _, ratio = l7_wronskian_ratio(0.5, -0.5, 1.0, 3.0)
    assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-8
