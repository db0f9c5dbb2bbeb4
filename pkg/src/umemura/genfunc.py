"""Generating function of the Hankel entries and its linearisation.

F(t, lam) = sum_n a_n lam**-n satisfies the Riccati equation

    t lam F_t = -t (t/8 - r) F^2 + (lam^2 - 3/4 t lam) F - lam^2

which the substitution F = lam Y2 / Y1 turns into the trace-free system
Y' = A Y with

    A = [[-(lam - 3t/4)/(2t), t/8 - r],
         [-1/t,               (lam - 3t/4)/(2t)]].
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import SYMBOLIC, compute_entries, r_poly
from .errors import SingularPoint, ZeroY1
from .exact import BiPoly, RatFunc, as_rational
from .ode import Solution, dopri5

T = BiPoly.t()


@dataclass(frozen=True)
class LambdaSeries:
    """Truncated series sum_{n<=N} coeffs[n] * lam**-n."""

    coeffs: tuple[BiPoly, ...]

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def eval(self, t0, r0, lam) -> Fraction:
        lam = as_rational(lam)
        return sum((c.eval(t0, r0) / lam ** n for n, c in enumerate(self.coeffs)), Fraction(0))


def truncated_F(N: int, r_mode=SYMBOLIC) -> LambdaSeries:
    return LambdaSeries(compute_entries(N, r_mode).entries)


def riccati_formal_residual(N: int | None = None, series: LambdaSeries | Sequence[BiPoly] | None = None,
                            r_mode=SYMBOLIC) -> list[tuple[int, BiPoly]]:
    """Order-by-order residual of the Riccati equation for a truncated F.

    Returns ``[(k, c_k), ...]`` for k = 2, 1, ..., 2 - N, where

        c_k = a_j - t a'_{j-1} - 3/4 t a_{j-1} - t (t/8 - r) sum_{i<=j-2} a_i a_{j-2-i} - [j == 0]

    with j = 2 - k.  These are exactly the orders fixed by a_0..a_N; every
    c_k vanishes identically iff the truncation is consistent.
    """
    if series is None:
        series = truncated_F(N, r_mode)
    a = list(series.coeffs if isinstance(series, LambdaSeries) else series)
    if N is None:
        N = len(a) - 1
    if N < 2:
        raise ValueError("N must be >= 2")
    a = a[: N + 1]
    c = T * Fraction(1, 8) - r_poly(r_mode)
    tc = T * c
    out = []
    for j in range(N + 1):
        val = a[j]
        if j == 0:
            val = val - 1
        else:
            prev = a[j - 1]
            val = val - T * (prev.diff_t() + prev.scale(Fraction(3, 4)))
        if j >= 2:
            conv = BiPoly()
            for i in range(j - 1):
                conv = conv + a[i] * a[j - 2 - i]
            val = val - tc * conv
        out.append((2 - j, val))
    return out


# -- the linear system ------------------------------------------------------

@dataclass(frozen=True)
class CoefficientMatrix:
    """A(t) for fixed (lam, r).

    With exact lam and r the entries are rational functions of t
    (``entries``); calling the object evaluates at a float t.
    """

    lam: object
    r: object

    def entries(self) -> tuple[tuple[RatFunc, RatFunc], tuple[RatFunc, RatFunc]]:
        lam = as_rational(self.lam)
        r = as_rational(self.r)
        h = RatFunc(T.scale(Fraction(-3, 4)) + lam, T.scale(2))  # (lam - 3t/4)/(2t)
        c = RatFunc(T.scale(Fraction(1, 8)) - r)
        return ((-h, c), (RatFunc(-1, T), h))

    def __call__(self, t: float) -> np.ndarray:
        if t == 0:
            raise SingularPoint("A is singular at t = 0")
        lam, r = float(self.lam), float(self.r)
        h = (lam - 0.75 * t) / (2 * t)
        return np.array([[-h, t / 8 - r], [-1 / t, h]])

    def trace(self, t: float) -> float:
        m = self(t)
        return m[0, 0] + m[1, 1]


def matrix_A(t, lam, r):
    """Entries of A as printed; exact in, exact out.

    Returns ((A11, A12), (A21, A22)).
    """
    if t == 0:
        raise SingularPoint("A is singular at t = 0")
    if all(isinstance(x, (int, Fraction)) for x in (t, lam, r)):
        t, lam, r = (as_rational(x) for x in (t, lam, r))
        h = (lam - Fraction(3, 4) * t) / (2 * t)
        return ((-h, t / 8 - r), (-1 / t, h))
    t, lam, r = float(t), float(lam), float(r)
    h = (lam - 0.75 * t) / (2 * t)
    return ((-h, t / 8 - r), (-1 / t, h))


@dataclass(frozen=True)
class LinearState:
    t: float
    Y1: float
    Y2: float
    lam: float
    r: float


def _check_path(t0: float, t1: float, r: float) -> None:
    # A is analytic at t = 8r (only A12 vanishes there); t = 0 is the one singularity.
    if min(t0, t1) <= 0 <= max(t0, t1):
        raise SingularPoint("integration interval contains t = 0")


def linear_rhs(lam: float, r: float):
    A = CoefficientMatrix(lam, r)

    def f(t, y):
        m = A(t)
        if y.size == 2:
            return m @ y
        return (m @ y.reshape(2, -1, order="F")).reshape(-1, order="F")
    return f


def integrate_linear_solution(t0: float, t1: float, Y0, lam: float, r: float,
                              tol: float = 1e-10, atol: float = 1e-12, t_eval=None) -> Solution:
    _check_path(t0, t1, r)
    return dopri5(linear_rhs(lam, r), t0, t1, np.asarray(Y0, dtype=float), rtol=tol, atol=atol,
                  t_eval=t_eval)


def integrate_linear(t0: float, t1: float, Y0, lam: float, r: float,
                     tol: float = 1e-10, atol: float = 1e-12, t_eval=None) -> list[LinearState]:
    """Adaptive solution path of Y' = A Y; ``t_eval`` points are forced onto the mesh."""
    sol = integrate_linear_solution(t0, t1, Y0, lam, r, tol, atol, t_eval)
    return [LinearState(float(t), float(y[0]), float(y[1]), float(lam), float(r))
            for t, y in zip(sol.t, sol.y)]


def f_from_Y(state: LinearState) -> float:
    """F via the log-derivative form, with Y1' taken from the system.

    F = lam/(t/8 - r) * (Y1'/Y1 + (lam - 3t/4)/(2t)); algebraically this is
    lam * Y2 / Y1.
    """
    if state.Y1 == 0:
        raise ZeroY1("Y1 vanishes")
    c = state.t / 8 - state.r
    if c == 0:
        raise SingularPoint("t = 8r")
    m = CoefficientMatrix(state.lam, state.r)(state.t)
    dY1 = m[0, 0] * state.Y1 + m[0, 1] * state.Y2
    return state.lam / c * (dY1 / state.Y1 + (state.lam - 0.75 * state.t) / (2 * state.t))


def f_value(state: LinearState) -> float:
    if state.Y1 == 0:
        raise ZeroY1("Y1 vanishes")
    return state.lam * state.Y2 / state.Y1


def riccati_residual(t, F, F_t, lam: float, r: float):
    """t lam F_t + t (t/8 - r) F^2 - (lam^2 - 3/4 t lam) F + lam^2, vectorised."""
    t = np.asarray(t, dtype=float)
    return t * lam * F_t + t * (t / 8 - r) * F**2 - (lam**2 - 0.75 * t * lam) * F + lam**2


def riccati_numeric_residual(path: Sequence[LinearState], lam: float, r: float,
                             f_scale: float = 1.0) -> float:
    """Max |Riccati residual| along a path, F = lam Y2/Y1, F_t from Y' = A Y.

    ``f_scale`` multiplies F (and so F_t) before the residual is formed;
    only the sensitivity check uses it.
    """
    A = CoefficientMatrix(lam, r)
    worst = 0.0
    for s in path:
        if s.Y1 == 0:
            raise ZeroY1(f"Y1 vanishes at t={s.t}")
        m = A(s.t)
        d1 = m[0, 0] * s.Y1 + m[0, 1] * s.Y2
        d2 = m[1, 0] * s.Y1 + m[1, 1] * s.Y2
        F = lam * s.Y2 / s.Y1
        F_t = lam * (d2 * s.Y1 - s.Y2 * d1) / s.Y1**2
        res = riccati_residual(s.t, f_scale * F, f_scale * F_t, lam, r)
        worst = max(worst, abs(float(res)))
    return worst


def fundamental_wronskian(t0: float, t1: float, lam: float, r: float, Ya=(1.0, 0.0), Yb=(0.0, 1.0),
                          tol: float = 1e-10, atol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Integrate two solutions on a shared mesh; return (t, W) with W = Ya1 Yb2 - Ya2 Yb1."""
    _check_path(t0, t1, r)
    y0 = np.array([Ya[0], Ya[1], Yb[0], Yb[1]], dtype=float)
    sol = dopri5(linear_rhs(lam, r), t0, t1, y0, rtol=tol, atol=atol)
    W = sol.y[:, 0] * sol.y[:, 3] - sol.y[:, 1] * sol.y[:, 2]
    return sol.t, W


def eliminate_Y2(t, lam, r):
    """Exact (p, q) with Y1'' = p Y1' + q Y1, obtained from Y' = A Y at a point.

    Uses Y2 = (Y1' - A11 Y1)/A12 and differentiates A exactly.
    """
    t = as_rational(t)
    (a11, a12), (a21, a22) = CoefficientMatrix(lam, r).entries()
    ev = lambda f: f.eval(t)  # noqa: E731
    A11, A12, A21, A22 = ev(a11), ev(a12), ev(a21), ev(a22)
    dA11, dA12 = ev(a11.diff_t()), ev(a12.diff_t())
    if A12 == 0:
        raise SingularPoint("t = 8r")
    # Y1'' = dA11 Y1 + A11 Y1' + dA12 Y2 + A12 (A21 Y1 + A22 Y2)
    y2_from_dy1 = 1 / A12          # coefficient of Y1' in Y2
    y2_from_y1 = -A11 / A12        # coefficient of Y1 in Y2
    p = A11 + (dA12 + A12 * A22) * y2_from_dy1
    q = dA11 + A12 * A21 + (dA12 + A12 * A22) * y2_from_y1
    return p, q
