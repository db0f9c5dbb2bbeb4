"""Rational solutions of Painleve V built from Umemura polynomials.

    y(t) = - sigma_n(t, r+1/2) sigma_{n+1}(t, r+1/4) / (sigma_n(t, r) sigma_{n+1}(t, r+3/4))

with parameters (alpha, beta, gamma, delta) = (2r^2, -2(r - n/2)^2, n, -1/2).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable

from .core import SYMBOLIC, parse_r_mode, r_poly, sigma_recurrence_table
from .errors import DegenerateDenominator, PoleAtSample
from .exact import BiPoly, RatFunc, as_rational

T = BiPoly.t()


@dataclass(frozen=True)
class PVParams:
    alpha: BiPoly
    beta: BiPoly
    gamma: BiPoly
    delta: BiPoly

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)

    def perturbed(self, name: str, amount=1) -> "PVParams":
        return replace(self, **{name: getattr(self, name) + amount})


@dataclass(frozen=True)
class RationalSolution:
    n: int
    r: object
    y: RatFunc


@dataclass(frozen=True)
class Sample:
    t: Fraction
    y: Fraction | None
    pole: bool = False


def pv_parameters(n: int, r=SYMBOLIC) -> PVParams:
    if n < 0:
        raise ValueError("n must be nonnegative")
    rp = r_poly(r)
    half_n = Fraction(n, 2)
    return PVParams(
        alpha=(rp * rp).scale(2),
        beta=((rp - half_n) * (rp - half_n)).scale(-2),
        gamma=BiPoly.constant(n),
        delta=BiPoly.constant(Fraction(-1, 2)),
    )


def build_rational_solution(n: int, r=SYMBOLIC, sigmas: dict | None = None) -> RationalSolution:
    """Assemble y as an unreduced RatFunc.

    For numeric r the sigmas are computed with symbolic r and then shifted and
    specialised, since the shifts act on r.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    r = parse_r_mode(r)
    if sigmas is None:
        tab = sigma_recurrence_table(n + 1, SYMBOLIC)
    else:
        tab = [sigmas[k] for k in range(n + 2)]
    s_n, s_n1 = tab[n], tab[n + 1]
    num = -(s_n.shift_r(Fraction(1, 2)) * s_n1.shift_r(Fraction(1, 4)))
    den = s_n * s_n1.shift_r(Fraction(3, 4))
    if r != SYMBOLIC:
        num = num.subs_r(r)
        den = den.subs_r(r)
    return RationalSolution(n, r, RatFunc(num, den))


def pv_residual(sol: RationalSolution, params: PVParams) -> BiPoly:
    """Cleared numerator of P_V's LHS - RHS at y = N/D.

    The equation is multiplied by 2 t^2 y (y-1) D^5, which turns it into a
    polynomial identity.  With y' = P/D^2 (P = N'D - ND') and
    y'' = (P'D - 2PD')/D^3 from the quotient rule:

        2t^2 N(N-D)(P'D - 2PD') - t^2(N-D)P^2 - 2t^2 N P^2 + 2t N(N-D) P D
        - 2(N-D)^3 (alpha N^2 + beta D^2) - 2 gamma t N^2 (N-D) D^2
        - 2 delta t^2 N^2 (N+D) D^2

    The zero polynomial certifies the solution exactly.
    """
    N, D = sol.y.num, sol.y.den
    if not D:
        raise DegenerateDenominator("y has zero denominator")
    a, b, g, d = params.as_tuple()
    dN, dD = N.diff_t(), D.diff_t()
    P = dN * D - N * dD
    dP = P.diff_t()
    NmD = N - D
    NpD = N + D
    N2 = N * N
    D2 = D * D
    P2 = P * P
    t2 = T * T
    res = (t2 * N * NmD * (dP * D - (P * dD).scale(2))).scale(2)
    res = res - t2 * NmD * P2 - (t2 * N * P2).scale(2)
    res = res + (T * N * NmD * P * D).scale(2)
    res = res - (NmD * NmD * NmD * (a * N2 + b * D2)).scale(2)
    res = res - (g * T * N2 * NmD * D2).scale(2)
    res = res - (d * t2 * N2 * NpD * D2).scale(2)
    return res


def sample_solution(sol: RationalSolution, grid: Iterable) -> list[Sample]:
    """Evaluate y exactly on a grid of rational t; poles are flagged per point."""
    out = []
    r0 = 0 if sol.r == SYMBOLIC else sol.r
    if sol.r == SYMBOLIC and (sol.y.num.deg_r > 0 or sol.y.den.deg_r > 0):
        raise ValueError("sampling needs a numeric r")
    for t in grid:
        t = as_rational(t)
        den = sol.y.den.eval(t, r0)
        if not den:
            out.append(Sample(t, None, pole=True))
        else:
            out.append(Sample(t, sol.y.num.eval(t, r0) / den))
    return out


def sample_or_raise(sol: RationalSolution, t) -> Fraction:
    s = sample_solution(sol, [t])[0]
    if s.pole:
        raise PoleAtSample(f"y has a pole at t={s.t}")
    return s.y
