"""The verification suite run by ``umemura verify``.

Each check returns a CheckResult.  Numeric defaults are the acceptance
thresholds; the Config only narrows n ranges and picks sample points.
"""
from __future__ import annotations

import math
import time
import traceback
from fractions import Fraction
from typing import Callable

import numpy as np

from .config import Config
from .core import (SYMBOLIC, T, UmemuraCache, compute_entries, cross_check, hankel_minors,
                   parse_r_mode, sigma_recurrence_table, verify_scaled_toda)
from .errors import NotDivisible, ResonantSeries, UmemuraError
from .exact import BiPoly, exact_div
from .genfunc import (f_from_Y, f_value, fundamental_wronskian, integrate_linear,
                      riccati_formal_residual, riccati_numeric_residual)
from .ode import dopri5
from .pv import build_rational_solution, pv_parameters, pv_residual
from .report import FAIL, MISMATCH, PASS, CheckResult, Report
from .special import (HeunCParams, L7Coefficients, frobenius_exponents, frobenius_series,
                      heunc_coefficients, heunc_derivs, heunc_ode_residual, integrate_l7,
                      l7_wronskian_ratio, verify_heun_branch, verify_kummer_branch)


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


class SymbolicTables:
    """Shared symbolic-r tables so that several checks reuse one computation."""

    def __init__(self, cache: UmemuraCache | None = None):
        self.cache = cache
        self._rec: list[BiPoly] = []
        self._minors: list[BiPoly] = []
        self._entries = None

    def recurrence(self, n_max: int) -> list[BiPoly]:
        if len(self._rec) <= n_max:
            self._rec = sigma_recurrence_table(n_max, SYMBOLIC)
        return self._rec[: n_max + 1]

    def entries(self, N: int):
        if self._entries is None or self._entries.N < N:
            self._entries = compute_entries(N, SYMBOLIC)
        return self._entries

    def minors(self, n_max: int) -> list[BiPoly]:
        if len(self._minors) < n_max:
            self._minors = hankel_minors(n_max, self.entries(2 * n_max - 2))
        return self._minors[:n_max]


# -- exact checks -----------------------------------------------------------

def check_hankel_recurrence(n_max: int = 10, r_mode=SYMBOLIC, cache: UmemuraCache | None = None,
                            time_limit: float | None = 60.0, check_id: str = "A1") -> CheckResult:
    start = time.perf_counter()
    rep = cross_check(n_max, r_mode, cache)
    elapsed = time.perf_counter() - start
    r_tag = "sym" if rep.r_mode == SYMBOLIC else str(rep.r_mode)
    ok = rep.all_equal and (time_limit is None or elapsed < time_limit)
    detail = f"n=2..{n_max}, r={r_tag}: " + ("all equal" if rep.all_equal
                                             else f"mismatch at n={rep.mismatches}")
    if time_limit is not None and elapsed >= time_limit:
        detail += f"; {elapsed:.1f}s exceeds {time_limit:.0f}s"
    rows = [[row.n, row.equal, row.deg_t, row.deg_r] for row in rep.rows]
    return CheckResult(check_id, {"n_max": n_max, "r": r_tag}, _verdict(ok), detail,
                       data={"mismatches": rep.mismatches},
                       tables={f"crosscheck_{check_id}": (["n", "equal", "deg_t", "deg_r"], rows)})


def check_polynomiality(n_max: int = 12, tables: SymbolicTables | None = None) -> CheckResult:
    tables = tables or SymbolicTables()
    problems = []
    try:
        tables.recurrence(n_max)
    except NotDivisible as exc:
        problems.append(f"recurrence: {exc}")
    minors = tables.minors(n_max)
    for n in range(2, n_max + 1):
        try:
            exact_div(minors[n - 1], T ** (n * (n - 1) // 2))
        except NotDivisible:
            problems.append(f"Hankel det n={n} not divisible by t^{n * (n - 1) // 2}")
    detail = "; ".join(problems) or f"recurrence and Hankel quotients polynomial for n<={n_max}"
    return CheckResult("A2", {"n_max": n_max, "r": "sym"}, _verdict(not problems), detail)


def check_degree_law(n_max: int = 12, tables: SymbolicTables | None = None) -> CheckResult:
    tables = tables or SymbolicTables()
    sig = tables.recurrence(n_max)
    seq = tables.entries(n_max)
    bad, rows = [], []
    for n in range(n_max + 1):
        k = n * (n - 1) // 2
        s = sig[n]
        lc = s.leading_coeff_t()
        lc_ok = lc.is_constant() and lc.constant_value() == Fraction(1, 8**k)
        if s.deg_t != k or not lc_ok:
            bad.append(f"sigma_{n}")
        if seq[n].deg_t != n:
            bad.append(f"a_{n}")
        rows.append([n, s.deg_t, k, seq[n].deg_t, lc_ok])
    detail = f"counterexamples: {', '.join(bad)}" if bad else f"degree law holds for n<={n_max}"
    return CheckResult("A3", {"n_max": n_max}, _verdict(not bad), detail,
                       tables={"degree_law": (["n", "deg_t_sigma", "expected", "deg_t_a", "lc_ok"], rows)})


def check_pv(n_max: int = 6, r_values=("0", "1/3", "1/2", "-2/5", "7/4"), sym_n_max: int = 4,
             time_limit: float | None = 120.0) -> CheckResult:
    start = time.perf_counter()
    failures = []
    for r in r_values:
        for n in range(n_max + 1):
            sol = build_rational_solution(n, r)
            if not pv_residual(sol, pv_parameters(n, r)).is_zero():
                failures.append(f"n={n},r={r}")
    for n in range(sym_n_max + 1):
        sol = build_rational_solution(n, SYMBOLIC)
        if not pv_residual(sol, pv_parameters(n, SYMBOLIC)).is_zero():
            failures.append(f"n={n},r=sym")
    base = build_rational_solution(1, 0)
    params = pv_parameters(1, 0)
    insensitive = [name for name in ("alpha", "beta", "gamma", "delta")
                   if pv_residual(base, params.perturbed(name)).is_zero()]
    elapsed = time.perf_counter() - start
    problems = []
    if failures:
        problems.append("nonzero residual at " + ", ".join(failures))
    if insensitive:
        problems.append("perturbing " + ", ".join(insensitive) + " left the residual zero")
    if time_limit is not None and elapsed >= time_limit:
        problems.append(f"{elapsed:.1f}s exceeds {time_limit:.0f}s")
    detail = "; ".join(problems) or (f"residual 0 for n<={n_max} at {len(r_values)} r values, "
                                     f"n<={sym_n_max} symbolic; all 4 perturbations detected")
    return CheckResult("A4", {"n_max": n_max, "r_values": list(r_values), "sym_n_max": sym_n_max},
                       _verdict(not problems), detail)


def check_riccati_formal(N: int = 20) -> CheckResult:
    res = riccati_formal_residual(N)
    nonzero = [k for k, c in res if not c.is_zero()]
    lo = res[-1][0]
    detail = (f"orders lambda^2..lambda^{lo} vanish" if not nonzero
              else f"nonzero at orders {nonzero}")
    return CheckResult("A5", {"N": N}, _verdict(not nonzero), detail,
                       data={"orders": [k for k, _ in res]})


def check_scaled_toda(n_max: int = 8, tables: SymbolicTables | None = None) -> CheckResult:
    tables = tables or SymbolicTables()
    sig = tables.recurrence(n_max + 1)
    bad = [n for n in range(1, n_max + 1) if not verify_scaled_toda(n, sig, SYMBOLIC)]
    detail = f"mismatch at n={bad}" if bad else f"holds for 1<=n<={n_max}"
    return CheckResult("A6", {"n_max": n_max}, _verdict(not bad), detail)


# -- numeric checks ---------------------------------------------------------

def check_linearization(lambdas=(0.5, 1.0, 1.5, 2.5), rs=(1 / 3, -0.5, 2.0), t0: float = 1.0,
                        t1: float = 3.0, residual_tol: float = 1e-8, wronskian_tol: float = 1e-9,
                        identity_tol: float = 1e-12, integrator_tol: float = 1e-10,
                        n_points: int = 41) -> CheckResult:
    """Riccati residual, Wronskian constancy and F = lam Y2/Y1 along the linear system paths.

    The two forms of F are compared away from t = 8r, where the log-derivative
    form has a removable 0/0.
    """
    mesh = np.linspace(t0, t1, n_points)
    rows, worst = [], {"riccati": 0.0, "wronskian": 0.0, "identity": 0.0}
    for lam in lambdas:
        for r in rs:
            path = integrate_linear(t0, t1, (1.0, 0.0), lam, r, tol=integrator_tol, t_eval=mesh)
            path = [s for s in path if s.t in set(mesh.tolist())]
            worst["riccati"] = max(worst["riccati"], riccati_numeric_residual(path, lam, r))
            _, W = fundamental_wronskian(t0, t1, lam, r, tol=integrator_tol)
            worst["wronskian"] = max(worst["wronskian"], float(np.max(np.abs(W / W[0] - 1))))
            for s in path:
                F = f_value(s)
                if abs(s.t - 8 * r) > 1e-3:
                    G = f_from_Y(s)
                    worst["identity"] = max(worst["identity"], abs(G - F) / max(1.0, abs(F)))
                res = riccati_numeric_residual([s], lam, r)
                rows.append([lam, r, s.t, s.Y1, s.Y2, F, res])
    ok = (worst["riccati"] < residual_tol and worst["wronskian"] < wronskian_tol
          and worst["identity"] < identity_tol)
    detail = (f"max Riccati residual {worst['riccati']:.2e}, Wronskian drift {worst['wronskian']:.2e}, "
              f"F identity {worst['identity']:.2e}")
    return CheckResult("A7", {"lambda": list(lambdas), "r": list(rs), "t": [t0, t1]}, _verdict(ok),
                       detail, data={k: float(v) for k, v in worst.items()},
                       tables={"linear_paths": (["lambda", "r", "t", "Y1", "Y2", "F", "residual"], rows)})


def check_kummer(lambdas=(0.7, 1.0, 2.3), tol: float = 1e-9, integration_tol: float = 1e-7) -> CheckResult:
    reports = [verify_kummer_branch(lam, tol=tol, integration_tol=integration_tol) for lam in lambdas]
    rows = [[rep.lam, t, label, res] for rep in reports for t, label, res in rep.samples]
    bad = [rep.lam for rep in reports if rep.verdict != PASS]
    worst = max(rep.max_residual for rep in reports)
    integ = max(rep.extra.get("integration_rel_error", 0.0) for rep in reports)
    detail = (f"max Y1-ODE residual {worst:.2e}, integration agreement {integ:.2e}"
              + (f"; failed for lambda={bad}" if bad else ""))
    return CheckResult("A8", {"lambda": list(lambdas), "r": 0}, _verdict(not bad), detail,
                       data={"reports": [rep.to_dict() for rep in reports]},
                       tables={"kummer_residuals": (["lambda", "t", "candidate", "residual"], rows)})


def _sorted_real(pair):
    return sorted(float(np.real(x)) for x in pair)


def check_frobenius(lambdas=(0.5, 1.0, 1.5, 2.5), rs=(1 / 3, -0.5, 2.0), tol: float = 1e-12) -> CheckResult:
    worst, rows = 0.0, []
    for lam in lambdas:
        cases = [(0.0, 0.0, [-lam / 2, 2 + lam / 2])]
        for r in rs:
            cases.append((r, 0.0, [-lam / 2, 1 + lam / 2]))
            cases.append((r, 8 * r, [0.0, 2.0]))
        for r, point, expected in cases:
            got = _sorted_real(frobenius_exponents(L7Coefficients(lam, r), point))
            err = max(abs(a - b) for a, b in zip(got, sorted(expected)))
            worst = max(worst, err)
            rows.append([lam, r, point, got[0], got[1], err])
    return CheckResult("A9", {"lambda": list(lambdas), "r": list(rs)}, _verdict(worst < tol),
                       f"max exponent error {worst:.1e}", data={"max_error": worst},
                       tables={"frobenius_exponents": (["lambda", "r", "point", "e_low", "e_high", "error"], rows)})


def frobenius_slope(lam: float, r: float, exponent: float, point: float = 0.0,
                    h0: float = 1e-4, h1: float = 2e-4) -> float:
    """log-log slope near ``point`` of the Y1-ODE solution seeded by the series at ``exponent``.

    The seed is taken at point + h0 and integrated outward to point + h1.
    """
    ser = frobenius_series(L7Coefficients(lam, r), point, exponent, 30)
    y, dy, _ = ser.derivs(point + h0)
    sol = integrate_l7(lam, r, point + h0, point + h1, y, dy, tol=1e-12, atol=1e-300)
    return math.log(abs(float(sol.y[-1, 0])) / abs(y)) / math.log(h1 / h0)


def _two_digit_tol(e: float) -> float:
    # half a unit in the second significant digit
    return 5e-3 if e == 0 else 0.5 * 10 ** (math.floor(math.log10(abs(e))) - 1)


def _heun_rhs(p: HeunCParams):
    mu, nu = p.mu_nu()

    def f(z, y):
        P = p.alpha + (p.beta + 1) / z + (p.gamma + 1) / (z - 1)
        Q = mu / z + nu / (z - 1)
        return np.array([y[1], -P * y[1] - Q * y[0]])
    return f


def random_heun_params(rng: np.random.Generator) -> HeunCParams:
    alpha, gamma, delta, eta = rng.uniform(-2, 2, 4)
    beta = rng.uniform(0.1, 3.0)
    return HeunCParams(float(alpha), float(beta), float(gamma), float(delta), float(eta))


def check_heunc_evaluator(draws: int = 20, seed: int = 2024, residual_tol: float = 1e-9,
                          integration_tol: float = 1e-8) -> CheckResult:
    rng = np.random.default_rng(seed)
    exact = HeunCParams(Fraction(2, 3), Fraction(5, 7), Fraction(-1, 2), Fraction(3, 5), Fraction(1, 9))
    mu, _ = exact.mu_nu()
    v = heunc_coefficients(exact, 3)
    norm_ok = v[0] == 1 and heunc_derivs(exact.at(0))[0] == 1.0
    v1_ok = v[1] == -mu / (exact.beta + 1)
    worst_res = worst_int = 0.0
    rows = []
    for _ in range(draws):
        p = random_heun_params(rng)
        for z in np.linspace(-0.5, 0.5, 21):
            if z == 0:
                continue
            res = heunc_ode_residual(p.at(float(z)))
            worst_res = max(worst_res, res)
            rows.append([p.alpha, p.beta, p.gamma, p.delta, p.eta, float(z), res])
        for z0, z1 in ((0.05, 0.5), (-0.05, -0.5)):
            h, dh, _ = heunc_derivs(p.at(z0))
            zs = np.linspace(z0, z1, 10)
            sol = dopri5(_heun_rhs(p), z0, z1, [h, dh], rtol=1e-12, atol=1e-14, t_eval=zs)
            for z, yn in zip(zs, sol(zs)[:, 0]):
                ref = heunc_derivs(p.at(float(z)))[0]
                worst_int = max(worst_int, abs(yn - ref) / max(abs(ref), 1e-300))
    ok = norm_ok and v1_ok and worst_res < residual_tol and worst_int < integration_tol
    detail = (f"normalisation {'exact' if norm_ok else 'WRONG'}, v1 {'exact' if v1_ok else 'WRONG'}, "
              f"max ODE residual {worst_res:.2e}, integration agreement {worst_int:.2e}")
    return CheckResult("A10", {"draws": draws, "seed": seed}, _verdict(ok), detail,
                       data={"max_residual": worst_res, "integration_rel_error": worst_int},
                       tables={"heunc_residuals": (["alpha", "beta", "gamma", "delta", "eta", "z", "residual"], rows)})


def check_heun_branch(lambdas=(0.5, 1.0), rs=(0.5, 1.0, -1.0), tol: float = 1e-8) -> CheckResult:
    reports = [verify_heun_branch(lam, r, tol=tol) for lam in lambdas for r in rs]
    rows = [[rep.lam, rep.r, t, label, res] for rep in reports for t, label, res in rep.samples]
    blocks = [rep.verdict_block() for rep in reports]
    mismatched = [(rep.lam, rep.r) for rep in reports if rep.verdict == MISMATCH]
    verdict = MISMATCH if mismatched else PASS
    worst = max((rep.max_residual for rep in reports if rep.max_residual is not None), default=None)
    detail = (f"max residual {worst:.2e}" if worst is not None else "no residuals") + (
        f"; MISMATCH at {mismatched} for the printed Hc parameter set" if mismatched else "")
    return CheckResult("A11", {"lambda": list(lambdas), "r": list(rs)}, verdict, detail,
                       data={"verdicts": blocks, "reports": [rep.to_dict() for rep in reports]},
                       tables={"heun_residuals": (["lambda", "r", "t", "candidate", "residual"], rows)})


# -- supplementary checks ---------------------------------------------------

def check_l7_wronskian(lambdas=(0.5, 1.5), rs=(1 / 3, -0.5), tol: float = 1e-8) -> CheckResult:
    worst = 0.0
    for lam in lambdas:
        for r in rs:
            lo, hi = (1.0, 3.0) if not 1.0 <= 8 * r <= 3.0 else (3.0, 5.0)
            _, ratio = l7_wronskian_ratio(lam, r, lo, hi)
            worst = max(worst, float(np.max(np.abs(ratio / ratio[0] - 1))))
    return CheckResult("X-l7-wronskian", {"lambda": list(lambdas), "r": list(rs)},
                       _verdict(worst < tol), f"W/(t-8r) drift {worst:.2e}")


def check_frobenius_slopes(cases=((1.5, 1 / 3), (0.7, 0.0), (0.5, -0.5), (1.0, 0.25))) -> CheckResult:
    """Both exponents at t = 0 and the larger one at t = 8r; a lower exponent
    whose series resonates (integer exponent difference) is skipped."""
    bad, rows = [], []
    for lam, r in cases:
        points = [0.0] + ([8 * r] if r > 0 else [])
        for point in points:
            exps = _sorted_real(frobenius_exponents(L7Coefficients(lam, r), point))
            for e in reversed(exps):
                try:
                    slope = frobenius_slope(lam, r, e, point)
                except ResonantSeries:
                    rows.append([lam, r, point, e, "", "resonant"])
                    continue
                ok = abs(slope - e) < _two_digit_tol(e)
                rows.append([lam, r, point, e, slope, ok])
                if not ok:
                    bad.append((lam, r, point, e, round(slope, 4)))
    detail = f"slope off for {bad}" if bad else "log-log slopes match exponents to 2 digits"
    return CheckResult("X-frobenius-slope", {"cases": [list(c) for c in cases]}, _verdict(not bad), detail,
                       tables={"frobenius_slopes": (["lambda", "r", "point", "exponent", "slope", "ok"], rows)})


# -- suite assembly ---------------------------------------------------------

SUITES = {
    "core": ("A1", "A1-numeric", "A2", "A3", "A6"),
    "pv": ("A4",),
    "series": ("A5", "A7"),
    "special": ("A8", "A9", "A10", "A11", "X-l7-wronskian", "X-frobenius-slope"),
}
SUITES["all"] = tuple(c for name in ("core", "pv", "series", "special") for c in SUITES[name])


def _plan(cfg: Config, cache: UmemuraCache | None) -> dict[str, Callable[[], CheckResult]]:
    tables = SymbolicTables()
    sym_cache = cache if cache is not None and cache.r_mode == SYMBOLIC else None
    num_r = parse_r_mode(cfg.numeric_r)
    num_cache = cache if cache is not None and cache.r_mode == num_r else None
    return {
        "A1": lambda: check_hankel_recurrence(cfg.n_max_symbolic, SYMBOLIC, sym_cache),
        "A1-numeric": lambda: check_hankel_recurrence(cfg.n_max_numeric, num_r, num_cache,
                                                      time_limit=None, check_id="A1-numeric"),
        "A2": lambda: check_polynomiality(cfg.poly_n_max, tables),
        "A3": lambda: check_degree_law(cfg.poly_n_max, tables),
        "A4": lambda: check_pv(cfg.pv_n_max, cfg.pv_r_samples, cfg.pv_symbolic_n_max),
        "A5": lambda: check_riccati_formal(cfg.series_N),
        "A6": lambda: check_scaled_toda(cfg.toda_n_max, tables),
        "A7": lambda: check_linearization(cfg.lambda_samples, cfg.r_samples,
                                          residual_tol=cfg.residual_tol,
                                          integrator_tol=cfg.integrator_tol),
        "A8": lambda: check_kummer(cfg.kummer_lambdas),
        "A9": lambda: check_frobenius(cfg.lambda_samples, cfg.r_samples),
        "A10": lambda: check_heunc_evaluator(),
        "A11": lambda: check_heun_branch(cfg.heun_lambdas, cfg.heun_r, tol=cfg.residual_tol),
        "X-l7-wronskian": lambda: check_l7_wronskian(),
        "X-frobenius-slope": lambda: check_frobenius_slopes(),
    }


def run_suite(name: str = "all", cfg: Config | None = None, cache: UmemuraCache | None = None) -> Report:
    """Run a named suite.  A check that raises is recorded as FAIL, never propagated."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    cfg = cfg or Config()
    plan = _plan(cfg, cache)
    report = Report(strict_heun=cfg.strict_heun)
    for check_id in SUITES[name]:
        start = time.perf_counter()
        try:
            result = plan[check_id]()
        except (UmemuraError, ArithmeticError, ValueError) as exc:
            result = CheckResult(check_id, {}, FAIL, f"{type(exc).__name__}: {exc}",
                                 data={"traceback": traceback.format_exc().splitlines()[-3:]})
        result.wall_time = time.perf_counter() - start
        report.add(result)
    return report
