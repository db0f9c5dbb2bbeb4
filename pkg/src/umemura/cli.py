"""``umemura`` command-line front end.

Exit codes: 0 success, 1 a check failed (or a domain error), 2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import output
from .cache import cache_load, cache_store
from .config import Config, load_config
from .core import SYMBOLIC, UmemuraCache, compute_entries, parse_r_mode, sigma_recurrence_table
from .errors import UmemuraError
from .exact import poly_to_doc
from .genfunc import riccati_formal_residual
from .pv import build_rational_solution, pv_parameters, pv_residual, sample_solution
from .report import MISMATCH
from .special import (L7Coefficients, heun_candidate, kummer_candidate, ode_residual,
                      printed_heun_parameters)
from .suites import SUITES, run_suite

COMMANDS = ("sigma", "entries", "pv", "series", "verify", "eval")


class UsageError(Exception):
    pass


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(Fraction(x.strip())) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _rational_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a list of rationals: {text!r}") from None


def _r_arg(text: str):
    try:
        return parse_r_mode(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"--r must be 'sym' or a rational, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="umemura", description="Umemura polynomials for Painleve V.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--n", type=int, help="polynomial index")
    p.add_argument("--max-n", type=int, dest="max_n", help="cap every n range (verify)")
    p.add_argument("--r", type=_r_arg, default=SYMBOLIC, help="'sym' or a rational such as 1/3")
    p.add_argument("--N", type=int, dest="N", help="number of Hankel entries / series order")
    p.add_argument("--lambda", type=_float_list, dest="lam", help="comma-separated lambda values")
    p.add_argument("--t", type=_rational_list, dest="t", help="comma-separated sample points")
    p.add_argument("--format", choices=("json", "csv", "latex"), default="json")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--suite", default="all", choices=sorted(SUITES), help="verify only")
    p.add_argument("--strict-heun", action="store_true", default=None, dest="strict_heun",
                   help="treat a Heun MISMATCH as a failure")
    return p


def _need(args, name: str, minimum: int = 0) -> int:
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"{args.command} needs --{name.replace('_', '-')}")
    if value < minimum:
        raise UsageError(f"--{name} must be >= {minimum}")
    return value


def _r_tag(r) -> str:
    return "sym" if r == SYMBOLIC else output.fmt_rational(r)


def _emit(text: str, args, name: str) -> None:
    sys.stdout.write(text)
    if args.out:
        ext = {"json": "json", "csv": "csv", "latex": "tex"}[args.format]
        output.write_text(args.out, f"{name}.{ext}", text)


# -- cache ------------------------------------------------------------------

def _open_cache(cfg: Config, r) -> tuple[UmemuraCache | None, str]:
    path = cfg.resolved_cache_path()
    if not path:
        return None, ""
    if os.path.exists(path):
        cache = cache_load(path)
        if _r_tag(cache.r_mode) == _r_tag(r):
            return cache, path
        return None, ""  # cache belongs to another r; leave it alone
    return UmemuraCache(r_mode=r), path


# -- commands ---------------------------------------------------------------

def cmd_sigma(args, cfg: Config) -> int:
    n = _need(args, "n")
    cache, path = _open_cache(cfg, args.r)
    if cache is not None and n in cache.sigma:
        poly = cache.sigma[n]
    else:
        table = sigma_recurrence_table(n, args.r)
        poly = table[n]
        if cache is not None:
            for k, s in enumerate(table):
                cache.put(k, s, "recurrence")
            cache_store(cache, path)
    _emit(output.render_poly(poly, args.format), args, f"sigma_{n}")
    return 0


def cmd_entries(args, cfg: Config) -> int:
    N = _need(args, "N")
    seq = compute_entries(N, args.r)
    cache, path = _open_cache(cfg, args.r)
    if cache is not None:
        cache.extend_entries(seq.entries)
        cache_store(cache, path)
    if args.format == "json":
        text = output.dumps({"r": _r_tag(args.r), "entries": [poly_to_doc(a) for a in seq.entries]})
    elif args.format == "csv":
        rows = [[k, i, j, output.fmt_rational(c)]
                for k, a in enumerate(seq.entries) for (i, j), c in a.canonical_terms()]
        text = output.rows_csv(["k", "deg_r", "deg_t", "coefficient"], rows)
    else:
        text = "".join(f"a_{{{k}}} = {output.poly_latex(a)}\n" for k, a in enumerate(seq.entries))
    _emit(text, args, f"entries_{N}")
    return 0


def cmd_pv(args, cfg: Config) -> int:
    n = _need(args, "n")
    sol = build_rational_solution(n, args.r)
    params = pv_parameters(n, args.r)
    zero = pv_residual(sol, params).is_zero()
    samples = sample_solution(sol, args.t) if args.t else []
    if args.format == "json":
        doc = {"n": n, "r": _r_tag(args.r),
               "params": {k: poly_to_doc(v) for k, v in zip(("alpha", "beta", "gamma", "delta"),
                                                             params.as_tuple())},
               "y": {"num": poly_to_doc(sol.y.num), "den": poly_to_doc(sol.y.den)},
               "residual_zero": zero,
               "samples": [{"t": output.fmt_rational(s.t),
                            "y": None if s.pole else output.fmt_rational(s.y)} for s in samples]}
        text = output.dumps(doc)
    elif args.format == "csv":
        text = output.samples_csv(samples)
    else:
        text = rf"y_{{{n}}} = \frac{{{output.poly_latex(sol.y.num)}}}{{{output.poly_latex(sol.y.den)}}}" + "\n"
    _emit(text, args, f"pv_{n}")
    if not zero:
        print(f"FAIL: residual of y_{n} is nonzero", file=sys.stderr)
        return 1
    return 0


def cmd_series(args, cfg: Config) -> int:
    N = args.N if args.N is not None else cfg.series_N
    if N < 2:
        raise UsageError("--N must be >= 2")
    res = riccati_formal_residual(N, r_mode=args.r)
    ok = all(c.is_zero() for _, c in res)
    if args.format == "json":
        text = output.dumps({"N": N, "r": _r_tag(args.r), "all_zero": ok,
                             "orders": [{"k": k, "residual": poly_to_doc(c)} for k, c in res]})
    elif args.format == "csv":
        text = output.rows_csv(["k", "zero"], [[k, c.is_zero()] for k, c in res])
    else:
        text = "".join(rf"[\lambda^{{{k}}}]\ {output.poly_latex(c)}" + "\n" for k, c in res)
    _emit(text, args, f"series_{N}")
    return 0 if ok else 1


def cmd_eval(args, cfg: Config) -> int:
    """Closed-form Y1 (Kummer at r = 0, printed Heun form otherwise) and its Y1-ODE residual."""
    if args.r == SYMBOLIC:
        raise UsageError("eval needs a numeric --r")
    if not args.t:
        raise UsageError("eval needs --t")
    r = float(args.r)
    lams = args.lam or cfg.lambda_samples
    rows = []
    for lam in lams:
        ode = L7Coefficients(lam, r)
        for t in args.t:
            t = float(t)
            if r == 0:
                y, dy, d2y = kummer_candidate(lam, t)
            else:
                y, dy, d2y = heun_candidate(lam, r, t, printed_heun_parameters(lam, r), 1 + lam / 2)
            rows.append([lam, r, t, y, ode_residual(ode, t, y, dy, d2y)])
    header = ["lambda", "r", "t", "Y1", "residual"]
    if args.format == "json":
        text = output.dumps([dict(zip(header, row)) for row in rows])
    elif args.format == "csv":
        text = output.rows_csv(header, rows)
    else:
        raise UsageError("eval supports json and csv")
    _emit(text, args, "eval")
    return 0


def write_verify_artifacts(report, out_dir: str) -> list[str]:
    """report.json, heun_verdicts.json and one CSV per table; all byte-stable.
    Wall times go only to report.txt."""
    paths = [output.write_text(out_dir, "report.json", output.dumps(report.to_dict()))]
    verdicts = [b for res in report.results for b in res.data.get("verdicts", [])]
    if verdicts:
        paths.append(output.write_text(out_dir, "heun_verdicts.json", output.dumps(verdicts)))
    for res in report.results:
        for name, (header, rows) in sorted(res.tables.items()):
            paths.append(output.write_text(out_dir, f"{name}.csv", output.rows_csv(header, rows)))
    paths.append(output.write_text(out_dir, "report.txt", "\n".join(report.summary_lines()) + "\n"))
    return paths


def cmd_verify(args, cfg: Config) -> int:
    cfg = cfg.capped(args.max_n)
    cache = None
    path = cfg.resolved_cache_path()
    if path and os.path.exists(path):
        cache = cache_load(path)
    report = run_suite(args.suite, cfg, cache)
    print("\n".join(report.summary_lines()))
    write_verify_artifacts(report, args.out or cfg.output_dir)
    mismatches = [r.check_id for r in report.results if r.verdict == MISMATCH]
    if mismatches and not cfg.strict_heun:
        print(f"note: MISMATCH in {', '.join(mismatches)} is reported but not fatal "
              "(use --strict-heun)", file=sys.stderr)
    return report.exit_code


HANDLERS = {"sigma": cmd_sigma, "entries": cmd_entries, "pv": cmd_pv, "series": cmd_series,
            "eval": cmd_eval, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, strict_heun=args.strict_heun)
    except (OSError, ValueError) as exc:
        print(f"umemura: config: {exc}", file=sys.stderr)
        return 2
    try:
        return HANDLERS[args.command](args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"umemura: error: {exc}", file=sys.stderr)
        return 2
    except (UmemuraError, OSError, ValueError) as exc:
        print(f"umemura: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
