"""JSON, CSV and LaTeX renderers.  Output is canonical so reruns are byte-identical."""
from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import BiPoly, poly_to_doc, serialize


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, BiPoly):
        return poly_to_doc(obj)
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _latex_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"


def poly_latex(p: BiPoly) -> str:
    """LaTeX in canonical order (descending t-degree, then r-degree)."""
    if not p:
        return "0"
    out = []
    for idx, ((i, j), c) in enumerate(p.canonical_terms()):
        mono = ""
        if j:
            mono += "t" if j == 1 else f"t^{{{j}}}"
        if i:
            mono += "r" if i == 1 else f"r^{{{i}}}"
        mag = abs(c)
        body = mono if (mono and mag == 1) else _latex_coeff(mag) + mono
        if idx == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def poly_csv(p: BiPoly) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["deg_r", "deg_t", "coefficient"])
    for (i, j), c in p.canonical_terms():
        w.writerow([i, j, fmt_rational(c)])
    return buf.getvalue()


def rows_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(x) if isinstance(x, float) else
                    fmt_rational(x) if isinstance(x, Fraction) else x for x in row])
    return buf.getvalue()


def samples_csv(samples) -> str:
    """Columns t, y_num, y_den, y_decimal; poles get empty value columns."""
    rows = []
    for s in samples:
        if s.pole:
            rows.append([fmt_rational(s.t), "", "", "pole"])
        else:
            rows.append([fmt_rational(s.t), str(s.y.numerator), str(s.y.denominator),
                         fmt_float(float(s.y))])
    return rows_csv(["t", "y_num", "y_den", "y_decimal"], rows)


def render_poly(p: BiPoly, fmt: str) -> str:
    if fmt == "json":
        return serialize(p) + "\n"
    if fmt == "csv":
        return poly_csv(p)
    if fmt == "latex":
        return poly_latex(p) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_text(out_dir: str, name: str, text: str) -> str:
    path = os.path.join(out_dir, name)
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_outputs(results: dict[str, object], fmt: str, out_dir: str) -> list[str]:
    """Write each named result in ``fmt``; BiPoly values use the poly renderers,
    anything else goes through JSON.  Returns the written paths."""
    ext = {"json": "json", "csv": "csv", "latex": "tex"}[fmt]
    paths = []
    for name in sorted(results):
        value = results[name]
        if isinstance(value, BiPoly):
            text = render_poly(value, fmt)
        elif isinstance(value, str):
            text = value
        else:
            text = dumps(value)
            paths.append(write_text(out_dir, f"{name}.json", text))
            continue
        paths.append(write_text(out_dir, f"{name}.{ext}", text))
    return paths
