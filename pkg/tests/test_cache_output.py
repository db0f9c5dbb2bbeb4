import json
import os
from fractions import Fraction

import pytest

from umemura.cache import CACHE_VERSION, cache_from_doc, cache_load, cache_store, cache_to_doc
from umemura.core import SYMBOLIC, UmemuraCache, compute_entries, sigma_recurrence_table
from umemura.errors import CorruptCache, VersionMismatch
from umemura.exact import BiPoly, deserialize
from umemura.output import (dumps, fmt_float, poly_csv, poly_latex, render_poly, rows_csv,
                            samples_csv, write_outputs, write_text)
from umemura.pv import build_rational_solution, sample_solution

SIGMA2 = sigma_recurrence_table(2)[2]


def make_cache(n=4, r_mode=SYMBOLIC):
    cache = UmemuraCache(r_mode)
    cache.extend_entries(compute_entries(4, r_mode).entries)
    for k, s in enumerate(sigma_recurrence_table(n, r_mode)):
        cache.put(k, s, "recurrence")
    return cache


def test_store_then_load_round_trip(tmp_path):
    path = tmp_path / "c.json"
    cache = make_cache()
    cache_store(cache, str(path))
    back = cache_load(str(path))
    assert back.sigma == cache.sigma and back.method == cache.method
    assert back.entries == cache.entries and back.r_mode == SYMBOLIC
    doc = json.loads(path.read_text())
    assert set(doc) >= {"version", "entries", "sigmas", "checksums"}


def test_numeric_r_cache_round_trip(tmp_path):
    path = tmp_path / "c.json"
    cache_store(make_cache(3, Fraction(1, 3)), str(path))
    assert cache_load(str(path)).r_mode == Fraction(1, 3)


def test_bumped_version_raises(tmp_path):
    doc = cache_to_doc(make_cache())
    doc["version"] = CACHE_VERSION + 1
    with pytest.raises(VersionMismatch):
        cache_from_doc(doc)


def test_truncated_file_raises(tmp_path):
    path = tmp_path / "c.json"
    cache_store(make_cache(), str(path))
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(CorruptCache):
        cache_load(str(path))


def test_checksum_failure_raises():
    doc = cache_to_doc(make_cache())
    doc["sigmas"][2]["poly"]["terms"][0]["c"] = "1/7"
    with pytest.raises(CorruptCache):
        cache_from_doc(doc)


def test_store_is_append_only(tmp_path):
    path = str(tmp_path / "c.json")
    cache_store(make_cache(3), path)
    merged = cache_store(make_cache(5), path)
    assert merged.max_n == 5
    bad = make_cache(3)
    bad.sigma[3] = bad.sigma[3] + 1
    before = open(path).read()
    with pytest.raises(ValueError):
        cache_store(bad, path)
    assert open(path).read() == before
    with pytest.raises(ValueError):
        cache_store(make_cache(2, Fraction(1, 2)), path)


def test_json_round_trip_is_byte_identical():
    text = render_poly(SIGMA2, "json")
    assert render_poly(deserialize(text), "json") == text


def test_latex_of_sigma2():
    assert poly_latex(SIGMA2) == r"\frac{1}{8}t - r + \frac{3}{4}"
    assert poly_latex(BiPoly()) == "0"
    assert poly_latex(BiPoly({(2, 1): -1, (0, 3): Fraction(5, 2)})) == r"\frac{5}{2}t^{3} - tr^{2}"


def test_csv_of_samples():
    sol = build_rational_solution(1, 0)
    text = samples_csv(sample_solution(sol, [2, 4]))
    assert text.splitlines() == ["t,y_num,y_den,y_decimal", "2,-3,1,-3", "4,-2,1,-2"]


def test_poly_csv_canonical_order():
    assert poly_csv(SIGMA2).splitlines() == ["deg_r,deg_t,coefficient", "0,1,1/8", "1,0,-1", "0,0,3/4"]


def test_floats_use_17_significant_digits():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert float(fmt_float(1 / 3)) == 1 / 3
    assert rows_csv(["x"], [[2 / 3]]).splitlines()[1] == "0.66666666666666663"


def test_write_outputs_is_deterministic(tmp_path):
    results = {"sigma_2": SIGMA2, "meta": {"n": 2, "c": Fraction(1, 3)}}
    a = write_outputs(results, "latex", str(tmp_path / "a"))
    b = write_outputs(results, "latex", str(tmp_path / "b"))
    assert [os.path.basename(p) for p in a] == ["meta.json", "sigma_2.tex"]
    for pa, pb in zip(a, b):
        assert open(pa, "rb").read() == open(pb, "rb").read()
    assert json.loads(open(a[0]).read()) == {"n": 2, "c": "1/3"}


def test_write_error_names_the_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError) as info:
        write_text(str(blocker), "out.json", "{}")
    assert str(blocker) in str(info.value)


def test_dumps_rejects_unknown_objects():
    with pytest.raises(TypeError):
        dumps({"x": object()})
