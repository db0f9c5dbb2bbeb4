from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import strategies as st

from umemura.exact import BiPoly

R, T = sp.symbols("r t")


def to_sympy(p: BiPoly):
    return sp.Add(*[sp.Rational(c.numerator, c.denominator) * R**i * T**j
                    for (i, j), c in p.items()])


def from_sympy(expr) -> BiPoly:
    poly = sp.Poly(sp.expand(expr), R, T)
    return BiPoly({(i, j): Fraction(int(c.p), int(c.q)) for (i, j), c in poly.terms()})


small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def bipolys(draw, max_deg=3, max_terms=6):
    keys = draw(st.lists(st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)),
                         max_size=max_terms, unique=True))
    return BiPoly({k: draw(small_fractions) for k in keys})


@pytest.fixture(scope="session")
def sym_sigmas():
    from umemura.core import sigma_recurrence_table
    return sigma_recurrence_table(8)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
