from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sprayforge.polycore import MPoly

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


# strategies -----------------------------------------------------------------------------

small_fraction = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def polys(draw, nvars: int = 3, max_degree: int = 3, max_terms: int = 5, coeffs=None):
    coeffs = coeffs or st.integers(-5, 5)
    n_terms = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n_terms):
        e = tuple(draw(st.integers(0, max_degree)) for _ in range(nvars))
        if sum(e) > max_degree:
            continue
        terms[e] = draw(coeffs)
    return MPoly(nvars, terms)


# sympy bridge ---------------------------------------------------------------------------


def sym_vars(n: int):
    return sympy.symbols(f"x1:{n + 1}")


def to_sympy(p: MPoly, xs=None):
    xs = xs or sym_vars(p.nvars)
    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for x, k in zip(xs, e):
            term *= x**k
        expr += term
    return sympy.expand(expr)


def from_sympy(expr, n: int) -> MPoly:
    xs = sym_vars(n)
    poly = sympy.Poly(sympy.expand(expr), *xs)
    return MPoly(n, {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})


@pytest.fixture
def sympy_bridge():
    return to_sympy, from_sympy
