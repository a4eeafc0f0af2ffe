"""Independent oracles: plain-Fraction linear algebra and sympy, no package internals."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import sympy

from sprayforge.polycore import MPoly


def monomials_upto(nvars: int, degree: int) -> list[tuple[int, ...]]:
    return [e for e in product(range(degree + 1), repeat=nvars) if sum(e) <= degree]


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rk, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        for i in range(len(rows)):
            if i != rk and rows[i][c] != 0:
                f = rows[i][c] / rows[rk][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def _mul_monomial(p: MPoly, e) -> dict:
    return {tuple(a + b for a, b in zip(m, e)): c for m, c in p.terms.items()}


def combination_exists(f: MPoly, gens: list[MPoly], degree: int) -> bool:
    """Search for f = sum c_i g_i with deg(c_i g_i) <= degree by exhausting the Macaulay span."""
    n = f.nvars
    cols = monomials_upto(n, degree)
    index = {m: k for k, m in enumerate(cols)}
    rows = []
    for g in gens:
        dg = g.total_degree()
        for e in monomials_upto(n, degree - dg):
            row = [Fraction(0)] * len(cols)
            for m, c in _mul_monomial(g, e).items():
                row[index[m]] = c
            rows.append(row)
    target = [Fraction(0)] * len(cols)
    for m, c in f.terms.items():
        if m not in index:
            return False
        target[index[m]] = c
    if not rows:
        return f.is_zero()
    return _rank(rows + [target]) == _rank(rows)


def random_poly(rng: random.Random, nvars: int, degree: int, terms: int, bound: int = 4) -> MPoly:
    mons = monomials_upto(nvars, degree)
    out = {}
    for _ in range(terms):
        out[rng.choice(mons)] = rng.randint(-bound, bound)
    return MPoly(nvars, out)


def membership_cases(count: int = 50, seed: int = 2024):
    """(f, gens, expected_member_or_None): half built inside the ideal, half random."""
    rng = random.Random(seed)
    cases = []
    for k in range(count):
        n = rng.randint(2, 3)
        gens = [random_poly(rng, n, rng.randint(1, 2), 3) for _ in range(2)]
        gens = [g if not g.is_zero() else MPoly.var(0, n) for g in gens]
        if k % 2 == 0:
            f = MPoly.zero(n)
            for g in gens:
                c = random_poly(rng, n, 4 - g.total_degree(), 3)
                f = f + c * g
            cases.append((f, gens, True))
        else:
            cases.append((random_poly(rng, n, rng.randint(2, 4), 4), gens, None))
    return cases


def sympy_jacobian_at(p: MPoly, point) -> list[Fraction]:
    xs = sympy.symbols(f"x1:{p.nvars + 1}")
    expr = sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x**k for x, k in zip(xs, e)]) for e, c in p.terms.items()),
        sympy.Integer(0),
    )
    subs = {x: sympy.Rational(v.numerator, v.denominator) for x, v in zip(xs, point)}
    out = []
    for x in xs:
        val = sympy.Rational(sympy.diff(expr, x).subs(subs))
        out.append(Fraction(int(val.p), int(val.q)))
    return out


def graph_cases(count: int = 5, seed: int = 11):
    """Ideals (x1 - a(x3), x2 - b(x3)) with rational points parametrized by x3."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        a = random_poly(rng, 1, rng.randint(1, 3), 3)
        b = random_poly(rng, 1, rng.randint(1, 3), 3)
        out.append((a, b))
    return out
