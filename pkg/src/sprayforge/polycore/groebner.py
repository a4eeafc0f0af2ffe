"""Buchberger's algorithm with a step budget and optional cofactor tracking.

The budget counts S-pair reductions.  Exceeding it raises
ResourceBudgetError; a partial basis is never returned.
"""

from __future__ import annotations

import contextlib
import heapq
from contextvars import ContextVar
from typing import Sequence

from ..errors import ResourceBudgetError
from .poly import GREVLEX, MonomialOrder, MPoly

DEFAULT_STEP_BUDGET = 20000
_step_budget: ContextVar[int] = ContextVar("groebner_step_budget", default=DEFAULT_STEP_BUDGET)


@contextlib.contextmanager
def step_budget(steps: int):
    """Temporarily cap the number of S-pair reductions per Groebner computation."""
    token = _step_budget.set(int(steps))
    try:
        yield
    finally:
        _step_budget.reset(token)


def current_budget() -> int:
    return _step_budget.get()


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_scaled(target: dict, g: MPoly, shift, coef) -> None:
    # target -= coef * x^shift * g, in place
    for e, c in g.terms.items():
        ne = tuple(x + y for x, y in zip(e, shift))
        v = target.get(ne, 0) - coef * c
        if v:
            target[ne] = v
        else:
            target.pop(ne, None)


class _Elem:
    __slots__ = ("poly", "lm", "lc", "cof")

    def __init__(self, poly: MPoly, order: MonomialOrder, cof=None):
        self.poly = poly
        self.lm = poly.leading_monomial(order)
        self.lc = poly.terms[self.lm]
        self.cof = cof


def _reduce(p: MPoly, basis: Sequence[_Elem], order: MonomialOrder, track: int = 0):
    """Full reduction of ``p`` by ``basis``.

    With ``track`` > 0 also returns the quotient combination expressed through
    the basis elements' cofactor vectors (length ``track``).
    """
    key = order.key
    nv = p.nvars
    work = dict(p.terms)
    rem: dict = {}
    quot = [dict() for _ in range(track)] if track else None
    while work:
        m = max(work, key=key)
        c = work[m]
        for el in basis:
            lm = el.lm
            if _divides(lm, m):
                shift = tuple(y - x for x, y in zip(lm, m))
                coef = c / el.lc
                _sub_scaled(work, el.poly, shift, coef)
                if track:
                    for k in range(track):
                        ck = el.cof[k]
                        if ck.terms:
                            _sub_scaled(quot[k], ck, shift, -coef)
                break
        else:
            rem[m] = c
            del work[m]
    r = MPoly._raw(nv, rem)
    if track:
        return r, [MPoly._raw(nv, q) for q in quot]
    return r


def _spoly(a: _Elem, b: _Elem, nvars: int, track: int):
    l = _lcm(a.lm, b.lm)
    sa = tuple(x - y for x, y in zip(l, a.lm))
    sb = tuple(x - y for x, y in zip(l, b.lm))
    ca = 1 / a.lc
    cb = 1 / b.lc
    s = a.poly.mul_term(sa, ca) - b.poly.mul_term(sb, cb)
    cof = None
    if track:
        cof = [a.cof[k].mul_term(sa, ca) - b.cof[k].mul_term(sb, cb) for k in range(track)]
    return s, cof


def groebner_basis(
    gens: Sequence[MPoly],
    order: MonomialOrder = GREVLEX,
    *,
    budget: int | None = None,
    track: bool = False,
):
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Returns the basis as a list of monic polynomials sorted by decreasing
    leading monomial.  With ``track=True`` returns ``(basis, cofactors)``
    where ``basis[i] == sum(cofactors[i][k] * gens[k])``.
    """
    if budget is None:
        budget = _step_budget.get()
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    nvars = gens[0].nvars
    ng = len(gens) if track else 0

    G: list[_Elem] = []
    for k, g in enumerate(gens):
        if g.is_zero():
            continue
        cof = None
        if track:
            cof = [MPoly.zero(nvars) for _ in range(ng)]
            cof[k] = MPoly.const(1, nvars)
        G.append(_Elem(g, order, cof))
    if not G:
        return ([], []) if track else []

    key = order.key
    heap: list = []
    pending: set = set()

    def push(i, j):
        a, b = G[i].lm, G[j].lm
        if all(x == 0 or y == 0 for x, y in zip(a, b)):
            return  # coprime leading monomials: S-polynomial reduces to zero
        heapq.heappush(heap, (key(_lcm(a, b)), i, j))
        pending.add((i, j))

    for j in range(len(G)):
        for i in range(j):
            push(i, j)

    steps = 0
    while heap:
        _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        l = _lcm(G[i].lm, G[j].lm)
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not _divides(G[k].lm, l):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                skip = True
                break
        if skip:
            continue
        steps += 1
        if steps > budget:
            raise ResourceBudgetError(
                f"Groebner step budget of {budget} S-pair reductions exceeded"
            )
        s, scof = _spoly(G[i], G[j], nvars, ng)
        if track:
            r, q = _reduce(s, G, order, ng)
            rcof = [scof[k] - q[k] for k in range(ng)]
        else:
            r = _reduce(s, G, order)
            rcof = None
        if r.is_zero():
            continue
        G.append(_Elem(r, order, rcof))
        new = len(G) - 1
        for i2 in range(new):
            push(i2, new)

    # minimize
    keep: list[_Elem] = []
    for idx, el in enumerate(G):
        redundant = False
        for jdx, other in enumerate(G):
            if jdx == idx:
                continue
            if _divides(other.lm, el.lm) and (other.lm != el.lm or jdx < idx):
                redundant = True
                break
        if not redundant:
            keep.append(el)

    # interreduce and make monic
    final: list[_Elem] = []
    for idx, el in enumerate(keep):
        others = [o for jdx, o in enumerate(keep) if jdx != idx]
        if track:
            r, q = _reduce(el.poly, others, order, ng)
            cof = [el.cof[k] - q[k] for k in range(ng)]
        else:
            # the leading term cannot reduce (minimal basis); reduce the tail
            r = _reduce(el.poly, others, order)
            cof = None
        inv = 1 / r.terms[el.lm]
        r = r.scale(inv)
        if track:
            cof = [c.scale(inv) for c in cof]
        final.append(_Elem(r, order, cof))
    final.sort(key=lambda e: key(e.lm), reverse=True)
    basis = [e.poly for e in final]
    if track:
        return basis, [e.cof for e in final]
    return basis


def reduce_by(f: MPoly, basis: Sequence[MPoly], order: MonomialOrder = GREVLEX) -> MPoly:
    """Remainder of full multivariate division of ``f`` by ``basis``."""
    elems = [_Elem(g, order) for g in basis if not g.is_zero()]
    return _reduce(f, elems, order)


def divide_with_cofactors(
    f: MPoly, basis: Sequence[MPoly], basis_cof: Sequence[Sequence[MPoly]], order: MonomialOrder
):
    """Divide ``f`` by a tracked basis; returns (remainder, cofactors w.r.t. original gens)."""
    ng = len(basis_cof[0]) if basis_cof else 0
    elems = [_Elem(g, order, c) for g, c in zip(basis, basis_cof)]
    r, q = _reduce(f, elems, order, ng)
    return r, q


def is_groebner(basis: Sequence[MPoly], order: MonomialOrder = GREVLEX) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    elems = [_Elem(g, order) for g in basis if not g.is_zero()]
    for j in range(len(elems)):
        for i in range(j):
            s, _ = _spoly(elems[i], elems[j], basis[0].nvars, 0)
            if not _reduce(s, elems, order).is_zero():
                return False
    return True

