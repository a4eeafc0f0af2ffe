"""Polynomial ideals with cached Groebner bases."""

from __future__ import annotations

import threading
from itertools import combinations
from typing import Iterable, Sequence

from ..errors import NotDivisibleError, NotInIdealError
from .groebner import _sub_scaled, divide_with_cofactors, groebner_basis, reduce_by
from .poly import GREVLEX, MonomialOrder, MPoly, block_order


class Ideal:
    """An ideal of Q[x1..xn] given by generators.

    Groebner bases are memoized per monomial order.  The cache is an
    implementation detail: results are identical with or without it.
    """

    __slots__ = ("nvars", "generators", "_cache", "_lock")

    def __init__(self, generators: Iterable[MPoly], nvars: int | None = None):
        gens = [g for g in generators]
        if nvars is None:
            if not gens:
                raise ValueError("nvars is required for an ideal without generators")
            nvars = gens[0].nvars
        for g in gens:
            if g.nvars != nvars:
                raise ValueError(f"generator in {g.nvars} variables, ideal in {nvars}")
        self.nvars = nvars
        self.generators = tuple(g for g in gens if not g.is_zero())
        self._cache: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def unit(cls, nvars: int) -> Ideal:
        return cls([MPoly.const(1, nvars)], nvars)

    @classmethod
    def zero(cls, nvars: int) -> Ideal:
        return cls([], nvars)

    def __repr__(self) -> str:
        return f"Ideal({[str(g) for g in self.generators]})"

    # Groebner data -------------------------------------------------------
    def groebner(self, order: MonomialOrder = GREVLEX) -> tuple[MPoly, ...]:
        tag = order.tag
        hit = self._cache.get(tag)
        if hit is not None:
            return hit
        if not self.generators:
            basis: tuple[MPoly, ...] = ()
        else:
            basis = tuple(groebner_basis(self.generators, order))
        with self._lock:
            self._cache.setdefault(tag, basis)
        return basis

    def _tracked(self, order: MonomialOrder):
        tag = ("tracked", order.tag)
        hit = self._cache.get(tag)
        if hit is None:
            hit = groebner_basis(self.generators, order, track=True)
            with self._lock:
                self._cache.setdefault(tag, hit)
        return hit

    def normal_form(self, f: MPoly, order: MonomialOrder = GREVLEX) -> MPoly:
        if f.nvars != self.nvars:
            raise ValueError(f"polynomial in {f.nvars} variables, ideal in {self.nvars}")
        if not self.generators:
            return f
        return reduce_by(f, self.groebner(order), order)

    def contains(self, f: MPoly) -> bool:
        return self.normal_form(f).is_zero()

    __contains__ = contains

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.groebner())

    def is_zero(self) -> bool:
        return not self.generators

    def lift(self, f: MPoly, order: MonomialOrder = GREVLEX) -> list[MPoly]:
        """Cofactors c with f == sum(c[k] * generators[k]); raises NotInIdealError."""
        if not self.generators:
            if f.is_zero():
                return []
            raise NotInIdealError("nonzero polynomial is not in the zero ideal")
        basis, cof = self._tracked(order)
        r, c = divide_with_cofactors(f, basis, cof, order)
        if not r.is_zero():
            raise NotInIdealError(f"{f} is not in the ideal (remainder {r})")
        return c

    # ideal operations ----------------------------------------------------
    def __add__(self, other: Ideal) -> Ideal:
        return Ideal(self.generators + other.generators, self.nvars)

    def __mul__(self, other: Ideal) -> Ideal:
        return Ideal([a * b for a in self.generators for b in other.generators], self.nvars)

    def is_subset(self, other: Ideal) -> bool:
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: Ideal) -> bool:
        """Same ideal, checked by mutual normal-form reduction."""
        return self.is_subset(other) and other.is_subset(self)

    def eliminate(self, keep: Iterable[int], compress: bool = False) -> Ideal:
        return elimination_ideal(self, keep, compress=compress)

    def intersect(self, other: Ideal) -> Ideal:
        """I ∩ J = (t*I + (1-t)*J) ∩ Q[x]."""
        n = self.nvars
        t = MPoly.var(n, n + 1)
        lifted = [t * g.embed(n + 1) for g in self.generators]
        lifted += [(1 - t) * g.embed(n + 1) for g in other.generators]
        if not lifted:
            return Ideal.zero(n)
        big = Ideal(lifted, n + 1)
        return big.eliminate(range(n), compress=True)

    def saturate(self, g: MPoly) -> Ideal:
        """I : g^∞ via the Rabinowitsch trick."""
        n = self.nvars
        s = MPoly.var(n, n + 1)
        gens = [h.embed(n + 1) for h in self.generators] + [1 - s * g.embed(n + 1)]
        return Ideal(gens, n + 1).eliminate(range(n), compress=True)

    def dimension(self) -> int:
        """Krull dimension of Q[x]/I (-1 for the unit ideal)."""
        if not self.generators:
            return self.nvars
        basis = self.groebner()
        if any(g.is_constant() for g in basis):
            return -1
        lms = [g.leading_monomial() for g in basis]
        supports = [frozenset(i for i, k in enumerate(m) if k) for m in lms]
        for size in range(self.nvars, -1, -1):
            for subset in combinations(range(self.nvars), size):
                s = set(subset)
                if not any(sup <= s for sup in supports):
                    return size
        return 0  # pragma: no cover

    def codimension(self) -> int:
        d = self.dimension()
        return self.nvars - d if d >= 0 else self.nvars + 1

    def vanishes_at(self, point) -> bool:
        """True when every generator vanishes at ``point`` (point lies in V(I))."""
        return all(g.evaluate(point) == 0 for g in self.generators)


def elimination_ideal(I: Ideal, keep: Iterable[int], compress: bool = False) -> Ideal:
    """I ∩ Q[keep] via a block elimination order.

    The result lives in the original ring unless ``compress`` is set, in which
    case variable keep[k] becomes variable k of a ring with len(keep) variables.
    """
    keep = sorted(set(keep))
    for k in keep:
        if not 0 <= k < I.nvars:
            raise IndexError(f"variable index {k} out of range")
    elim = [i for i in range(I.nvars) if i not in set(keep)]
    if not elim:
        basis = list(I.groebner())
    else:
        order = block_order(elim)
        basis = [g for g in I.groebner(order) if not (g.variables() & set(elim))]
    if compress:
        return Ideal([g.restrict(keep) for g in basis], len(keep))
    return Ideal(basis, I.nvars)


def normal_form(f: MPoly, I: Ideal, order: MonomialOrder = GREVLEX) -> MPoly:
    return I.normal_form(f, order)


def divide_exact(f: MPoly, g: MPoly) -> MPoly:
    """Quotient f / g; raises NotDivisibleError when the division is not exact."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return MPoly.zero(f.nvars)
    if g.is_constant():
        return f.scale(1 / g.constant_value())
    lm = g.leading_monomial()
    lc = g.terms[lm]
    work = dict(f.terms)
    quot: dict = {}
    key = GREVLEX.key
    while work:
        m = max(work, key=key)
        if not all(x <= y for x, y in zip(lm, m)):
            raise NotDivisibleError(f"{g} does not divide {f}")
        shift = tuple(y - x for x, y in zip(lm, m))
        coef = work[m] / lc
        quot[shift] = quot.get(shift, 0) + coef
        _sub_scaled(work, g, shift, coef)
    return MPoly(f.nvars, quot)


def _gcd_pair(f: MPoly, g: MPoly) -> MPoly:
    n = f.nvars
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    if f.is_constant() or g.is_constant():
        return MPoly.const(1, n)
    # try the cheap case first: one divides the other
    for a, b in ((f, g), (g, f)):
        try:
            divide_exact(b, a)
            return a
        except NotDivisibleError:
            pass
    lcm_ideal = Ideal([f], n).intersect(Ideal([g], n))
    basis = lcm_ideal.groebner()
    if len(basis) != 1:  # pragma: no cover - a principal ideal has a one-element reduced basis
        raise ArithmeticError("lcm ideal is not principal")
    return divide_exact(f * g, basis[0])


def multivariate_gcd(fs: Sequence[MPoly]) -> MPoly:
    """GCD of a list of polynomials, primitive with positive grevlex-leading coefficient.

    The lcm is read off the intersection of the principal ideals; the gcd is
    the exact quotient f*g/lcm.
    """
    nonzero = [f for f in fs if not f.is_zero()]
    if not nonzero:
        raise ValueError("gcd of an all-zero list is undefined")
    g = nonzero[0]
    for f in nonzero[1:]:
        if g.is_constant():
            break
        g = _gcd_pair(g, f)
    if g.is_constant():
        return MPoly.const(1, g.nvars)
    return g.primitive()
