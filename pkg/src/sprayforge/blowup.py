"""Blow-up charts of affine space along a center given by local generators.

A center in C^n is an ordered list u_1..u_r.  The chart with distinguished
index j lives in C^{n+r-1} with coordinates (x_1..x_n, l_1..l_{r-1}) and is cut
out by u_i - l_k * u_j, where l_k is the chart coordinate of the k-th generator
other than u_j.  The function u_j pulled back to the chart defines E there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .errors import (
    ChartIndexError,
    InvalidCenterError,
    LiftUndefinedError,
    NotDivisibleError,
    TangentDirectionError,
    UnreducedCenterError,
    WrongChartError,
)
from .polycore import (
    Ideal,
    MPoly,
    chart_names,
    divide_exact,
    jacobian_at,
    matvec,
    multivariate_gcd,
    nullspace,
    rank,
    to_point,
)

Point = tuple[Fraction, ...]


@dataclass(frozen=True, eq=False)
class Center:
    """Local generators u_1..u_r of the center in C^n.

    ``other_components`` (A_1) and ``avoid`` (S) are ideals of sets the
    construction must stay away from; ``None`` means empty.  ``component0``
    optionally gives the ideal of the component through the basepoint when it
    differs from the ideal of the local generators.
    """

    ambient: int
    local_gens: tuple[MPoly, ...]
    other_components: Ideal | None = None
    avoid: Ideal | None = None
    component0: Ideal | None = None

    def __post_init__(self):
        gens = tuple(self.local_gens)
        if not gens:
            raise InvalidCenterError("a center needs at least one generator")
        for g in gens:
            if g.nvars != self.ambient:
                raise InvalidCenterError(
                    f"generator {g} has {g.nvars} variables, ambient dimension is {self.ambient}"
                )
        object.__setattr__(self, "local_gens", gens)

    @property
    def r(self) -> int:
        return len(self.local_gens)

    @property
    def n(self) -> int:
        return self.ambient

    def ideal(self) -> Ideal:
        return self._ideal

    @cached_property
    def _ideal(self) -> Ideal:
        return Ideal(self.local_gens, self.ambient)

    def is_linear(self) -> bool:
        return all(g.total_degree() <= 1 for g in self.local_gens)

    def a0_ideal(self) -> Ideal:
        return self.component0 if self.component0 is not None else self.ideal()

    def fixed_ideal(self) -> Ideal:
        """Ideal of V(u) ∪ A_1 ∪ S: the set a flow must fix pointwise."""
        return self._fixed

    @cached_property
    def _fixed(self) -> Ideal:
        I = self.ideal()
        for extra in (self.other_components, self.avoid):
            if extra is not None and not extra.is_unit():
                I = I.intersect(extra)
        return I

    def is_trivial(self) -> bool:
        """r = 1 (Cartier) or a unit ideal: the blow-up is the identity."""
        return self.r == 1 or any(g.is_constant() for g in self.local_gens)

    def contains(self, x: Sequence) -> bool:
        return all(g.evaluate(x) == 0 for g in self.local_gens)

    def differential(self, a: Sequence) -> list[list[Fraction]]:
        return jacobian_at(self.local_gens, a)

    def normal_image(self, a: Sequence, v: Sequence) -> tuple[Fraction, ...]:
        """(d_a u_1(v), ..., d_a u_r(v))."""
        return matvec(self.differential(a), v)

    def check_basepoint(self, a: Sequence) -> None:
        a = to_point(a)
        if not self.contains(a):
            raise InvalidCenterError(f"point {list(map(str, a))} is not on the center")
        if rank(self.differential(a)) != self.r:
            raise InvalidCenterError(
                f"differentials of the {self.r} generators are dependent at the basepoint"
            )
        for name, extra in (("other components", self.other_components), ("avoid set", self.avoid)):
            if extra is not None and extra.vanishes_at(a):
                raise InvalidCenterError(f"basepoint lies on the {name}")

    def tangent_space(self, a: Sequence) -> list[tuple[Fraction, ...]]:
        """Basis of T_aA as the common kernel of the d_a u_i."""
        return nullspace(self.differential(a), self.ambient)


def reduce_center(gens: Sequence[MPoly]) -> list[MPoly]:
    """Divide the generators by their gcd (blowing up a principal part is trivial).

    Zero generators are dropped.
    """
    nonzero = [g for g in gens if not g.is_zero()]
    if not nonzero:
        raise InvalidCenterError("center generators are all zero")
    h = multivariate_gcd(nonzero)
    if h.is_constant():
        return list(nonzero)
    return [divide_exact(g, h) for g in nonzero]


def is_reduced(gens: Sequence[MPoly]) -> bool:
    return multivariate_gcd([g for g in gens if not g.is_zero()]).is_constant()


@dataclass(frozen=True, eq=False)
class BlowupChart:
    center: Center
    dist_index: int  # 1-based, as in the text convention u_1..u_r
    relations: tuple[MPoly, ...]
    exc_fn: MPoly
    ideal: Ideal = field(repr=False)

    @property
    def n(self) -> int:
        return self.center.ambient

    @property
    def r(self) -> int:
        return self.center.r

    @property
    def nvars(self) -> int:
        return self.n + max(self.r - 1, 0)

    @property
    def names(self) -> list[str]:
        return chart_names(self.n, self.r)

    @property
    def trivial(self) -> bool:
        return self.center.is_trivial()

    def lambda_var(self, i: int) -> int | None:
        """Chart variable index of generator i (0-based), None for the distinguished one."""
        j = self.dist_index - 1
        if i == j:
            return None
        return self.n + (i if i < j else i - 1)

    def homogeneous_coords(self) -> list[MPoly]:
        """Tautological [lambda_1 : ... : lambda_r] with 1 in the distinguished slot."""
        out = []
        for i in range(self.r):
            k = self.lambda_var(i)
            out.append(MPoly.const(1, self.nvars) if k is None else MPoly.var(k, self.nvars))
        return out

    def projection(self) -> list[MPoly]:
        """pi as polynomials in the chart ring."""
        return [MPoly.var(i, self.nvars) for i in range(self.n)]

    def pull_to_chart(self, f: MPoly) -> MPoly:
        return f.embed(self.nvars)

    def point_over(self, x: Sequence) -> Point:
        """Chart coordinates of the unique point over x off the center."""
        x = to_point(x)
        vals = [g.evaluate(x) for g in self.center.local_gens]
        j = self.dist_index - 1
        if vals[j] == 0:
            nz = [i for i, v in enumerate(vals) if v != 0]
            if not nz:
                raise WrongChartError("point lies on the center; give a direction", self.dist_index)
            raise WrongChartError("distinguished generator vanishes at the point", nz[-1] + 1)
        return x + tuple(vals[i] / vals[j] for i in range(self.r) if i != j)

    def contains(self, y: Sequence) -> bool:
        return all(rel.evaluate(y) == 0 for rel in self.relations)

    def tangent_space(self, y: Sequence) -> list[tuple[Fraction, ...]]:
        if not self.relations:
            return nullspace([], self.nvars)
        return nullspace(jacobian_at(self.relations, y), self.nvars)

    def pushforward(self, vec: Sequence) -> tuple[Fraction, ...]:
        """d pi: keep the x-part of a chart tangent vector."""
        return tuple(Fraction(c) for c in vec[: self.n])

    def relation_strings(self) -> list[str]:
        return [rel.to_str(self.names) for rel in self.relations]


def build_chart(center: Center, dist_index: int) -> BlowupChart:
    """Chart {u_i = l_i * u_j} of the blow-up; r = 1 gives the ambient space itself."""
    if not 1 <= dist_index <= center.r:
        raise ChartIndexError(f"chart index {dist_index} outside 1..{center.r}")
    if center.r > 1 and not is_reduced(center.local_gens):
        raise UnreducedCenterError(
            "center generators share a common factor; call reduce_center first"
        )
    n, r = center.ambient, center.r
    N = n + max(r - 1, 0)
    j = dist_index - 1
    u = [g.embed(N) for g in center.local_gens]
    rels = []
    if r > 1:
        k = 0
        for i in range(r):
            if i == j:
                continue
            rels.append(u[i] - MPoly.var(n + k, N) * u[j])
            k += 1
    return BlowupChart(center, dist_index, tuple(rels), u[j], Ideal(rels, N))


@dataclass(frozen=True)
class EPoint:
    """A point b of E over a, represented by a normal direction v."""

    base: Point
    direction: Point
    chart_index: int
    chart_coords: Point


def default_chart_index(center: Center, a: Sequence, v: Sequence | None = None) -> int:
    """Largest index j whose generator sees the point: d_a u_j(v) != 0 on E, u_j(a) != 0 off it."""
    a = to_point(a)
    if center.contains(a):
        if v is None:
            raise TangentDirectionError("a direction is required over the center")
        vals = center.normal_image(a, to_point(v))
    else:
        vals = tuple(g.evaluate(a) for g in center.local_gens)
    nz = [i for i, x in enumerate(vals) if x != 0]
    if not nz:
        raise TangentDirectionError("direction is tangent to the center (v in T_aA)")
    return nz[-1] + 1


def epoint_to_chart(chart: BlowupChart, a: Sequence, v: Sequence) -> EPoint:
    a, v = to_point(a), to_point(v)
    if not chart.center.contains(a):
        raise InvalidCenterError("base point is not on the center")
    vals = chart.center.normal_image(a, v)
    if all(x == 0 for x in vals):
        raise TangentDirectionError("direction is tangent to the center (v in T_aA)")
    j = chart.dist_index - 1
    if vals[j] == 0:
        suggested = max(i for i, x in enumerate(vals) if x != 0) + 1
        raise WrongChartError(f"d_a u_{j + 1}(v) = 0, point is not in this chart", suggested)
    lam = tuple(vals[i] / vals[j] for i in range(chart.r) if i != j)
    return EPoint(a, v, chart.dist_index, a + lam)


# lifting maps through the blow-up ------------------------------------------


@dataclass(frozen=True)
class PrincipalityWitness:
    """u_j∘phi = p * q_j for all j, with some q_j nonzero at the point."""

    p: MPoly
    q: tuple[MPoly, ...]
    point: Point
    q_at_point: tuple[Fraction, ...]


def principality_witness(
    phi: Sequence[MPoly], center: Center, pt: Sequence, hint: MPoly | None = None
) -> PrincipalityWitness | None:
    """Exhibit phi^*I(A) as locally principal at pt, or return None (inconclusive).

    Tries p = 1 when some u_j∘phi is nonzero at pt, then the ``hint`` divisor,
    then the gcd of the pullbacks.
    """
    pt = to_point(pt)
    pulled = [g.subs(list(phi), phi[0].nvars) for g in center.local_gens]
    m = phi[0].nvars
    candidates = []
    if any(g.evaluate(pt) != 0 for g in pulled):
        candidates.append(MPoly.const(1, m))
    if hint is not None:
        candidates.append(hint)
    if any(not g.is_zero() for g in pulled):
        candidates.append(multivariate_gcd([g for g in pulled if not g.is_zero()]))
    for p in candidates:
        try:
            q = tuple(divide_exact(g, p) for g in pulled)
        except NotDivisibleError:
            continue
        vals = tuple(g.evaluate(pt) for g in q)
        if any(x != 0 for x in vals):
            return PrincipalityWitness(p, q, pt, vals)
    return None


@dataclass(frozen=True)
class LiftedPoint:
    point: Point
    chart_index: int
    chart_coords: Point
    method: str  # "denominator" or "witness"


@dataclass(frozen=True, eq=False)
class BlowupLift:
    """Rational lift of f: C^k -> C^n through the blow-up: lambda_i = (u_i∘f)/(u_j∘f)."""

    f: tuple[MPoly, ...]
    center: Center
    pullbacks: tuple[MPoly, ...]
    certified: tuple[LiftedPoint, ...]

    def pullback_ideal(self) -> Ideal:
        return Ideal(self.pullbacks, self.f[0].nvars)

    def ratio(self, chart_index: int) -> tuple[list[MPoly], MPoly]:
        """(numerators, denominator) of the lambda-coordinates in chart ``chart_index``."""
        j = chart_index - 1
        return [g for i, g in enumerate(self.pullbacks) if i != j], self.pullbacks[j]

    def lift_at(self, pt: Sequence, chart_index: int | None = None) -> LiftedPoint:
        pt = to_point(pt)
        x = tuple(g.evaluate(pt) for g in self.f)
        vals = [g.evaluate(pt) for g in self.pullbacks]
        method = "denominator"
        if all(v == 0 for v in vals):
            w = principality_witness(self.f, self.center, pt)
            if w is None:
                raise LiftUndefinedError(
                    f"lift undefined at {[str(c) for c in pt]}: no principality witness"
                )
            vals = list(w.q_at_point)
            method = "witness"
        nz = [i for i, v in enumerate(vals) if v != 0]
        j = (nz[-1] + 1) if chart_index is None else chart_index
        if vals[j - 1] == 0:
            raise WrongChartError("lift does not land in the requested chart", nz[-1] + 1)
        lam = tuple(vals[i] / vals[j - 1] for i in range(len(vals)) if i != j - 1)
        return LiftedPoint(pt, j, x + lam, method)


def lift_through_blowup(
    f: Sequence[MPoly], center: Center, points: Sequence[Sequence] = ()
) -> BlowupLift:
    """Lift f through the blow-up, certifying regularity at each requested point.

    Raises LiftUndefinedError if some requested point has neither a nonzero
    pullback value nor a principality witness.
    """
    f = tuple(f)
    if len(f) != center.ambient:
        raise ValueError(f"map has {len(f)} components, target dimension is {center.ambient}")
    k = f[0].nvars
    pulled = tuple(g.subs(list(f), k) for g in center.local_gens)
    if all(g.is_zero() for g in pulled):
        raise LiftUndefinedError("map sends everything into the center")
    lift = BlowupLift(f, center, pulled, ())
    cert = tuple(lift.lift_at(p) for p in points)
    return BlowupLift(f, center, pulled, cert)
