"""Dominability checks and domination certificates.

A certificate collects exact tangent vectors at a chart point, each produced
by a spray's parameter derivative at t = 0, and records their exact rank
against the dimension of the blow-up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .blowup import (
    BlowupChart,
    Center,
    EPoint,
    build_chart,
    default_chart_index,
    epoint_to_chart,
    reduce_center,
)
from .checks import Check, check
from .errors import (
    DominabilityError,
    InvalidCenterError,
    SprayforgeError,
)
from .polycore import (
    Dual,
    Ideal,
    LinearMap,
    MPoly,
    det,
    jacobian,
    jacobian_at,
    matvec,
    nullspace,
    rank,
    sample_vector,
    solve,
    to_point,
)
from .polycore.dual import infinitesimal
from .polycore.linalg import independent_rows, primitive_integer
from .spray1 import (
    FlowData,
    check_proper_projection,
    fiber_containment,
    kernel_spanning_family,
    vanishing_poly,
)
from .spray2 import type2_family

Vector = tuple[Fraction, ...]
ChartPoint = tuple[Fraction, ...]


def local_iso_check(f: Sequence[MPoly], pt: Sequence) -> bool:
    """True iff the Jacobian determinant of f at pt is nonzero."""
    f = list(f)
    if not f or len(f) != f[0].nvars:
        raise ValueError("local isomorphism check needs a square map C^k -> C^k")
    return det(jacobian_at(f, pt)) != 0


# certificates ------------------------------------------------------------------------


@dataclass(frozen=True)
class TangentEntry:
    vector: Vector
    source: str  # spray id, e.g. "type1[0]"
    seed_label: tuple


@dataclass(frozen=True)
class Certificate:
    point: Union[EPoint, ChartPoint]
    chart_index: int
    vectors: tuple[TangentEntry, ...]
    rank: int
    target_dim: int
    checks: tuple[Check, ...]
    seeds: tuple[int, ...]
    failed_stage: str | None = None
    attempts: tuple = ()
    notes: tuple[str, ...] = field(default=())

    @property
    def verdict(self) -> str:
        if self.failed_stage is not None:
            return "partial"
        if self.rank == self.target_dim and all(c.passed for c in self.checks if c.mandatory):
            return "dominating"
        return "rank-deficient"

    @property
    def chart_coords(self) -> ChartPoint:
        return self.point.chart_coords if isinstance(self.point, EPoint) else self.point


def _make_certificate(point, chart_index, entries, target_dim, checks, seed, failed=None, attempts=(), notes=()):
    vecs = [list(e.vector) for e in entries]
    rk = rank(vecs) if vecs else 0
    return Certificate(
        point, chart_index, tuple(entries), rk, target_dim, tuple(checks), (seed,), failed, tuple(attempts), tuple(notes)
    )


# flows away from E ---------------------------------------------------------------------


def _flow_directions(n: int, seed: int, retries: int) -> list[Vector]:
    basis = [tuple(Fraction(int(i == k)) for i in range(n)) for k in range(n)]
    extra = [sample_vector(n, seed, 3, ("complement", "zeta", k)) for k in range(retries)]
    return basis + extra


def _tau_for(zeta: Vector) -> LinearMap:
    """Integer projection whose kernel is spanned by zeta."""
    rows = nullspace([list(zeta)], len(zeta))
    return LinearMap([list(map(Fraction, primitive_integer(r))) for r in rows])


def _complement_certificate(
    chart: BlowupChart, y: ChartPoint, seed: int, retries: int, fixed: Ideal | None
) -> Certificate:
    """Flows x + t*h(tau(x))*zeta fixing the center, at a chart point off E."""
    n = chart.n
    x = y[:n]
    j = chart.dist_index - 1
    gens = chart.center.local_gens
    entries, checks, attempts = [], [], []
    for k, zeta in enumerate(_flow_directions(n, seed, retries)):
        if len(entries) == n:
            break
        label = ("complement", k)
        if fixed is None:
            vec = tuple(zeta) + _lambda_velocity(gens, j, x, zeta, chart.trivial)
            source = f"translation[{k}]"
        else:
            tau = _tau_for(zeta)
            if check_proper_projection(fixed, tau, zeta) is None:
                attempts.append((list(label), "no monic witness"))
                continue
            try:
                h = _vanishing_for(chart.center, tau, fixed)
            except SprayforgeError as exc:
                attempts.append((list(label), str(exc)))
                continue
            flow = FlowData.build(tau, zeta, h)
            if not fixed.contains(flow.h_of_tau()):
                attempts.append((list(label), "flow does not fix the center"))
                continue
            speed = flow.h_of_tau().evaluate(x)
            if speed == 0:
                attempts.append((list(label), "h(tau(x)) = 0"))
                continue
            v = tuple(speed * z for z in zeta)
            vec = v + _lambda_velocity(gens, j, x, v, chart.trivial)
            source = f"flow[{k}]"
        if rank([list(e.vector) for e in entries] + [list(vec)]) == len(entries):
            attempts.append((list(label), "no new direction"))
            continue
        entries.append(TangentEntry(vec, source, label))
        attempts.append((list(label), "accepted"))
    tangent = chart.tangent_space(y)
    checks.append(check("tangent_to_chart", all(_in_rowspace(tangent, e.vector) for e in entries), "vectors lie in T_yY"))
    failed = None if len(entries) == n else "complement-flows"
    return _make_certificate(y, chart.dist_index, entries, n, checks, seed, failed, attempts)


def _vanishing_for(center: Center, tau: LinearMap, fixed: Ideal) -> MPoly:
    if fixed is center.fixed_ideal():
        return vanishing_poly(center, tau)
    proxy = Center(center.ambient, tuple(fixed.generators))
    return vanishing_poly(proxy, tau)


def _lambda_velocity(gens, j, x, v, trivial) -> Vector:
    """d/dt of u_i(x + t v)/u_j(x + t v) at t = 0, for i != j."""
    if trivial:
        return ()
    pt = [Dual(c, d) for c, d in zip(x, v)]
    vals = [g.evaluate(pt) for g in gens]
    vals = [Dual._lift(v_) for v_ in vals]
    return tuple(infinitesimal(vals[i] / vals[j]) for i in range(len(vals)) if i != j)


def _in_rowspace(basis: Sequence[Sequence], v: Sequence) -> bool:
    if not basis:
        return all(c == 0 for c in v)
    return rank([list(b) for b in basis] + [list(v)]) == rank([list(b) for b in basis])


# certificates on E ---------------------------------------------------------------------


def domination_certificate(
    chart: BlowupChart,
    point: EPoint | Sequence,
    seed: int = 0,
    retries: int = 5,
    max_degree: int = 8,
) -> Certificate:
    """Assemble spray derivatives at a chart point and rank them exactly against n."""
    center = chart.center
    if chart.trivial:
        y = to_point(point.chart_coords if isinstance(point, EPoint) else point)
        avoid = center.avoid if center.avoid is not None and not center.avoid.is_unit() else None
        return _complement_certificate(chart, y, seed, retries, avoid)
    if not isinstance(point, EPoint):
        y = to_point(point)
        if not chart.contains(y):
            raise InvalidCenterError("point does not lie on the chart")
        if chart.exc_fn.evaluate(y) == 0:
            raise InvalidCenterError("point lies on E; give it as an exceptional point with a direction")
        return _complement_certificate(chart, y, seed, retries, center.fixed_ideal())

    b = point
    entries, checks, attempts, notes = [], [], [], []
    failed = None
    try:
        fam = kernel_spanning_family(chart, b, seed, retries)
        attempts.extend(("type1",) + tuple(a) for a in fam.attempts)
        for k, (s, d) in enumerate(zip(fam.sprays, fam.derivatives)):
            entries.append(TangentEntry(d.affine, f"type1[{k}]", ("type1", k)))
            checks.extend(_prefixed(f"type1[{k}]", s.checks))
            checks.append(check(f"type1[{k}].derivative_agreement", d.closed_form == d.symbolic, "closed form equals symbolic derivative"))
            checks.append(check(f"type1[{k}].fiber_containment", fiber_containment(chart, d.affine), "d_b pi kills the derivative"))
    except SprayforgeError as exc:
        failed = "type1"
        attempts.extend(("type1",) + tuple(a) for a in getattr(exc, "attempts", []))
        notes.append(f"type1: {exc}")
    if failed is None:
        try:
            fam2 = type2_family(chart, b, seed, retries, max_degree)
        except SprayforgeError as exc:
            failed = "type2"
            attempts.extend(("type2",) + tuple(a) for a in getattr(exc, "attempts", []))
            notes.append(f"type2: {exc}")
    if failed is None:
        checks.extend(_prefixed("type2.setup", fam2.context.checks))
        attempts.extend(("type2",) + tuple(a) for a in fam2.attempts)
        if fam2.transition is not None:
            notes.append("type2 sprays built on the chart with the retract hypersurface as distinguished generator")
        for k, s in enumerate(fam2.sprays):
            entries.append(TangentEntry(s.derivative, f"type2[{k}]", ("type2", k)))
            checks.extend(_prefixed(f"type2[{k}]", s.checks))
            if s.fiberward_degenerate:
                notes.append(f"type2[{k}] is fiberward-degenerate")
    return _make_certificate(b, chart.dist_index, entries, chart.n, checks, seed, failed, attempts, notes)


def _prefixed(prefix: str, checks: Sequence[Check]) -> list[Check]:
    return [Check(f"{prefix}.{c.name}", c.status, c.detail, c.mandatory) for c in checks]


# dominability lifting ---------------------------------------------------------------------


@dataclass(frozen=True)
class ChartLift:
    """Phi(w, mu) = (f(w), mu) from a source chart to the target chart with the same index."""

    chart_index: int
    source: BlowupChart
    target: BlowupChart
    phi: tuple[MPoly, ...]
    checks: tuple[Check, ...]


def _chart_lift(f: Sequence[MPoly], source: BlowupChart, target: BlowupChart) -> ChartLift:
    m = source.nvars
    n = source.n
    fw = [p.embed(m) for p in f]
    phi = tuple(fw + [MPoly.var(n + k, m) for k in range(m - n)])
    pulled = [rel.subs(list(phi), m) for rel in target.relations]
    into = all(source.ideal.contains(p) for p in pulled)
    proj = all((phi[i] - fw[i]).is_zero() for i in range(n))
    J = jacobian(list(phi), m)
    detpoly = _det_poly(J)
    on_fiber = detpoly.partial_subs({i: 0 for i in range(n)})
    const = on_fiber.is_constant() and not on_fiber.is_zero()
    idx = source.dist_index
    return ChartLift(
        idx,
        source,
        target,
        phi,
        (
            check(f"chart{idx}.relations_pull_back", into, "Phi^*(target relations) lies in the source chart ideal"),
            check(f"chart{idx}.projection", proj, "pi_target o Phi = f o pi_source"),
            check(f"chart{idx}.jacobian_over_0", const, f"det DPhi on the fiber over 0 is {on_fiber}"),
        ),
    )


def _det_poly(M: list[list[MPoly]]) -> MPoly:
    """Determinant by cofactor expansion (small matrices only)."""
    n = len(M)
    if n == 1:
        return M[0][0]
    total = MPoly.zero(M[0][0].nvars)
    for c in range(n):
        if M[0][c].is_zero():
            continue
        minor = [row[:c] + row[c + 1 :] for row in M[1:]]
        term = M[0][c] * _det_poly(minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def lift_dominability(
    f: Sequence[MPoly], center: Center, y: EPoint | None = None, seed: int = 0, retries: int = 5
) -> Certificate:
    """Certify dominability of the blow-up at y over x = f(0) from a dominating map f."""
    f = list(f)
    n = center.ambient
    if len(f) != n or f[0].nvars != n:
        raise ValueError("f must be a map C^n -> C^n")
    origin = [Fraction(0)] * n
    if not local_iso_check(f, origin):
        raise DominabilityError("f is not a local isomorphism at 0")
    x = tuple(p.evaluate(origin) for p in f)
    Df = jacobian_at(f, origin)
    iso = check("local_iso", True, f"det Df(0) = {det(Df)}")
    if not center.contains(x):
        cols = [tuple(row[k] for row in Df) for k in range(n)]
        entries = [TangentEntry(c, f"df[{k}]", ("df", k)) for k, c in enumerate(cols)]
        return _make_certificate(x, 0, entries, n, [iso], seed, notes=("f(0) is off the center",))
    if y is None:
        raise ValueError("a point over f(0) on E is required")
    if y.base != x:
        raise ValueError("y does not lie over f(0)")
    pulled = [g.subs(f, n) for g in center.local_gens]
    src_gens = reduce_center(pulled)
    if len(src_gens) != center.r:
        raise DominabilityError("pullback of the center lost generators")
    src_center = Center(n, tuple(src_gens))
    if rank(jacobian_at(src_gens, origin)) != center.r:
        raise DominabilityError("pulled-back center is singular at 0")
    checks = [iso]
    lifts = []
    for jj in range(1, center.r + 1):
        lift = _chart_lift(f, build_chart(src_center, jj), build_chart(center, jj))
        lifts.append(lift)
        checks.extend(lift.checks)
    v_src = solve(Df, list(y.direction))
    lift = lifts[y.chart_index - 1]
    z = epoint_to_chart(lift.source, origin, v_src)
    image = tuple(p.evaluate(list(z.chart_coords)) for p in lift.phi)
    checks.append(check("lift_hits_point", image == y.chart_coords, "Phi(z) = y"))
    src_cert = domination_certificate(lift.source, z, seed, retries)
    DPhi = jacobian_at(list(lift.phi), z.chart_coords)
    entries = [TangentEntry(matvec(DPhi, e.vector), "lift:" + e.source, e.seed_label) for e in src_cert.vectors]
    tangent = lift.target.tangent_space(y.chart_coords)
    checks.append(check("pushforward_tangent", all(_in_rowspace(tangent, e.vector) for e in entries), "pushed vectors lie in T_yY"))
    checks.extend(_prefixed("source", src_cert.checks))
    return _make_certificate(
        y, y.chart_index, entries, n, checks, seed, src_cert.failed_stage, src_cert.attempts, src_cert.notes
    )


# smooth locus ------------------------------------------------------------------------------


def select_center(
    gens: Sequence[MPoly],
    base: Sequence,
    others: Ideal | None = None,
    avoid: Ideal | None = None,
) -> Center:
    """Reduce by the gcd, then keep a regular sequence of generators at base.

    Off the reduced center all generators are kept; a unit ideal yields the
    trivial center (1).
    """
    gens = list(gens)
    n = gens[0].nvars
    base = to_point(base)
    red = reduce_center(gens)
    if any(g.is_constant() for g in red):
        return Center(n, (MPoly.const(1, n),), others, avoid)
    full = Center(n, tuple(red), others, avoid)
    if not full.contains(base):
        return full
    codim = Ideal(red, n).codimension()
    idx = independent_rows(jacobian_at(red, base))
    if len(idx) < codim:
        raise DominabilityError("base point lies in the singular locus of the center")
    return Center(n, tuple(red[i] for i in idx[:codim]), others, avoid)


def point_in_chart(chart: BlowupChart, base: Sequence, direction: Sequence | None) -> EPoint | ChartPoint:
    """The chart point over base: an EPoint on E, the graph point off it."""
    if chart.trivial:
        return to_point(base)
    if chart.center.contains(base):
        if direction is None:
            raise ValueError("a direction is required over the center")
        return epoint_to_chart(chart, base, direction)
    return chart.point_over(base)


def smooth_locus_dominability(
    gens: Sequence[MPoly],
    base: Sequence,
    direction: Sequence | None = None,
    seed: int = 0,
    retries: int = 5,
    chart_index: int | None = None,
    others: Ideal | None = None,
    avoid: Ideal | None = None,
) -> tuple[BlowupChart, Certificate]:
    """Blow up along (gens)/gcd and certify at a point over a smooth point of the center."""
    center = select_center(gens, base, others, avoid)
    if center.is_trivial():
        chart = build_chart(center, 1)
    else:
        chart = build_chart(center, chart_index or default_chart_index(center, base, direction))
    return chart, domination_certificate(chart, point_in_chart(chart, base, direction), seed, retries)


# composed sprays ------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IdentitySpray:
    """The zero spray: F(t, y) = y."""

    chart: BlowupChart
    kind = "identity"

    def evaluate(self, t, y: Sequence) -> tuple:
        return tuple(y)

    def derivative_at(self, y: Sequence) -> Vector:
        return tuple(Fraction(0) for _ in y)


@dataclass(frozen=True, eq=False)
class ComposedSpray:
    """(t1, t2, y) -> right(t2, left(t1, y)): the fiber product with s_left(e1) = pi_right(e2).

    Trivializing the composed bundle (Quillen-Suslin) is not computed.
    """

    left: object
    right: object
    quillen_suslin_computed: bool = False

    @property
    def chart(self) -> BlowupChart:
        return self.left.chart

    def evaluate(self, t1, t2, y: Sequence) -> tuple:
        return self.right.evaluate(t2, list(self.left.evaluate(t1, list(y))))

    def pullback_holds(self, t1, y: Sequence) -> bool:
        """The right spray's base point is the left spray's value (t2 = 0 returns it)."""
        e1 = self.left.evaluate(t1, list(y))
        return tuple(self.right.evaluate(0, list(e1))) == tuple(e1)

    def derivatives(self, y: Sequence) -> tuple[Vector, Vector, Vector]:
        """(d/dt1, d/dt2, d/ds at t1 = t2 = s) at the origin of parameters."""
        eps = Dual(0, 1)
        d1 = tuple(infinitesimal(v) for v in self.evaluate(eps, 0, y))
        d2 = tuple(infinitesimal(v) for v in self.evaluate(0, eps, y))
        dd = tuple(infinitesimal(v) for v in self.evaluate(eps, eps, y))
        return d1, d2, dd

    def additivity_holds(self, y: Sequence) -> bool:
        d1, d2, dd = self.derivatives(y)
        return all(a + b == c for a, b, c in zip(d1, d2, dd))


def compose_sprays(s1, s2) -> ComposedSpray:
    c1, c2 = s1.chart, s2.chart
    if c1.n != c2.n or c1.dist_index != c2.dist_index or c1.relation_strings() != c2.relation_strings():
        raise ValueError("base mismatch: sprays live on different charts")
    return ComposedSpray(s1, s2)


__all__ = [
    "Certificate",
    "ChartLift",
    "ComposedSpray",
    "IdentitySpray",
    "TangentEntry",
    "compose_sprays",
    "domination_certificate",
    "lift_dominability",
    "local_iso_check",
    "point_in_chart",
    "select_center",
    "smooth_locus_dominability",
]
