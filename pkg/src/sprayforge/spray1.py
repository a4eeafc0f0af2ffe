"""Flow sprays phi(t, x) = x + t*h(tau(x))*zeta and their lifts to a blow-up chart.

tau is a linear projection C^n -> C^{n-1} that is proper on the fixed set,
zeta spans its kernel and h vanishes on the image of the fixed set, so the
flow fixes the center pointwise.  The lift to the chart is read off from the
identity u_i(f(t, y)) = u_j(x) * lambda_i(t, y).

Ring layouts: flows live in (t, x1..xn); lifted sprays in (t, x1..xn, l1..).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .blowup import BlowupChart, Center, EPoint
from .checks import Check, check
from .errors import (
    ConstructionError,
    DenseImageError,
    NotInIdealError,
    ProjectionError,
    RetryExhaustedError,
)
from .polycore import (
    GREVLEX,
    Dual,
    Ideal,
    LinearMap,
    MPoly,
    block_order,
    rank,
    sample_matrix,
    sample_vector,
    to_point,
)
from .polycore.dual import infinitesimal
from .polycore.linalg import primitive_integer, solve

Vector = tuple[Fraction, ...]


# choosing tau, zeta and h ----------------------------------------------------


def check_proper_projection(ideal: Ideal, tau: LinearMap, zeta: Sequence) -> MPoly | None:
    """Monic witness for properness of tau on V(ideal), or None.

    Coordinates are changed to (y, s) = (tau(x), zeta . x) so that moving along
    zeta moves only s.  tau is proper on V(ideal) iff the ideal contains a
    polynomial monic in s, i.e. some Groebner element for an order eliminating
    s first has a pure power of s as leading monomial.
    """
    n = ideal.nvars
    zeta = to_point(zeta)
    if tau.rows != n - 1 or tau.cols != n:
        raise ProjectionError(f"tau must be {n - 1}x{n}, got {tau.rows}x{tau.cols}")
    P = [list(row) for row in tau.matrix] + [list(zeta)]
    if rank(P) != n:
        return None
    # x = P^{-1} (y, s): column k of P^{-1} solves P c = e_k
    inv_cols = [solve(P, [Fraction(int(i == k)) for i in range(n)]) for k in range(n)]
    new_vars = MPoly.gens(n)
    images = [
        sum((new_vars[k].scale(inv_cols[k][i]) for k in range(n)), MPoly.zero(n)) for i in range(n)
    ]
    moved = Ideal([g.subs(images, n) for g in ideal.generators], n)
    if moved.is_unit():
        return MPoly.const(1, n)
    order = block_order([n - 1])
    for g in moved.groebner(order):
        lm = g.leading_monomial(order)
        if lm[n - 1] > 0 and sum(lm) == lm[n - 1]:
            return g
    return None


def choose_proper_projection(
    center: Center, seed: int, retries: int = 5, bound: int = 3, stream: Sequence = ()
) -> tuple[LinearMap, Vector]:
    """Seeded surjective tau with a monic properness witness and zeta spanning ker tau."""
    n = center.ambient
    ideal = center.fixed_ideal()
    attempts = []
    for k in range(retries + 1):
        label = ("tau", *stream, k)
        M = sample_matrix(n - 1, n, seed, bound, label)
        tau = LinearMap(M)
        if not tau.is_surjective():
            attempts.append((list(label), "tau not surjective"))
            continue
        zeta = tuple(Fraction(c) for c in primitive_integer(tau.kernel()[0]))
        if check_proper_projection(ideal, tau, zeta) is None:
            attempts.append((list(label), "no monic witness"))
            continue
        return tau, zeta
    raise RetryExhaustedError("no proper projection found", attempts)


def vanishing_poly(center: Center, tau: LinearMap) -> MPoly:
    """Minimal-degree polynomial on C^{n-1} vanishing on tau(V(u) ∪ A_1 ∪ S).

    Ties in degree go to the smaller grevlex leading monomial.  Raises
    DenseImageError when the image is dense (elimination ideal zero).
    """
    n = center.ambient
    if not tau.is_surjective() or tau.cols != n or tau.rows != n - 1:
        raise ProjectionError("tau must be a surjection C^n -> C^(n-1)")
    N = 2 * n - 1
    gens = [g.embed(N) for g in center.fixed_ideal().generators]
    for k, row in enumerate(tau.matrix):
        y = MPoly.var(n + k, N)
        gens.append(y - MPoly.linear(list(row) + [0] * (n - 1)))
    image = Ideal(gens, N).eliminate(range(n, N), compress=True)
    cands = [g for g in image.groebner() if not g.is_zero()]
    if not cands:
        raise DenseImageError("the fixed set has dense image under tau; no vanishing polynomial")
    best = min(cands, key=lambda g: (g.total_degree(), GREVLEX.key(g.leading_monomial())))
    return best.primitive()


# flow data ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FlowData:
    tau: LinearMap
    zeta: Vector
    h: MPoly
    phi: tuple[MPoly, ...]

    @property
    def n(self) -> int:
        return self.tau.cols

    @classmethod
    def build(
        cls, tau: LinearMap | Sequence, zeta: Sequence, h: MPoly, center: Center | None = None
    ) -> FlowData:
        tau = tau if isinstance(tau, LinearMap) else LinearMap(tau)
        zeta = to_point(zeta)
        n = tau.cols
        if tau.rows != n - 1 or not tau.is_surjective():
            raise ProjectionError("tau must be a surjection C^n -> C^(n-1)")
        if len(zeta) != n or all(z == 0 for z in zeta):
            raise ProjectionError("zeta must be a nonzero vector of length n")
        if any(c != 0 for c in tau(zeta)):
            raise ProjectionError("zeta is not in the kernel of tau")
        if h.nvars != n - 1:
            raise ValueError(f"h must have {n - 1} variables")
        flow = cls(tau, zeta, h, tuple(_flow_polys(tau, zeta, h)))
        if center is not None and not flow.fixes(center):
            raise ConstructionError("h(tau(x)) does not vanish on the fixed set")
        return flow

    def h_of_tau(self, nvars: int | None = None, offset: int = 0) -> MPoly:
        """h(tau(x)) with x placed at ``offset`` in a ring of ``nvars`` variables."""
        nvars = self.n if nvars is None else nvars
        return self.h.subs(self.tau.as_polys(nvars, offset), nvars)

    def fixes(self, center: Center) -> bool:
        return center.fixed_ideal().contains(self.h_of_tau())


def _flow_polys(tau: LinearMap, zeta: Vector, h: MPoly) -> list[MPoly]:
    n = tau.cols
    N = n + 1
    t = MPoly.var(0, N)
    ht = h.subs(tau.as_polys(N, 1), N)
    return [MPoly.var(i + 1, N) + (t * ht).scale(zeta[i]) for i in range(n)]


def flow_map(flow: FlowData) -> list[MPoly]:
    """phi(t, x) = x + t*h(tau(x))*zeta in the ring (t, x1..xn)."""
    return list(flow.phi)


# genericity --------------------------------------------------------------------


@dataclass(frozen=True)
class GenericityReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def _dh_dtau(h: MPoly, tau: LinearMap, a: Vector, eta: Vector) -> Fraction:
    """(d_{tau(a)}h o d_a tau)(eta)."""
    ta = tau(a)
    grad = [h.diff(k).evaluate(ta) for k in range(h.nvars)]
    return sum((g * c for g, c in zip(grad, tau(eta))), Fraction(0))


def genericity_report(
    center: Center, dist_index: int, a: Sequence, eta: Sequence, zeta: Sequence, tau: LinearMap, h: MPoly
) -> GenericityReport:
    """The four genericity conditions on (eta, zeta, tau, h) at a, evaluated exactly."""
    a, eta, zeta = to_point(a), to_point(eta), to_point(zeta)
    du_eta = center.normal_image(a, eta)
    du_zeta = center.normal_image(a, zeta)
    c1 = any(x != 0 for x in du_eta)
    c2 = rank([du_eta, du_zeta]) == 2
    c3 = du_eta[dist_index - 1] != 0
    c4 = _dh_dtau(h, tau, a, eta) != 0
    return GenericityReport(
        (
            check("eta_not_tangent", c1, "eta is not in T_aA"),
            check("zeta_not_in_span", c2, "zeta is not in C*eta + T_aA"),
            check("distinguished_derivative", c3, f"d_a u_{dist_index}(eta) != 0"),
            check("flow_derivative", c4, "(dh o dtau)(eta) != 0"),
        )
    )


# lifted sprays -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LiftedFlowSpray:
    flow: FlowData
    chart: BlowupChart
    lambda_fns: tuple[MPoly, ...]  # homogeneous lift, ring (t, chart vars)
    base_epoint: EPoint
    xi: Vector
    eta: Vector
    checks: tuple[Check, ...] = ()

    kind = "type1"

    @property
    def ring_size(self) -> int:
        return 1 + self.chart.nvars

    def evaluate(self, t, y: Sequence) -> tuple:
        """F(t, y) in chart coordinates; t and y may hold Dual numbers."""
        n, j = self.chart.n, self.chart.dist_index - 1
        x = list(y[:n])
        fx = tuple(p.evaluate([t] + x) for p in self.flow.phi)
        lam = [p.evaluate([t] + list(y)) for p in self.lambda_fns]
        return fx + tuple(lam[i] / lam[j] for i in range(len(lam)) if i != j)

    def derivative_at(self, y: Sequence) -> Vector:
        """d/dt F(t, y) at t = 0 via dual numbers."""
        return tuple(infinitesimal(v) for v in self.evaluate(Dual(0, 1), list(y)))

    def lambda_on_line(self, y: Sequence) -> list[MPoly]:
        """lambda_i(t, y) as univariate polynomials in t."""
        vals = {k + 1: c for k, c in enumerate(to_point(y))}
        return [p.partial_subs(vals).restrict([0]) for p in self.lambda_fns]


def sample_tangent(chart: BlowupChart, y: Sequence, seed: int, stream: Sequence = (), bound: int = 5) -> Vector:
    """Seeded combination of a basis of T_yY."""
    basis = chart.tangent_space(y)
    coeffs = sample_vector(len(basis), seed, bound, ("xi", *stream))
    return tuple(sum((c * v[i] for c, v in zip(coeffs, basis)), Fraction(0)) for i in range(chart.nvars))


def _line_unit(polys: Sequence[MPoly]) -> bool:
    """True when the polynomials in t have no common complex zero."""
    nz = [p for p in polys if not p.is_zero()]
    return bool(nz) and Ideal(nz, 1).is_unit()


def _nearby_fiber_points(chart: BlowupChart, b: EPoint, count: int = 3) -> list[tuple]:
    """Points of E in the chart near b: perturb lambda, and a along T_aA for linear centers."""
    a = b.base
    lam = b.chart_coords[chart.n :]
    tang = chart.center.tangent_space(a) if chart.center.is_linear() else []
    out = []
    for k in range(1, count + 1):
        eps = Fraction(1, 10 * k + 1)
        a2 = list(a)
        for v in tang:
            a2 = [x + eps * c for x, c in zip(a2, v)]
        pt = tuple(a2) + tuple(l + eps * (i + 1) for i, l in enumerate(lam))
        if chart.contains(pt) and chart.center.contains(pt[: chart.n]):
            out.append(pt)
    return out


def lift_flow_spray(
    flow: FlowData, chart: BlowupChart, b: EPoint, xi: Sequence | None = None, seed: int = 0
) -> LiftedFlowSpray:
    """Lift a flow to the chart: lambda_i from u_i(f) = u_j(x)*lambda_i modulo the chart relations."""
    if b.chart_index != chart.dist_index:
        raise ValueError("EPoint belongs to a different chart")
    n, N = chart.n, 1 + chart.nvars
    f = [p.embed(N) for p in flow.phi]
    rels = [rel.embed(N, 1) for rel in chart.relations]
    I_Y = Ideal(rels, N)
    uj = chart.exc_fn.embed(N, 1)
    J = Ideal([uj] + rels, N)
    lam = []
    for g in chart.center.local_gens:
        ug = g.subs(f, N)
        try:
            cof = J.lift(ug)
        except NotInIdealError as exc:
            raise ConstructionError(f"flow does not fix the center: {exc}") from exc
        li = I_Y.normal_form(cof[0])
        if not I_Y.contains(ug - uj * li):
            raise ConstructionError("lift identity fails")  # pragma: no cover
        lam.append(li)

    y = b.chart_coords
    if xi is None:
        xi = sample_tangent(chart, y, seed, ("type1",))
    xi = to_point(xi)
    eta = xi[:n]

    checks = [check("lift_identity", True, "u_i(f) - u_j*lambda_i reduces to 0 modulo the chart")]
    taut = [c.embed(N, 1) for c in chart.homogeneous_coords()]
    t0 = {0: 0}
    section = all(I_Y.contains(li.partial_subs(t0) - tc) for li, tc in zip(lam, taut))
    checks.append(check("section", section, "lambda(0, y) equals the tautological coordinates"))
    j = chart.dist_index - 1
    uf = [g.subs(f, N) for g in chart.center.local_gens]
    proj = all(I_Y.contains(uf[i] * lam[j] - lam[i] * uf[j]) for i in range(chart.r))
    checks.append(check("projection", proj, "F lies over f in the target chart"))
    spray = LiftedFlowSpray(flow, chart, tuple(lam), b, xi, eta)
    on_line = _line_unit(spray.lambda_on_line(y))
    checks.append(check("line_regular", on_line, "(lambda_i(t, b)) generate the unit ideal in Q[t]"))
    near = _nearby_fiber_points(chart, b)
    near_ok = all(_line_unit(spray.lambda_on_line(p)) for p in near)
    checks.append(
        check("nearby_regular", near_ok, f"unit ideal on the line at {len(near)} nearby points of E", False)
    )
    return LiftedFlowSpray(flow, chart, tuple(lam), b, xi, eta, tuple(checks))


def genericity_check(spray: LiftedFlowSpray) -> GenericityReport:
    f = spray.flow
    return genericity_report(
        spray.chart.center, spray.chart.dist_index, spray.base_epoint.base, spray.eta, f.zeta, f.tau, f.h
    )


@dataclass(frozen=True)
class SprayDerivative:
    c: Fraction
    closed_form: Vector  # c * (d_a u_i(zeta))_i
    symbolic: Vector  # d/dt lambda_i(t, b) at 0
    affine: Vector  # chart tangent vector at b, length n + r - 1


def spray_derivative(spray: LiftedFlowSpray) -> SprayDerivative:
    """Closed-form and symbolic derivatives of the homogeneous lift; they must agree."""
    chart, b, flow = spray.chart, spray.base_epoint, spray.flow
    a, j = b.base, chart.dist_index - 1
    du_eta = chart.center.normal_image(a, spray.eta)
    if du_eta[j] == 0:
        raise ConstructionError("d_a u_j(eta) = 0; genericity fails")
    c = _dh_dtau(flow.h, flow.tau, a, spray.eta) / du_eta[j]
    closed = tuple(c * z for z in chart.center.normal_image(a, flow.zeta))
    pt = [Fraction(0)] + list(b.chart_coords)
    symbolic = tuple(p.diff(0).evaluate(pt) for p in spray.lambda_fns)
    if closed != symbolic:
        raise ConstructionError(
            f"closed-form derivative {list(map(str, closed))} != symbolic {list(map(str, symbolic))}"
        )
    affine = spray.derivative_at(b.chart_coords)
    return SprayDerivative(c, closed, symbolic, affine)


# families ------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelFamily:
    sprays: tuple[LiftedFlowSpray, ...]
    derivatives: tuple[SprayDerivative, ...]
    rank: int
    attempts: tuple  # (label, outcome) per attempt


def fiber_rank(vectors: Sequence[Sequence]) -> int:
    return rank([list(v) for v in vectors]) if vectors else 0


def kernel_spanning_family(
    chart: BlowupChart, b: EPoint, seed: int, retries: int = 5, bound: int = 3
) -> KernelFamily:
    """r-1 flow sprays whose derivatives span the fiber tangent space at b."""
    need = chart.r - 1
    if need <= 0:
        return KernelFamily((), (), 0, ())
    sprays, derivs, attempts = [], [], []
    for k in range(need + retries):
        if len(sprays) == need:
            break
        label = ("type1", k)
        try:
            tau, zeta = choose_proper_projection(chart.center, seed, retries, bound, stream=label)
            h = vanishing_poly(chart.center, tau)
            flow = FlowData.build(tau, zeta, h, chart.center)
            spray = lift_flow_spray(flow, chart, b, seed=seed, xi=sample_tangent(chart, b.chart_coords, seed, label))
        except (RetryExhaustedError, DenseImageError, ProjectionError, ConstructionError) as exc:
            attempts.append((list(label), f"construction: {exc}"))
            continue
        report = genericity_check(spray)
        if not report.passed:
            attempts.append((list(label), "genericity: " + ",".join(report.failed())))
            continue
        d = spray_derivative(spray)
        if fiber_rank([x.affine for x in derivs] + [d.affine]) == len(derivs):
            attempts.append((list(label), "no new fiber direction"))
            continue
        sprays.append(spray)
        derivs.append(d)
        attempts.append((list(label), "accepted"))
    if len(sprays) < need:
        raise RetryExhaustedError(f"found {len(sprays)} of {need} fiber directions", attempts)
    return KernelFamily(tuple(sprays), tuple(derivs), fiber_rank([d.affine for d in derivs]), tuple(attempts))


def fiber_containment(chart: BlowupChart, vec: Sequence) -> bool:
    """d_b pi annihilates the vector."""
    return all(c == 0 for c in chart.pushforward(vec))


__all__ = [
    "FlowData",
    "GenericityReport",
    "KernelFamily",
    "LiftedFlowSpray",
    "SprayDerivative",
    "check_proper_projection",
    "choose_proper_projection",
    "fiber_containment",
    "flow_map",
    "genericity_check",
    "genericity_report",
    "kernel_spanning_family",
    "lift_flow_spray",
    "sample_tangent",
    "spray_derivative",
    "vanishing_poly",
]
