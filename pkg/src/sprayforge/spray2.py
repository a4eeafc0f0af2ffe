"""Sprays of the second type: retract, closed embedding, extension and lift.

Pipeline at a point b of E in a chart Y (ring x1..xn, l1..l{r-1}, m = n+r-1):

1. ``hypersurface_retract``: a hypersurface W ⊇ A_0 with a polynomial
   retraction rho: W -> A_0.  V = W x C^{r-1}.
2. ``jelonek_embed``: T = V ∪ (hypersurface containing Y); after a shear and a
   translation, gamma = sigma^{-1} o F embeds T ∩ Z as a closed subvariety.
3. ``extend_to_ambient``: a polynomial map agreeing with rho∘pi on V and with
   pi on Y, glued by a Chinese-remainder lift, then pulled to C^m by gamma^{-1}.
4. ``type2_spray``: f(t, y) = phi(gamma(y) + t*zeta) lifted through the
   blow-up via u_j∘phi = p*q_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .blowup import BlowupChart, Center, EPoint, build_chart, principality_witness
from .checks import FAIL, INCONCLUSIVE, PASS, Check, check
from .errors import (
    EmbeddingError,
    GluingError,
    NotInIdealError,
    PrincipalityError,
    ResourceBudgetError,
    RetryExhaustedError,
    UnreducedCenterError,
    UnsupportedCenterError,
)
from .polycore import (
    GREVLEX,
    LEX,
    Dual,
    Ideal,
    LinearMap,
    MPoly,
    block_order,
    in_span,
    jacobian_at,
    matvec,
    nullspace,
    rank,
    sample_generic,
    sample_matrix,
    sample_vector,
    solve,
    step_budget,
    to_point,
)
from .polycore.dual import infinitesimal

FIBER_CHECK_STEPS = 2000

Vector = tuple[Fraction, ...]


# rational maps -------------------------------------------------------------------


def compose_rational(poly: MPoly, nums: Sequence[MPoly], den: MPoly) -> tuple[MPoly, MPoly]:
    """poly(nums/den) = N / den^d with d = deg(poly); returns (N, den^d)."""
    d = max(poly.total_degree(), 0)
    nv = den.nvars
    den_pows = [MPoly.const(1, nv)]
    for _ in range(d):
        den_pows.append(den_pows[-1] * den)
    num_pows: dict[tuple[int, int], MPoly] = {}
    out = MPoly.zero(nv)
    for e, c in poly.terms.items():
        term = MPoly.const(c, nv)
        for i, k in enumerate(e):
            if k:
                p = num_pows.get((i, k))
                if p is None:
                    p = nums[i] ** k
                    num_pows[(i, k)] = p
                term = term * p
        out = out + term * den_pows[d - sum(e)]
    return out, den_pows[d]


# retract ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RetractData:
    L: LinearMap
    W_poly: MPoly
    rho: tuple[MPoly, ...]
    method: str
    checks: tuple[Check, ...] = ()


def _reduce_late_first(f: MPoly, ideal: Ideal) -> MPoly:
    """Normal form that eliminates higher-index variables first (lex on reversed variables)."""
    n = ideal.nvars
    rev = list(range(n - 1, -1, -1))
    flipped = Ideal([g.remap(n, rev) for g in ideal.generators], n)
    return flipped.normal_form(f.remap(n, rev), LEX).remap(n, rev)


def _retract_checks(center: Center, W: MPoly, rho: Sequence[MPoly]) -> list[Check]:
    n = center.ambient
    a0 = center.a0_ideal()
    Wi = Ideal([W], n)
    contains = all(a0.contains(g) for g in [W])
    into = all(Wi.contains(g.subs(list(rho), n)) for g in a0.generators)
    ident = all(a0.contains(MPoly.var(i, n) - rho[i]) for i in range(n))
    return [
        check("W_contains_A0", contains, "W_poly lies in I(A_0)"),
        check("rho_into_A0", into, "u(rho(x)) lies in (W_poly)"),
        check("rho_identity_on_A0", ident, "x - rho(x) lies in I(A_0)"),
    ]


def _linear_retract(center: Center, a: Vector, seed: int, prefer: int) -> RetractData:
    n, r = center.ambient, center.r
    M = [[g.diff(k).constant_value() if g.diff(k).is_constant() else 0 for k in range(n)] for g in center.local_gens]
    for k in range(20):
        K = sample_matrix(n, r, seed, 3, ("retract", "complement", k))
        MK = [[sum(M[i][s] * K[s][c] for s in range(n)) for c in range(r)] for i in range(r)]
        if rank(MK) == r:
            break
    else:  # pragma: no cover - a generic complement exists
        raise UnsupportedCenterError("no complement found for the linear center")
    # P = K (MK)^{-1}
    inv_cols = [solve(MK, [Fraction(int(i == c)) for i in range(r)]) for c in range(r)]
    P = [[sum(K[i][s] * inv_cols[c][s] for s in range(r)) for c in range(r)] for i in range(n)]
    rho = tuple(
        MPoly.var(i, n) - sum((g.scale(P[i][c]) for c, g in enumerate(center.local_gens)), MPoly.zero(n))
        for i in range(n)
    )
    # L: functionals killing the complement, plus the distinguished generator's linear part
    ann = nullspace([list(col) for col in zip(*K)], n)
    L = LinearMap([list(v) for v in ann] + [M[prefer - 1]])
    W = center.local_gens[prefer - 1]
    return RetractData(L, W, rho, "linear", tuple(_retract_checks(center, W, rho)))


def _graph_retract(center: Center, L: LinearMap, max_degree: int) -> tuple[MPoly, tuple[MPoly, ...]] | None:
    n, k = center.ambient, L.rows
    N = n + k
    gens = [g.embed(N) for g in center.a0_ideal().generators]
    for i, row in enumerate(L.matrix):
        gens.append(MPoly.var(n + i, N) - MPoly.linear(list(row) + [0] * k))
    graph = Ideal(gens, N)
    image = graph.eliminate(range(n, N), compress=True)
    basis = image.groebner()
    if len(basis) != 1:
        return None
    order = block_order(range(n))
    inv = []
    for i in range(n):
        nf = graph.normal_form(MPoly.var(i, N), order)
        if nf.variables() & set(range(n)):
            return None
        ri = _reduce_late_first(nf.restrict(list(range(n, N))), image)
        if ri.total_degree() > max_degree:
            return None
        inv.append(ri)
    Lx = L.as_polys(n)
    W = basis[0].subs(Lx, n).primitive()
    rho = tuple(ri.subs(Lx, n) for ri in inv)
    return W, rho


def hypersurface_retract(
    center: Center,
    a: Sequence,
    seed: int,
    prefer: int | None = None,
    max_degree: int = 8,
    retries: int = 5,
    accept=None,
) -> RetractData:
    """Hypersurface W ⊇ A_0 with a polynomial retraction rho onto A_0.

    ``prefer`` names a generator that W should coincide with when possible;
    failing that, the first W passing the ``accept`` predicate is returned.
    Linear centers use a projection along a generic complement.  Otherwise
    coordinate projections are tried first, then seeded generic ones; each
    must be biregular on A_0 at a with a polynomial inverse.
    """
    a = to_point(a)
    n, r = center.ambient, center.r
    prefer = center.r if prefer is None else prefer
    if center.is_linear() and center.component0 is None:
        return _linear_retract(center, a, seed, prefer)
    tangent = center.tangent_space(a)
    k = n - r + 1
    cands: list[LinearMap] = []
    for cols in combinations(range(n), k):
        cands.append(LinearMap([[Fraction(int(c == col)) for c in range(n)] for col in cols]))
    for s in range(retries + 1):
        cands.append(LinearMap(sample_matrix(k, n, seed, 3, ("retract", "L", s))))
    fallback = None
    Wp = Ideal([center.local_gens[prefer - 1]], n)
    for L in cands:
        if tangent and rank([list(L(v)) for v in tangent]) != len(tangent):
            continue
        try:
            found = _graph_retract(center, L, max_degree)
        except ResourceBudgetError:
            continue
        if found is None:
            continue
        W, rho = found
        data = RetractData(L, W, rho, "graph", tuple(_retract_checks(center, W, rho)))
        if not all(c.passed for c in data.checks):
            continue
        if Ideal([W], n).equals(Wp):
            return data
        if accept is not None and not accept(W):
            continue
        fallback = fallback or data
    if fallback is not None:
        return fallback
    raise UnsupportedCenterError("no linear projection with a polynomial inverse on A_0")


# embedding ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddingData:
    """gamma = sigma^{-1} o F o (translate) o (shear^{-1}) on T ∩ Z.

    Final coordinates: x'' = shear^{-1}(x) - c with shear^{-1}: x_j -> x_j - a_j*x_m.
    """

    m: int
    shear: Vector
    translation: Vector
    T_poly: MPoly
    T_final: MPoly
    hN: MPoly
    R_ideal: Ideal | None
    image_ideal: Ideal
    b_img: Vector
    checks: tuple[Check, ...] = ()

    def to_final(self, x: Sequence) -> list:
        m, a, c = self.m, self.shear, self.translation
        xm = x[m - 1]
        return [x[j] - a[j] * xm - c[j] for j in range(m - 1)] + [xm - c[m - 1]]

    def from_final(self, xf: Sequence) -> list:
        m, a, c = self.m, self.shear, self.translation
        xm = xf[m - 1] + c[m - 1]
        return [xf[j] + c[j] + a[j] * xm for j in range(m - 1)] + [xm]

    def final_polys(self) -> list[MPoly]:
        """Final coordinates x'' as polynomials in the original ones."""
        return [MPoly.zero(self.m) + v for v in self.to_final(MPoly.gens(self.m))]

    def gamma(self, x: Sequence) -> tuple:
        """Forward map in original coordinates; entries may be Dual numbers."""
        xf = self.to_final(list(x))
        g = self.hN.evaluate(xf[:-1]) * xf[-1]
        return tuple(v / g for v in xf[:-1]) + (g,)

    def gamma_inv(self, z: Sequence) -> tuple:
        zm = z[-1]
        y = [v * zm for v in z[:-1]]
        xf = y + [zm / self.hN.evaluate(y)]
        return tuple(self.from_final(xf))

    def gamma_inv_rational(self) -> tuple[list[MPoly], MPoly]:
        """gamma^{-1} as (numerators, common denominator D) in the z ring."""
        m, a, c = self.m, self.shear, self.translation
        z = MPoly.gens(m)
        zm = z[-1]
        D = self.hN.subs([v * zm for v in z[:-1]], m)
        last = zm + D.scale(c[-1])
        nums = [(z[k] * zm + c[k]) * D + last.scale(a[k]) for k in range(m - 1)]
        return nums + [last], D

    def gamma_rational(self) -> tuple[list[MPoly], MPoly]:
        """gamma as (numerators, common denominator) in the original chart ring."""
        m = self.m
        xf = self.final_polys()
        g = self.hN.subs(xf[:-1], m)
        G = g * xf[-1]
        return list(xf[:-1]) + [G * G], G

    def in_domain(self, x: Sequence) -> bool:
        xf = self.to_final(to_point(x))
        return xf[-1] != 0 and self.hN.evaluate(xf[:-1]) != 0

    def pull_ideal(self, polys: Sequence[MPoly]) -> Ideal:
        """Ideal of gamma(V(polys) ∩ Z) in the z ring."""
        m = self.m
        if self.hN.is_constant():
            nums, D = self.gamma_inv_rational()
            d = D.constant_value()
            images = [v.scale(1 / d) for v in nums]
            return Ideal([p.subs(images, m) for p in polys], m)
        # ring (z1..zm, s) with s = x''_m and z_m = h''(y) * s
        N = m + 1
        z = MPoly.gens(N)
        y = [v * z[m - 1] for v in z[: m - 1]]
        s = z[m]
        xf = y + [s]
        orig = [MPoly.zero(N) + v for v in self.from_final(xf)]
        gens = [p.subs(orig, N) for p in polys]
        gens.append(z[m - 1] - self.hN.subs(y, N) * s)
        return Ideal(gens, N).eliminate(range(m), compress=True)

    def roundtrip(self, points: Sequence[Sequence]) -> list[bool]:
        return [tuple(self.gamma_inv(self.gamma(to_point(p)))) == to_point(p) for p in points]


def _shear_poly(T: MPoly, a: Sequence) -> MPoly:
    m = T.nvars
    g = MPoly.gens(m)
    images = [g[j] + g[m - 1].scale(a[j]) for j in range(m - 1)] + [g[m - 1]]
    return T.subs(images, m)


def _monic_in_last(T: MPoly) -> bool:
    m = T.nvars
    k = T.degree_in(m - 1)
    return k > 0 and T.coefficients_in(m - 1)[k].is_constant()


def sample_hypersurface_points(T: MPoly, seed: int, count: int, bound: int = 6) -> list[Vector]:
    """Rational points of V(T), solving for a variable in which T is linear."""
    m = T.nvars
    var = next((i for i in range(m) if T.degree_in(i) == 1), None)
    if var is None:
        raise ValueError("no variable of degree 1; cannot sample rational points")
    coeffs = T.coefficients_in(var)
    c1, c0 = coeffs[1], coeffs.get(0, MPoly.zero(m))
    out = []
    k = 0
    while len(out) < count and k < 50 * count:
        vals = [Fraction(v) for v in sample_generic(m, seed, bound, ("points", k))]
        k += 1
        vals[var] = Fraction(0)
        lead = c1.evaluate(vals)
        if lead == 0:
            continue
        vals[var] = -c0.evaluate(vals) / lead
        out.append(tuple(vals))
    return out


def jelonek_embed(
    T_poly: MPoly,
    b_img: Sequence,
    R_ideal: Ideal | None,
    seed: int,
    allow_shear: bool = True,
    retries: int = 5,
) -> EmbeddingData:
    """Closed embedding of T ∩ Z into C^m following the shear / F / sigma recipe."""
    m = T_poly.nvars
    b = to_point(b_img)
    if T_poly.evaluate(b) != 0:
        raise EmbeddingError("point does not lie on T")
    if R_ideal is not None and not R_ideal.is_unit():
        if R_ideal.vanishes_at(b):
            raise EmbeddingError("point lies on the excluded set R")
        if R_ideal.codimension() < 2:
            raise EmbeddingError("excluded set R must have codimension at least 2")
    shears: list[Vector] = []
    zero = tuple(Fraction(0) for _ in range(m - 1))
    if _monic_in_last(T_poly):
        shears.append(zero)
    elif not allow_shear:
        raise EmbeddingError("T is not monic in the last variable and shearing is disabled")
    if allow_shear:
        for k in range(retries + 1):
            shears.append(sample_vector(m - 1, seed, 3, ("shear", k)))
    for a in shears:
        Ts = _shear_poly(T_poly, a)
        if not _monic_in_last(Ts):
            continue
        bs = [b[j] - a[j] * b[m - 1] for j in range(m - 1)] + [b[m - 1]]
        h_sh = _projection_poly(R_ideal, a, m)
        if h_sh is None:
            continue
        if h_sh.evaluate(bs[:-1]) == 0:
            continue
        translations = [tuple(Fraction(0) for _ in range(m))]
        translations += [sample_vector(m, seed, 5, ("translate", k), nonzero=True) for k in range(retries + 1)]
        for c in translations:
            if Ts.evaluate(c) == 0 or h_sh.evaluate(c[:-1]) == 0 or bs[-1] - c[-1] == 0:
                continue
            g = MPoly.gens(m)
            Tf = Ts.subs([g[j] + c[j] for j in range(m)], m)
            hN = h_sh.subs([MPoly.gens(m - 1)[j] + c[j] for j in range(m - 1)], m - 1)
            lead = Tf.coefficients_in(m - 1)[Tf.degree_in(m - 1)].constant_value()
            Tf = Tf.scale(1 / lead)
            emb = EmbeddingData(m, a, c, T_poly, Tf, hN, R_ideal, Ideal.zero(m), b)
            image = emb.pull_ideal([T_poly])
            checks = [
                check("monic", True, f"sheared T has degree {Tf.degree_in(m - 1)} and constant leading coefficient"),
                check("origin_off_T", Tf.evaluate([0] * m) != 0, "0 not in T (final coordinates)"),
                check("origin_off_N", hN.evaluate([0] * (m - 1)) != 0, "0 not in N"),
                check("point_off_H_N", emb.in_domain(b), "b not in H ∪ N"),
                check("image_misses_H", (image + Ideal([MPoly.var(m - 1, m)], m)).is_unit(), "image ideal + (z_m) = (1)"),
            ]
            return EmbeddingData(m, a, c, T_poly, Tf, hN, R_ideal, image, b, tuple(checks))
    raise EmbeddingError("no shear / translation satisfied the point conditions")


def _projection_poly(R_ideal: Ideal | None, a: Sequence, m: int) -> MPoly | None:
    """h on C^{m-1} (sheared coordinates) vanishing on p(R); 1 when R is empty."""
    if R_ideal is None or R_ideal.is_unit():
        return MPoly.const(1, m - 1)
    Rs = Ideal([_shear_poly(g, a) for g in R_ideal.generators], m)
    proj = Rs.eliminate(range(m - 1), compress=True)
    cands = [g for g in proj.groebner() if not g.is_zero()]
    if not cands:
        return None
    return min(cands, key=lambda g: (g.total_degree(), GREVLEX.key(g.leading_monomial()))).primitive()


# extension -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Extension:
    phi: tuple[MPoly, ...]
    pieces: tuple[tuple[Ideal, tuple[MPoly, ...]], ...]
    checks: tuple[Check, ...]


def transversal_at(ideals: Sequence[Ideal], pt: Sequence) -> bool:
    """Codimensions add at pt: rank of the stacked Jacobians is the sum of the ranks."""
    ranks = [rank(jacobian_at(list(I.generators), pt)) if I.generators else 0 for I in ideals]
    stacked = [row for I in ideals for row in (jacobian_at(list(I.generators), pt) if I.generators else [])]
    return rank(stacked) == sum(ranks)


def extend_to_ambient(
    pieces: Sequence[tuple[Ideal, Sequence[MPoly]]],
    at: Sequence | None = None,
    canonical: bool = True,
) -> Extension:
    """Polynomial map agreeing with each piece's map modulo the piece's ideal.

    Pieces are glued pairwise: for maps g1 mod I1 and g2 mod I2, write
    g1 - g2 = alpha + beta with alpha in I1, beta in I2, and take g1 - alpha.
    """
    if not pieces:
        raise ValueError("need at least one piece")
    nv = pieces[0][0].nvars
    checks = []
    if at is not None and len(pieces) > 1:
        ok = transversal_at([I for I, _ in pieces], at)
        checks.append(check("transversal", ok, "tangent spaces of the pieces are transverse at the point"))
        if not ok:
            raise GluingError("pieces are not transverse at the gluing point")
    I_acc, g_acc = pieces[0][0], list(pieces[0][1])
    for I2, g2 in pieces[1:]:
        g2 = list(g2)
        if len(g2) != len(g_acc):
            raise ValueError("pieces map to spaces of different dimension")
        S = I_acc + I2
        k = len(I_acc.generators)
        new = []
        for f1, f2 in zip(g_acc, g2):
            try:
                cof = S.lift(f1 - f2)
            except NotInIdealError as exc:
                raise GluingError("piece maps disagree on the intersection") from exc
            alpha = sum((c * g for c, g in zip(cof[:k], I_acc.generators)), MPoly.zero(nv))
            new.append(f1 - alpha)
        I_acc = I_acc.intersect(I2)
        g_acc = new
    phi = [I_acc.normal_form(p) for p in g_acc] if canonical else g_acc
    agree = all(I.contains(p - g) for I, gs in pieces for p, g in zip(phi, gs))
    checks.append(check("agreement", agree, "phi - g lies in I(X) for every piece and coordinate"))
    if not agree:  # pragma: no cover - guaranteed by construction
        raise GluingError("extension does not agree with the pieces")
    return Extension(tuple(phi), tuple((I, tuple(g)) for I, g in pieces), tuple(checks))


def fiber_dimension_check(phi: Sequence[MPoly], X: Ideal, samples: Sequence[Sequence]) -> Check:
    """dim phi^{-1}(z) minus X <= m - n at each sample value z (pass / fail / inconclusive)."""
    m, n = X.nvars, len(phi)
    worst = -1
    try:
        for z in samples:
            fiber = Ideal([p - Fraction(c) for p, c in zip(phi, z)], m)
            # fiber : I(X)^inf is the intersection of the fiber : g^inf over generators g
            for g in X.generators:
                worst = max(worst, fiber.saturate(g).dimension())
    except ResourceBudgetError as exc:
        return Check("fiber_dimension", INCONCLUSIVE, str(exc), False)
    status = PASS if worst <= m - n else FAIL
    return Check("fiber_dimension", status, f"max fiber dimension off X is {worst}, bound {m - n}", False)


# type-2 sprays ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Type2Context:
    """Data shared by every type-2 spray at one point: retract, embedding, extension."""

    chart: BlowupChart
    base_epoint: EPoint
    retract: RetractData
    embedding: EmbeddingData
    phi_chart: tuple[MPoly, ...]
    phi: tuple[MPoly, ...]
    p_hint: MPoly | None
    checks: tuple[Check, ...]


def prepare_type2(chart: BlowupChart, b: EPoint, seed: int, retries: int = 5, max_degree: int = 8) -> Type2Context:
    center, n, m = chart.center, chart.n, chart.nvars
    j = chart.dist_index
    retract = hypersurface_retract(center, b.base, seed, prefer=j, max_degree=max_degree, retries=retries)
    if not Ideal([retract.W_poly], n).equals(Ideal([center.local_gens[j - 1]], n)):
        raise UnsupportedCenterError("the retract hypersurface is not cut out by the distinguished generator")
    W = retract.W_poly.embed(m)
    rels = list(chart.relations)
    if len(rels) == 1:
        g_Y = rels[0]
    else:
        coeffs = sample_vector(len(rels), seed, 3, ("type2", "Y-hypersurface"))
        g_Y = sum((rel.scale(c) for c, rel in zip(coeffs, rels)), MPoly.zero(m))
    T = W * g_Y
    R = None
    extra = [I for I in (center.other_components, center.avoid) if I is not None and not I.is_unit()]
    if extra:
        bad = extra[0]
        for I in extra[1:]:
            bad = bad.intersect(I)
        R = Ideal([W * rel for rel in rels] + [g.embed(m) for g in bad.generators], m)
    emb = jelonek_embed(T, b.chart_coords, R, seed, retries=retries)
    I_V, I_Y = Ideal([W], m), Ideal(rels, m)
    pi = chart.projection()
    rho_pi = [p.embed(m) for p in retract.rho]
    ext = extend_to_ambient([(I_V, rho_pi), (I_Y, pi)], at=b.chart_coords)
    nums, D = emb.gamma_inv_rational()
    phi = []
    if D.is_constant():
        inv = [v.scale(1 / D.constant_value()) for v in nums]
        phi = [p.subs(inv, m) for p in ext.phi]
        p_hint = W.subs(inv, m)
    else:
        image = emb.image_ideal
        try:
            cof = (image + Ideal([D], m)).lift(MPoly.const(1, m))
        except NotInIdealError as exc:
            raise EmbeddingError("denominator of gamma^{-1} is not a unit on the image") from exc
        e = cof[-1]
        for p in ext.phi:
            N, Dd = compose_rational(p, nums, D)
            k = p.total_degree()
            phi.append(image.normal_form(N * (e ** max(k, 0))))
        p_hint = None
    samples = [b.base, sample_vector(n, seed, 3, ("type2", "fiber-sample"))]
    with step_budget(FIBER_CHECK_STEPS):
        fibers = fiber_dimension_check(ext.phi, I_V.intersect(I_Y), samples)
    checks = list(retract.checks) + list(emb.checks) + list(ext.checks) + [fibers]
    return Type2Context(chart, b, retract, emb, ext.phi, tuple(phi), p_hint, tuple(checks))


@dataclass(frozen=True, eq=False)
class Type2Spray:
    context: Type2Context
    zeta: Vector
    arc: Vector | None  # quadratic correction, used only when S is nonempty
    p: MPoly
    q: tuple[MPoly, ...]
    derivative: Vector
    pushforward: Vector
    fiberward_degenerate: bool
    checks: tuple[Check, ...] = field(default=())

    kind = "type2"

    @property
    def chart(self) -> BlowupChart:
        return self.context.chart

    @property
    def phi(self) -> tuple[MPoly, ...]:
        return self.context.phi

    def path(self, t, y: Sequence) -> list:
        z = self.context.embedding.gamma(list(y))
        out = [zi + t * c for zi, c in zip(z, self.zeta)]
        if self.arc is not None:
            out = [zi + t * t * c for zi, c in zip(out, self.arc)]
        return out

    def evaluate(self, t, y: Sequence) -> tuple:
        z = self.path(t, y)
        j = self.chart.dist_index - 1
        x = tuple(p.evaluate(z) for p in self.phi)
        qv = [g.evaluate(z) for g in self.q]
        return x + tuple(qv[i] / qv[j] for i in range(len(qv)) if i != j)

    def derivative_at(self, y: Sequence) -> Vector:
        return tuple(infinitesimal(v) for v in self.evaluate(Dual(0, 1), list(y)))


def _univariate_along(polys: Sequence[MPoly], base: Sequence, direction: Sequence, arc: Sequence | None) -> list[MPoly]:
    """Restrict polynomials on C^m to the curve base + t*direction (+ t^2*arc)."""
    t = MPoly.var(0, 1)
    curve = [MPoly.const(b0, 1) + t.scale(d) for b0, d in zip(base, direction)]
    if arc is not None:
        curve = [c + (t * t).scale(e) for c, e in zip(curve, arc)]
    return [p.subs(curve, 1) for p in polys]


def _unit_on_line(polys: Sequence[MPoly]) -> bool:
    nz = [p for p in polys if not p.is_zero()]
    return bool(nz) and Ideal(nz, 1).is_unit()


def _leading_form_check(q: Sequence[MPoly], zeta: Sequence) -> bool:
    """The direction at infinity avoids the common zeros of the top-degree forms."""
    return any(not g.is_zero() and g.homogeneous_part(g.total_degree()).evaluate(zeta) != 0 for g in q)


def w_condition(chart: BlowupChart, b: EPoint) -> bool:
    """Some tangent vector of Y at b pushes forward outside T_aA."""
    return any(
        any(x != 0 for x in chart.center.normal_image(b.base, chart.pushforward(v)))
        for v in chart.tangent_space(b.chart_coords)
    )


def _type2_identities(ctx: Type2Context, q: Sequence[MPoly], p: MPoly) -> list[Check]:
    """Principality, projection and section identities as polynomial statements."""
    chart, emb = ctx.chart, ctx.embedding
    m, n, j = chart.nvars, chart.n, chart.dist_index - 1
    uphi = [g.subs(list(ctx.phi), m) for g in chart.center.local_gens]
    principal = all((u - p * qi).is_zero() for u, qi in zip(uphi, q))
    proj = all((uphi[i] * q[j] - q[i] * uphi[j]).is_zero() for i in range(chart.r))
    I_Y = chart.ideal
    x_ok = all(I_Y.contains(ctx.phi_chart[i] - MPoly.var(i, m)) for i in range(n))
    nums, G = emb.gamma_rational()
    inv_nums, D = emb.gamma_inv_rational()
    roundtrip = True
    if D.is_constant():
        for k in range(m):
            N, Gd = compose_rational(inv_nums[k].scale(1 / D.constant_value()), nums, G)
            if not (N - MPoly.var(k, m) * Gd).is_zero():
                roundtrip = False
    else:
        roundtrip = all(emb.roundtrip([chart_pt for chart_pt in [ctx.base_epoint.chart_coords]]))
    qg = []
    d = max(g.total_degree() for g in q)
    for g in q:
        N, Gd = compose_rational(g, nums, G)
        qg.append(N * G ** (d - max(g.total_degree(), 0)))
    taut = chart.homogeneous_coords()
    lam_ok = True
    sat = None
    for i in range(chart.r):
        diff = qg[i] - taut[i] * qg[j]
        if not I_Y.contains(diff):
            sat = sat or I_Y.saturate(chart.exc_fn)
            if not sat.contains(diff):
                lam_ok = False
    return [
        check("principality", principal, "u_i(phi) - p*q_i is the zero polynomial"),
        check("projection", proj, "u_i(phi)*q_j - q_i*u_j(phi) is the zero polynomial"),
        check("section_x", x_ok and roundtrip, "phi(gamma(y)) = pi(y) modulo the chart relations"),
        check("section_lambda", lam_ok, "q_i(gamma(y)) / q_j(gamma(y)) equals the chart coordinate on Y"),
    ]


def type2_spray(
    ctx: Type2Context,
    seed: int,
    zeta: Sequence | None = None,
    stream: Sequence = (),
    retries: int = 5,
) -> Type2Spray:
    chart, b, emb = ctx.chart, ctx.base_epoint, ctx.embedding
    m = chart.nvars
    if zeta is None:
        zeta = sample_vector(m, seed, 5, ("type2", "zeta", *stream))
    zeta = to_point(zeta)
    if all(c == 0 for c in zeta):
        raise ValueError("zeta = 0 is degenerate")
    gb = emb.gamma(b.chart_coords)
    wit = principality_witness(list(ctx.phi), chart.center, gb, hint=ctx.p_hint)
    if wit is None:
        raise PrincipalityError("no principality witness at gamma(b)")
    checks = [check("principality_at_point", True, "q(gamma(b)) != 0")]
    checks.append(check("w_condition", w_condition(chart, b), "d_b pi(T_bY) is not inside T_aA"))
    checks.extend(_type2_identities(ctx, wit.q, wit.p))

    arc = None
    avoid = chart.center.avoid
    if avoid is not None and not avoid.is_unit():
        s_phi = [g.subs(list(ctx.phi), m) for g in avoid.generators]
        found = _unit_on_line(_univariate_along(s_phi, gb, zeta, None))
        for k in range(retries + 1):
            if found:
                break
            arc = sample_vector(m, seed, 3, ("type2", "arc", *stream, k))
            found = _unit_on_line(_univariate_along(s_phi, gb, zeta, arc))
        checks.append(check("avoids_S", found, "phi along the curve never meets S"))
    line_q = _univariate_along(wit.q, gb, zeta, arc)
    checks.append(check("line_regular", _unit_on_line(line_q), "q along the curve generates (1) in Q[t]"))
    checks.append(
        check("infinity_regular", _leading_form_check(wit.q, zeta), "leading forms of q are nonzero at zeta", False)
    )
    spray = Type2Spray(ctx, zeta, arc, wit.p, wit.q, (), (), False, ())
    deriv = spray.derivative_at(b.chart_coords)
    push = chart.pushforward(deriv)
    tangent_rows = jacobian_at(list(chart.relations), b.chart_coords) if chart.relations else []
    in_tangent = all(c == 0 for c in matvec(tangent_rows, deriv)) if tangent_rows else True
    image_basis = [chart.pushforward(v) for v in chart.tangent_space(b.chart_coords)]
    checks.append(check("tangent_to_chart", in_tangent, "derivative lies in T_bY"))
    checks.append(check("pushforward_in_image", in_span(image_basis, push), "d pi of the derivative lies in d_b pi(T_bY)"))
    degenerate = all(c == 0 for c in chart.center.normal_image(b.base, push))
    return Type2Spray(ctx, zeta, arc, wit.p, wit.q, deriv, push, degenerate, tuple(checks))


@dataclass(frozen=True)
class ImageReport:
    vectors: tuple[Vector, ...]
    rank: int
    pushforward_rank: int
    image_dim: int
    target_dim: int

    @property
    def spans(self) -> bool:
        return self.rank == self.target_dim


def image_direction_certificate(
    sprays: Sequence[Type2Spray], chart: BlowupChart, b: EPoint, fiber_vectors: Sequence[Sequence] = ()
) -> ImageReport:
    """Exact rank of type-2 derivatives together with type-1 fiber vectors, against n."""
    vecs = [tuple(v) for v in fiber_vectors] + [s.derivative for s in sprays]
    pushes = [s.pushforward for s in sprays]
    image_dim = rank([list(chart.pushforward(v)) for v in chart.tangent_space(b.chart_coords)])
    return ImageReport(
        tuple(vecs),
        rank([list(v) for v in vecs]) if vecs else 0,
        rank([list(v) for v in pushes]) if pushes else 0,
        image_dim,
        chart.n,
    )


def image_spanning_family(
    ctx: Type2Context, seed: int, retries: int = 5, fiber_vectors: Sequence[Sequence] = ()
) -> tuple[list[Type2Spray], list]:
    """Type-2 sprays until their pushforwards span d_b pi(T_bY); returns (sprays, attempts)."""
    chart, b = ctx.chart, ctx.base_epoint
    need = rank([list(chart.pushforward(v)) for v in chart.tangent_space(b.chart_coords)])
    sprays, attempts = [], []
    for k in range(need + retries):
        if len(sprays) == need:
            break
        label = ("type2", k)
        try:
            s = type2_spray(ctx, seed, stream=(k,), retries=retries)
        except (PrincipalityError, ValueError) as exc:
            attempts.append((list(label), f"construction: {exc}"))
            continue
        bad = [c.name for c in s.checks if c.mandatory and not c.passed]
        if bad:
            attempts.append((list(label), "checks failed: " + ",".join(bad)))
            continue
        if rank([list(x.pushforward) for x in sprays] + [list(s.pushforward)]) == len(sprays):
            attempts.append((list(label), "no new image direction"))
            continue
        sprays.append(s)
        attempts.append((list(label), "accepted"))
    if len(sprays) < need:
        raise RetryExhaustedError(f"found {len(sprays)} of {need} image directions", attempts)
    return sprays, attempts


# generator change ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChartTransition:
    """Change of chart between two generator lists of one ideal.

    The target list replaces the distinguished generator u_j by W.  On the
    overlap, lambda'_i = lambda_i / w with w = W/u_j written in source
    coordinates, and lambda_i = lambda'_i / w' with w' = u_j/W.
    """

    source: BlowupChart
    target: BlowupChart
    w_source: MPoly
    w_target: MPoly

    def _rescale(self, y: Sequence, w: MPoly) -> tuple:
        n = self.source.n
        d = w.evaluate(list(y))
        return tuple(y[:n]) + tuple(v / d for v in y[n:])

    def forward(self, y: Sequence) -> tuple:
        return self._rescale(y, self.w_source)

    def backward(self, y: Sequence) -> tuple:
        return self._rescale(y, self.w_target)


def _ratio_in_chart(chart: BlowupChart, f: MPoly) -> MPoly:
    """f / u_j on the chart, for f in the ideal of the chart's generators."""
    m = chart.nvars
    cof = Ideal(chart.center.local_gens, chart.n).lift(f)
    hom = chart.homogeneous_coords()
    return sum((c.embed(m) * h for c, h in zip(cof, hom)), MPoly.zero(m))


def chart_transition(chart: BlowupChart, W: MPoly) -> ChartTransition | None:
    """Transition to the chart whose distinguished generator is W, or None if W cannot replace u_j."""
    center, j = chart.center, chart.dist_index
    gens = list(center.local_gens)
    gens[j - 1] = W
    new = Center(center.ambient, tuple(gens), center.other_components, center.avoid, center.component0)
    if not new.ideal().equals(center.ideal()):
        return None
    try:
        target = build_chart(new, j)
    except UnreducedCenterError:
        return None
    w_src = _ratio_in_chart(chart, W)
    w_tgt = _ratio_in_chart(target, center.local_gens[j - 1])
    return ChartTransition(chart, target, w_src, w_tgt)


@dataclass(frozen=True, eq=False)
class TransportedSpray:
    """A type-2 spray built on a regenerated chart, read in the original chart."""

    inner: Type2Spray
    transition: ChartTransition
    derivative: Vector
    pushforward: Vector
    checks: tuple[Check, ...]

    kind = "type2"

    @property
    def chart(self) -> BlowupChart:
        return self.transition.source

    def __getattr__(self, name):
        if name in ("zeta", "arc", "p", "q", "fiberward_degenerate", "context", "phi"):
            return getattr(self.inner, name)
        raise AttributeError(name)

    def evaluate(self, t, y: Sequence) -> tuple:
        tr = self.transition
        return tr.backward(self.inner.evaluate(t, list(tr.forward(list(y)))))

    def derivative_at(self, y: Sequence) -> Vector:
        return tuple(infinitesimal(v) for v in self.evaluate(Dual(0, 1), list(y)))


def transport_spray(spray: Type2Spray, transition: ChartTransition, b: EPoint) -> TransportedSpray:
    chart = transition.source
    y = b.chart_coords
    tmp = TransportedSpray(spray, transition, (), (), ())
    deriv = tmp.derivative_at(y)
    push = chart.pushforward(deriv)
    roundtrip = tuple(transition.backward(transition.forward(y))) == tuple(y)
    rows = jacobian_at(list(chart.relations), y) if chart.relations else []
    tangent = all(c == 0 for c in matvec(rows, deriv)) if rows else True
    checks = tuple(spray.checks) + (
        check("chart_transition", roundtrip, "backward(forward(b)) = b"),
        check("transported_tangent", tangent, "transported derivative lies in T_bY"),
        check("transported_pushforward", push == spray.pushforward, "d pi agrees in both charts"),
    )
    return TransportedSpray(spray, transition, deriv, push, checks)


@dataclass(frozen=True, eq=False)
class Type2Family:
    context: Type2Context
    sprays: tuple
    attempts: tuple
    transition: ChartTransition | None = None


def type2_family(
    chart: BlowupChart, b: EPoint, seed: int, retries: int = 5, max_degree: int = 8
) -> Type2Family:
    """Type-2 sprays spanning the image directions at b, in b's chart.

    When no retract hypersurface is cut out by u_j, u_j is replaced by a
    retract hypersurface W generating the same ideal; the sprays are built on
    that chart and transported back.
    """
    center, j = chart.center, chart.dist_index
    n = center.ambient

    def replaceable(W: MPoly) -> bool:
        tr = chart_transition(chart, W)
        return tr is not None and tr.w_source.evaluate(list(b.chart_coords)) != 0

    retract = hypersurface_retract(
        center, b.base, seed, prefer=j, max_degree=max_degree, retries=retries, accept=replaceable
    )
    transition = None
    if Ideal([retract.W_poly], n).equals(Ideal([center.local_gens[j - 1]], n)):
        ctx = prepare_type2(chart, b, seed, retries, max_degree)
    else:
        transition = chart_transition(chart, retract.W_poly)
        if transition is None or transition.w_source.evaluate(list(b.chart_coords)) == 0:
            raise UnsupportedCenterError("no retract hypersurface can serve as the distinguished generator")
        b2 = EPoint(b.base, b.direction, j, transition.forward(b.chart_coords))
        ctx = prepare_type2(transition.target, b2, seed, retries, max_degree)
    sprays, attempts = image_spanning_family(ctx, seed, retries)
    if transition is not None:
        sprays = [transport_spray(s, transition, b) for s in sprays]
    return Type2Family(ctx, tuple(sprays), tuple(attempts), transition)


__all__ = [
    "ChartTransition",
    "TransportedSpray",
    "Type2Family",
    "chart_transition",
    "transport_spray",
    "type2_family",
    "EmbeddingData",
    "Extension",
    "ImageReport",
    "RetractData",
    "Type2Context",
    "Type2Spray",
    "compose_rational",
    "extend_to_ambient",
    "fiber_dimension_check",
    "hypersurface_retract",
    "image_direction_certificate",
    "image_spanning_family",
    "jelonek_embed",
    "prepare_type2",
    "sample_hypersurface_points",
    "transversal_at",
    "type2_spray",
    "w_condition",
]
