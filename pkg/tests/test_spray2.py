from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sprayforge.blowup import Center, build_chart, epoint_to_chart
from sprayforge.checks import FAIL, PASS
from sprayforge.errors import GluingError
from sprayforge.polycore import Ideal, MPoly, parse_poly, parse_polys
from sprayforge.spray2 import (
    chart_transition,
    compose_rational,
    extend_to_ambient,
    fiber_dimension_check,
    hypersurface_retract,
    image_direction_certificate,
    image_spanning_family,
    jelonek_embed,
    prepare_type2,
    sample_hypersurface_points,
    type2_family,
    type2_spray,
)

F = Fraction
T_EXAMPLE = parse_poly("x2^2 + x1*x2 - 1", 2)


def make_center(gens, n, **kw):
    return Center(n, tuple(parse_polys(gens, n)), **kw)


LINE = make_center(["x1", "x2"], 3)


def line_context(seed=0):
    chart = build_chart(LINE, 2)
    b = epoint_to_chart(chart, (0, 0, 0), (1, 1, 0))
    return chart, b, prepare_type2(chart, b, seed)


# embedding ------------------------------------------------------------------------------


def test_embedding_worked_values():
    emb = jelonek_embed(T_EXAMPLE, (0, 1), None, seed=0)
    assert emb.gamma((0, 1)) == (0, 1)
    assert emb.gamma((F(3, 2), F(1, 2))) == (3, F(1, 2))
    assert all(c.passed for c in emb.checks)


def test_embedding_roundtrip_and_image_membership():
    emb = jelonek_embed(T_EXAMPLE, (0, 1), None, seed=0)
    pts = sample_hypersurface_points(T_EXAMPLE, seed=0, count=25)
    assert len(pts) == 25 and all(T_EXAMPLE.evaluate(p) == 0 for p in pts)
    pts = [p for p in pts if emb.in_domain(p)]
    assert all(emb.roundtrip(pts))
    assert all(emb.image_ideal.vanishes_at(emb.gamma(p)) for p in pts)


def test_embedding_image_misses_last_hyperplane():
    emb = jelonek_embed(T_EXAMPLE, (0, 1), None, seed=0)
    z = MPoly.gens(2)
    assert (emb.image_ideal + Ideal([z[1]], 2)).is_unit()


@given(st.integers(-4, 4), st.integers(1, 4))
def test_gamma_inverse_rational_matches_pointwise(num, den):
    emb = jelonek_embed(T_EXAMPLE, (0, 1), None, seed=0)
    x2 = F(num, den)
    if x2 == 0:
        return
    p = ((1 - x2 * x2) / x2, x2)
    if not emb.in_domain(p):
        return
    z = emb.gamma(p)
    nums, D = emb.gamma_inv_rational()
    d = D.evaluate(z)
    assert tuple(n.evaluate(z) / d for n in nums) == p


def test_compose_rational():
    x, y = MPoly.gens(2)
    N, D = compose_rational(x * x + y, [x, MPoly.const(1, 2)], y)
    assert D == y * y
    assert N == x * x + y


# retracts --------------------------------------------------------------------------------


def test_linear_retract_for_line():
    r = hypersurface_retract(LINE, (0, 0, 0), seed=0, prefer=2)
    assert r.method == "linear"
    assert r.W_poly == MPoly.var(1, 3)
    assert all(c.passed for c in r.checks)


def test_graph_retract_for_parabola():
    c = make_center(["x2 - x1^2", "x3"], 3)
    r = hypersurface_retract(c, (0, 0, 0), seed=0, prefer=1)
    assert r.method == "graph"
    assert [p.to_str() for p in r.rho] == ["x1", "x1^2", "0"]
    assert Ideal([r.W_poly], 3).equals(Ideal([c.local_gens[0]], 3))
    assert all(ch.passed for ch in r.checks)


# extension --------------------------------------------------------------------------------


def test_extension_by_gluing():
    x, y = MPoly.gens(2)
    pieces = [(Ideal([x], 2), [y]), (Ideal([y], 2), [x])]
    ext = extend_to_ambient(pieces, at=(0, 0))
    (phi,) = ext.phi
    assert Ideal([x], 2).contains(phi - y) and Ideal([y], 2).contains(phi - x)
    assert all(c.passed for c in ext.checks)


def test_extension_rejects_disagreeing_pieces():
    x, y = MPoly.gens(2)
    with pytest.raises(GluingError):
        extend_to_ambient([(Ideal([x], 2), [MPoly.const(1, 2)]), (Ideal([y], 2), [MPoly.zero(2)])])


def test_fiber_dimension_check():
    x, y, z = MPoly.gens(3)
    X = Ideal([z], 3)
    assert fiber_dimension_check([x, y], X, [(0, 0), (1, 2)]).status == PASS
    # the fiber of (xy, xy) over 0 is a surface, above the bound m - n = 1
    assert fiber_dimension_check([x * y, x * y], X, [(0, 0)]).status == FAIL


# type-2 sprays ---------------------------------------------------------------------------


def test_type2_context_checks_pass():
    _, _, ctx = line_context()
    failed = [c.name for c in ctx.checks if c.mandatory and not c.passed]
    assert failed == []


def test_type2_identities_and_derivatives():
    chart, b, ctx = line_context()
    s = type2_spray(ctx, seed=0)
    assert all(c.passed for c in s.checks if c.mandatory)
    names = {c.name for c in s.checks}
    assert {"principality", "projection", "section_x", "section_lambda"} <= names
    assert tuple(s.evaluate(0, b.chart_coords)) == b.chart_coords
    assert s.derivative == s.derivative_at(b.chart_coords)


def test_type2_rejects_zero_direction():
    _, _, ctx = line_context()
    with pytest.raises(ValueError):
        type2_spray(ctx, seed=0, zeta=(0, 0, 0, 0))


def test_image_family_spans_with_fiber_vector():
    chart, b, ctx = line_context()
    sprays, attempts = image_spanning_family(ctx, seed=0)
    fiber = (0, 0, 0, 1)
    report = image_direction_certificate(sprays, chart, b, [fiber])
    assert report.spans and report.rank == 3
    assert report.pushforward_rank == report.image_dim == 2


def test_type2_is_seed_reproducible():
    _, _, ctx1 = line_context(5)
    _, _, ctx2 = line_context(5)
    s1, _ = image_spanning_family(ctx1, seed=5)
    s2, _ = image_spanning_family(ctx2, seed=5)
    assert [s.derivative for s in s1] == [s.derivative for s in s2]


# generator change for nonlinear centers ------------------------------------------------------


def test_chart_transition_roundtrip():
    c = make_center(["x1", "x2 + x1^2"], 2)
    chart = build_chart(c, 2)
    tr = chart_transition(chart, MPoly.var(1, 2))
    assert tr is not None
    y = epoint_to_chart(chart, (0, 0), (1, 1)).chart_coords
    assert tr.backward(tr.forward(y)) == y
    assert tr.target.contains(tr.forward(y))
    assert chart_transition(chart, MPoly.var(0, 2)) is None


def test_type2_family_on_nonlinear_center():
    c = make_center(["x1", "x2 + x1^2"], 2)
    chart = build_chart(c, 2)
    b = epoint_to_chart(chart, (0, 0), (1, 1))
    fam = type2_family(chart, b, seed=0)
    assert fam.transition is not None
    for s in fam.sprays:
        assert all(ch.passed for ch in s.checks if ch.mandatory)
        assert tuple(s.evaluate(0, b.chart_coords)) == b.chart_coords
    report = image_direction_certificate(fam.sprays, chart, b)
    assert report.pushforward_rank == report.image_dim
