from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import small_fraction
from hypothesis import given
from hypothesis import strategies as st

from sprayforge.blowup import (
    Center,
    build_chart,
    default_chart_index,
    epoint_to_chart,
    is_reduced,
    lift_through_blowup,
    principality_witness,
    reduce_center,
)
from sprayforge.errors import (
    ChartIndexError,
    InvalidCenterError,
    LiftUndefinedError,
    TangentDirectionError,
    UnreducedCenterError,
    WrongChartError,
)
from sprayforge.polycore import Ideal, MPoly, parse_polys


def center(gens, n, **kw):
    return Center(n, tuple(parse_polys(gens, n)), **kw)


LINE = center(["x1", "x2"], 3)
POINT = center(["x1", "x2"], 2)


def test_line_chart_relations():
    chart = build_chart(LINE, 2)
    assert chart.names == ["x1", "x2", "x3", "l1"]
    assert chart.relation_strings() == ["-x2*l1 + x1"]
    assert chart.exc_fn == parse_polys(["x2"], 4)[0]
    chart1 = build_chart(LINE, 1)
    assert chart1.relation_strings() == ["-x1*l1 + x2"]


def test_chart_index_range():
    with pytest.raises(ChartIndexError):
        build_chart(LINE, 3)


def test_unreduced_center_rejected_and_reduced():
    gens = parse_polys(["x1^2", "x1*x2"], 2)
    assert not is_reduced(gens)
    with pytest.raises(UnreducedCenterError):
        build_chart(Center(2, tuple(gens)), 1)
    assert reduce_center(gens) == parse_polys(["x1", "x2"], 2)


def test_reduction_gives_identical_charts():
    red = Center(3, tuple(reduce_center(parse_polys(["x1^2", "x1*x2"], 3))))
    assert build_chart(red, 2).relation_strings() == build_chart(LINE, 2).relation_strings()


def test_cartier_center_is_trivial():
    c = center(["x1"], 2)
    assert c.is_trivial()
    chart = build_chart(c, 1)
    assert chart.trivial and chart.relations == ()


def test_basepoint_checks():
    LINE.check_basepoint((0, 0, 7))
    with pytest.raises(InvalidCenterError):
        LINE.check_basepoint((1, 0, 0))
    cusp = center(["x2^2 - x1^3", "x3"], 3)
    with pytest.raises(InvalidCenterError):
        cusp.check_basepoint((0, 0, 0))
    avoided = center(["x1", "x2"], 3, avoid=Ideal(parse_polys(["x1", "x2", "x3"], 3), 3))
    with pytest.raises(InvalidCenterError):
        avoided.check_basepoint((0, 0, 0))


def test_epoint_coordinates_and_chart_choice():
    chart = build_chart(LINE, 2)
    b = epoint_to_chart(chart, (0, 0, 0), (1, 1, 0))
    assert b.chart_coords == (0, 0, 0, 1)
    assert chart.contains(b.chart_coords)
    with pytest.raises(TangentDirectionError):
        epoint_to_chart(chart, (0, 0, 0), (0, 0, 1))
    with pytest.raises(WrongChartError) as info:
        epoint_to_chart(chart, (0, 0, 0), (1, 0, 0))
    assert info.value.suggested == 1
    assert default_chart_index(LINE, (0, 0, 0), (1, 0, 5)) == 1
    assert default_chart_index(LINE, (2, 3, 0)) == 2


@given(st.tuples(small_fraction, small_fraction, small_fraction), st.tuples(small_fraction, small_fraction, small_fraction))
def test_epoint_lies_on_chart_over_base(base, v):
    a = (Fraction(0), Fraction(0), base[2])
    if v[1] == 0:
        return
    chart = build_chart(LINE, 2)
    b = epoint_to_chart(chart, a, v)
    assert chart.contains(b.chart_coords)
    assert chart.exc_fn.evaluate(b.chart_coords) == 0
    assert tuple(p.evaluate(b.chart_coords) for p in chart.projection()) == a


@given(st.tuples(small_fraction, small_fraction, small_fraction))
def test_point_over_off_center(x):
    if x[1] == 0:
        return
    chart = build_chart(LINE, 2)
    y = chart.point_over(x)
    assert chart.contains(y)
    assert tuple(p.evaluate(y) for p in chart.projection()) == tuple(x)


def test_tangent_space_dimension():
    chart = build_chart(LINE, 2)
    for y in [(0, 0, 0, 1), (2, 1, 5, 2)]:
        assert len(chart.tangent_space(y)) == 3


def test_lift_through_blowup_with_witness():
    f = parse_polys(["x1", "x1*x2"], 2)
    lift = lift_through_blowup(f, POINT, [(0, 5), (1, 1)])
    w, gen = lift.certified
    assert w.method == "witness" and w.chart_coords == (0, 0, Fraction(1, 5))
    assert gen.method == "denominator"


def test_lift_undefined_without_witness():
    f = parse_polys(["x1", "x2"], 2)
    lift = lift_through_blowup(f, POINT)
    with pytest.raises(LiftUndefinedError):
        lift.lift_at((0, 0))


def test_principality_witness_factorization():
    f = parse_polys(["x1*x2", "x1"], 2)
    w = principality_witness(f, POINT, (0, 3))
    assert w is not None
    pulled = [g.subs(f, 2) for g in POINT.local_gens]
    assert all(w.p * q == g for q, g in zip(w.q, pulled))
    assert any(v != 0 for v in w.q_at_point)


def test_center_generator_validation():
    with pytest.raises(InvalidCenterError):
        Center(3, ())
    with pytest.raises(InvalidCenterError):
        Center(3, (MPoly.var(0, 2),))
