from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relindet.errors import SuperluminalError
from relindet.spacetime import (
    CausalKind,
    CausalOrder,
    Frame,
    SpacetimePoint,
    Worldline,
    boost,
    causal_relation,
    compose_velocities,
    gamma,
    in_future_cone,
    interval,
    simultaneity_coordinate,
    simultaneity_intersection,
    simultaneous,
)

CASES = settings(max_examples=1000, deadline=None)

coords = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
velocities = st.floats(min_value=-0.95, max_value=0.95, allow_nan=False)
lights = st.sampled_from([1.0, 2.0, 0.5, 3.0])
# exact points on a 1/8 grid, so cone tests carry no rounding
grid = st.integers(min_value=-40, max_value=40).map(lambda k: Fraction(k, 8))


def rapidity_matrix(v: float, c: float) -> np.ndarray:
    """Boost acting on (ct, x), built from the rapidity instead of gamma."""
    phi = math.atanh(v / c)
    return np.array([[math.cosh(phi), -math.sinh(phi)], [-math.sinh(phi), math.cosh(phi)]])


def test_gamma_known_values():
    assert gamma(0) == 1.0
    assert gamma(0.6) == pytest.approx(1.25, rel=1e-15)
    assert gamma(Fraction(4, 5)) == pytest.approx(5 / 3, rel=1e-15)
    assert gamma(1, c=2) == pytest.approx(2 / math.sqrt(3), rel=1e-15)


@pytest.mark.parametrize("v", [1, -1, 1.5, -2])
def test_superluminal_boost_rejected(v):
    with pytest.raises(SuperluminalError):
        boost(SpacetimePoint(0, 0), v)


def test_boost_known_point():
    p = boost(SpacetimePoint(1, 0), 0.6, frame_id="moving")
    assert p.t == pytest.approx(1.25)
    assert p.x == pytest.approx(-0.75)
    assert p.frame_id == "moving"


def test_zero_boost_keeps_exact_coordinates():
    p = boost(SpacetimePoint(Fraction(1, 3), Fraction(2, 7)), 0)
    assert (p.t, p.x) == (Fraction(1, 3), Fraction(2, 7))


def test_mixed_frames_rejected():
    p = SpacetimePoint(0, 0)
    q = SpacetimePoint(1, 0, "moving")
    with pytest.raises(ValueError):
        interval(p, q)
    with pytest.raises(ValueError):
        in_future_cone(p, q)


def test_nonfinite_coordinate_rejected():
    with pytest.raises(ValueError):
        SpacetimePoint(float("nan"), 0)


def test_closed_cone_includes_light_ray():
    origin = SpacetimePoint(0, 0)
    assert in_future_cone(origin, SpacetimePoint(1, 1))
    assert in_future_cone(origin, SpacetimePoint(1, -1))
    assert in_future_cone(origin, origin)
    assert not in_future_cone(origin, SpacetimePoint(1, Fraction(101, 100)))
    assert not in_future_cone(origin, SpacetimePoint(-1, 0))


def test_causal_relation_kinds():
    o = SpacetimePoint(0, 0)
    rel = causal_relation(o, SpacetimePoint(2, 1))
    assert (rel.kind, rel.order) == (CausalKind.TIMELIKE, CausalOrder.FIRST_PRECEDES_SECOND)
    rel = causal_relation(o, SpacetimePoint(-1, 1))
    assert (rel.kind, rel.order) == (CausalKind.LIGHTLIKE, CausalOrder.SECOND_PRECEDES_FIRST)
    rel = causal_relation(o, SpacetimePoint(0, 1))
    assert (rel.kind, rel.order) == (CausalKind.SPACELIKE, CausalOrder.NONE)


def test_cone_respects_c():
    src = SpacetimePoint(0, 0)
    assert in_future_cone(src, SpacetimePoint(1, 2), c=2)
    assert not in_future_cone(src, SpacetimePoint(1, 2), c=1)


def test_moving_frame_simultaneity_through_bob():
    # the v = 1/2 plane through (t, x) = (0, 1) meets x = 0 at t = -1/2
    alice = Worldline(SpacetimePoint(0, 0), 0)
    hit = simultaneity_intersection(Frame(Fraction(1, 2), "moving"), SpacetimePoint(0, 1), alice)
    assert hit.t == Fraction(-1, 2) and hit.x == 0
    assert isinstance(hit.t, Fraction)
    assert simultaneous(Frame(Fraction(1, 2)), hit, SpacetimePoint(0, 1))


def test_simultaneity_coordinate_matches_boost():
    f = Frame(0.3, "f")
    p = SpacetimePoint(0.7, -1.2)
    assert simultaneity_coordinate(f, p) == pytest.approx(f.coordinates(p).t, abs=1e-15)


def test_frame_round_trip():
    f = Frame(Fraction(3, 5), "f")
    p = f.to_rest(2, -1)
    back = f.coordinates(p)
    assert back.t == pytest.approx(2, abs=1e-12) and back.x == pytest.approx(-1, abs=1e-12)


def test_compose_velocities_exact():
    assert compose_velocities(Fraction(1, 2), Fraction(1, 2)) == Fraction(4, 5)
    assert compose_velocities(Fraction(1, 2), Fraction(-1, 2)) == 0


def test_cone_entry_time_rest_and_moving():
    mid = Worldline(SpacetimePoint(0, Fraction(1, 2)), 0)
    assert mid.cone_entry_time(SpacetimePoint(0, 0)) == Fraction(1, 2)
    assert mid.cone_entry_time(SpacetimePoint(0, 1)) == Fraction(1, 2)
    mover = Worldline(SpacetimePoint(0, 1), Fraction(1, 2))
    # x(t) = 1 + t/2 meets the ray x = t at t = 2
    assert mover.cone_entry_time(SpacetimePoint(0, 0)) == 2


@CASES
@given(t1=coords, x1=coords, t2=coords, x2=coords, v=velocities, c=lights)
def test_interval_invariant_under_boost(t1, x1, t2, x2, v, c):
    p, q = SpacetimePoint(t1, x1), SpacetimePoint(t2, x2)
    vv = v * c
    before = interval(p, q, c)
    after = interval(boost(p, vv, c, "b"), boost(q, vv, c, "b"), c)
    scale = c**2 * (t2 - t1) ** 2 + (x2 - x1) ** 2
    assert abs(after - before) <= 1e-9 * scale + 1e-12


@CASES
@given(t=coords, x=coords, v1=velocities, v2=velocities, c=lights)
def test_boost_composition_matches_matrix_product(t, x, v1, v2, c):
    p = SpacetimePoint(t, x)
    twice = boost(boost(p, v1 * c, c, "mid"), v2 * c, c, "end")
    once = boost(p, compose_velocities(v1 * c, v2 * c, c), c, "end")
    oracle = rapidity_matrix(v2 * c, c) @ rapidity_matrix(v1 * c, c) @ np.array([c * t, x])
    scale = max(1.0, abs(t) * c, abs(x)) * gamma(v1) * gamma(v2)
    for got in (twice, once):
        assert abs(got.t * c - oracle[0]) <= 1e-9 * scale
        assert abs(got.x - oracle[1]) <= 1e-9 * scale


@CASES
@given(t=coords, x=coords, v=velocities)
def test_inverse_boost_round_trip(t, x, v):
    p = SpacetimePoint(t, x)
    back = boost(boost(p, v, 1, "m"), -v, 1, "rest")
    scale = max(1.0, abs(t), abs(x)) * gamma(v) ** 2
    assert abs(back.t - t) <= 1e-12 * scale and abs(back.x - x) <= 1e-12 * scale


@CASES
@given(a=st.tuples(grid, grid), b=st.tuples(grid, grid), d=st.tuples(grid, grid))
def test_cone_transitivity(a, b, d):
    pa, pb, pd = (SpacetimePoint(*u) for u in (a, b, d))
    if in_future_cone(pa, pb) and in_future_cone(pb, pd):
        assert in_future_cone(pa, pd)


@CASES
@given(t=coords, x=coords, v=velocities)
def test_cone_membership_frame_invariant(t, x, v):
    src, q = SpacetimePoint(0.0, 0.0), SpacetimePoint(t, x)
    margin = t - abs(x)
    # stay clear of the boundary band, where either answer is legitimate
    if abs(margin) < 1e-6:
        return
    assert in_future_cone(src, q) == in_future_cone(boost(src, v, 1, "b"), boost(q, v, 1, "b"))


@CASES
@given(ts=grid, xs=grid, ta=grid, xa=grid, u=st.integers(-7, 7).map(lambda k: Fraction(k, 8)))
def test_cone_entry_time_against_scan(ts, xs, ta, xa, u):
    """The entry time is the first grid time at which the worldline is inside."""
    w = Worldline(SpacetimePoint(ta, xa), u)
    source = SpacetimePoint(ts, xs)
    t_entry = w.cone_entry_time(source)
    assert in_future_cone(source, w.at(t_entry), eps=0)
    step = Fraction(1, 64)
    assert not in_future_cone(source, w.at(t_entry - step), eps=0)
    # scan a coarse grid ahead: once inside, always inside
    for k in range(1, 20):
        assert in_future_cone(source, w.at(t_entry + k * step * 7), eps=0)
