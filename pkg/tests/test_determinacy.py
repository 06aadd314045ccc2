from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relindet.determinacy import (
    DeterminationEvent,
    Determinations,
    KnowledgeMark,
    check_local_reality,
    determinacy_frontier,
    determined_by,
    knowledge_violations,
    locally_verifiable,
    minimal_determining_sets,
    present_reality_falsifier,
    truth_at,
)
from relindet.errors import DeclarationError, ScenarioError
from relindet.logic import TruthValue, parse_proposition
from relindet.spacetime import Frame, SpacetimePoint, Worldline, in_future_cone, simultaneous

T, F, I = TruthValue.TRUE, TruthValue.FALSE, TruthValue.INDETERMINATE
HALF = Fraction(1, 2)
P = SpacetimePoint


@pytest.fixture
def fig1():
    return Determinations((DeterminationEvent("a", 0, P(0, 0)),))


@pytest.fixture
def fig2():
    return Determinations((DeterminationEvent("a", 0, P(0, 0)), DeterminationEvent("b", 0, P(0, 1))))


def test_truth_propagates_in_closed_cone(fig1):
    a0 = parse_proposition("a=0")
    assert truth_at(fig1, a0, P(-HALF, 0)) is I
    assert truth_at(fig1, a0, P(0, 1)) is I
    assert truth_at(fig1, a0, P(1, 1)) is T  # on the light ray
    assert truth_at(fig1, a0, P(1, 0)) is T
    assert truth_at(fig1, parse_proposition("a=1"), P(1, 0)) is F


def test_excluded_middle_indeterminate_outside_cone(fig1):
    assert truth_at(fig1, parse_proposition("a=0 or a=1"), P(0, 1)) is I
    assert truth_at(fig1, parse_proposition("a=0 or a=1"), P(2, 1)) is T


def test_undeclared_variable_rejected(fig1):
    with pytest.raises(DeclarationError):
        truth_at(fig1, parse_proposition("z=0"), P(0, 0))


def test_declared_but_unrealized_variable_is_indeterminate():
    d = Determinations((), frozenset({"a"}))
    assert truth_at(d, parse_proposition("a=0"), P(100, 0)) is I
    assert determinacy_frontier(d, parse_proposition("a=0"), Worldline(P(0, 0))) is None


def test_duplicate_determination_rejected():
    with pytest.raises(ScenarioError):
        Determinations((DeterminationEvent("a", 0, P(0, 0)), DeterminationEvent("a", 1, P(1, 0))))


def test_parity_needs_both_cones(fig2):
    p = parse_proposition("a^b=0")
    assert truth_at(fig2, p, P(Fraction(2, 5), HALF)) is I
    assert truth_at(fig2, p, P(HALF, HALF)) is T
    assert truth_at(fig2, p, P(1, 0)) is T
    assert truth_at(fig2, p, P(Fraction(9, 10), 0)) is I


def test_frontier_midway_is_half_minute(fig2):
    midway = Worldline(P(0, HALF), 0)
    t = determinacy_frontier(fig2, parse_proposition("a^b=0"), midway)
    assert t == HALF and isinstance(t, Fraction)
    assert truth_at(fig2, parse_proposition("a^b=0"), midway.at(t - Fraction(1, 10**6))) is I


def test_frontier_short_circuit():
    d = Determinations((DeterminationEvent("a", 1, P(0, 0)), DeterminationEvent("b", 0, P(0, 5))))
    alice = Worldline(P(0, 0), 0)
    # a=1 settles "a=1 or b=1" as soon as Alice sees a
    assert determinacy_frontier(d, parse_proposition("a=1 or b=1"), alice) == 0
    assert determinacy_frontier(d, parse_proposition("a=0 or b=1"), alice) == 5


def test_minimal_determining_sets():
    d = Determinations((DeterminationEvent("a", 0, P(0, 0)), DeterminationEvent("b", 0, P(0, 1))))
    names = lambda sets: sorted(tuple(e.variable for e in s) for s in sets)  # noqa: E731
    assert names(minimal_determining_sets(d, parse_proposition("a^b=0"))) == [("a", "b")]
    assert names(minimal_determining_sets(d, parse_proposition("a=0 or b=0"))) == [("a",), ("b",)]
    assert names(minimal_determining_sets(d, parse_proposition("a=1 and b=1"))) == [("a",), ("b",)]
    assert names(minimal_determining_sets(d, parse_proposition("a=0 and b=0"))) == [("a", "b")]
    assert determined_by(d, parse_proposition("a=0 and b=1"), {"b"}) is F


def test_locally_verifiable(fig2):
    p = parse_proposition("a=0 or b=0")
    assert truth_at(fig2, p, P(HALF, 0)) is T
    assert not locally_verifiable(fig2, p, P(HALF, 0))
    assert locally_verifiable(fig2, p, P(2, HALF))


def test_falsifier_rest_frame(fig1):
    observers = [("Alice", Worldline(P(0, 0))), ("Bob", Worldline(P(0, 1)))]
    ce = present_reality_falsifier(fig1, observers)
    assert ce is not None and ce.observer == "Bob"
    assert ce.determinate_at == P(0, 0) and ce.indeterminate_at == P(0, 1)
    assert ce.value_at_determinate is T


def test_falsifier_moving_frame(fig1):
    moving = Frame(HALF, "moving")
    observers = [("Alice", Worldline(P(0, 0))), ("Bob", Worldline(P(0, 1)))]
    ce = present_reality_falsifier(fig1, observers, moving)
    assert ce is not None
    assert simultaneous(moving, ce.determinate_at, ce.indeterminate_at)
    assert ce.indeterminate_at == P(HALF, 1)
    assert truth_at(fig1, ce.proposition, ce.indeterminate_at) is I


def test_falsifier_absent_without_remote_observer(fig1):
    assert present_reality_falsifier(fig1, [("Alice", Worldline(P(0, 0)))]) is None
    assert present_reality_falsifier(Determinations(), [("Bob", Worldline(P(0, 1)))]) is None


def test_knowledge_violations(fig1):
    ok = KnowledgeMark("Bob", "a", P(1, 1))
    bad = KnowledgeMark("Bob", "a", P(0, 1))
    assert knowledge_violations(fig1, [ok]) == []
    [msg] = knowledge_violations(fig1, [ok, bad])
    assert "Bob" in msg and "indeterminate" in msg


def test_local_reality_on_fig1(fig1):
    rep = check_local_reality(fig1, P(0, 1), [parse_proposition("a=0")],
                              [Frame(0), Frame(HALF, "moving"), Frame(-0.9, "fast")])
    assert rep.ok


# -- frontier against a brute-force scan --------------------------------------

def scan_frontier(events, w: Worldline, t_lo: float, t_hi: float, n: int = 20001):
    """First grid time at which every event's cone contains the worldline."""
    ts = np.linspace(t_lo, t_hi, n)
    xs = float(w.anchor.x) + float(w.velocity) * (ts - float(w.anchor.t))
    inside = np.ones_like(ts, dtype=bool)
    for e in events:
        inside &= (ts - float(e.location.t)) - np.abs(xs - float(e.location.x)) >= 0
    hits = np.flatnonzero(inside)
    return (ts[hits[0]], ts[1] - ts[0]) if hits.size else (None, ts[1] - ts[0])


coord = st.integers(-16, 16).map(lambda k: Fraction(k, 4))
speed = st.integers(-9, 9).map(lambda k: Fraction(k, 10))


@settings(max_examples=1000, deadline=None)
@given(ev=st.lists(st.tuples(coord, coord), min_size=1, max_size=3), x0=coord, u=speed)
def test_frontier_matches_scan(ev, x0, u):
    names = "abc"[: len(ev)]
    events = tuple(DeterminationEvent(n, 0, P(t, x)) for n, (t, x) in zip(names, ev))
    d = Determinations(events)
    prop = parse_proposition("^".join(names) + "=0")  # needs every event
    w = Worldline(P(0, x0), u)
    t = determinacy_frontier(d, prop, w)
    # closing speed is at least 1/10, so entry comes by t = 4 + 8 / (1/10) = 84
    t_scan, step = scan_frontier(events, w, -10.0, 130.0, n=140001)
    assert t_scan is not None
    assert float(t) <= t_scan <= float(t) + step + 1e-12
    assert truth_at(d, prop, w.at(t)).determinate


# -- monotonicity -------------------------------------------------------------

grid = st.integers(-24, 24).map(lambda k: Fraction(k, 8))
props = st.sampled_from(["a=0", "a^b=0", "a=0 or b=1", "a=1 and c=0", "a^b^c=1", "not (b=0 iff c=1)"])


@settings(max_examples=1000, deadline=None)
@given(locs=st.lists(st.tuples(grid, grid), min_size=3, max_size=3),
       vals=st.lists(st.integers(0, 1), min_size=3, max_size=3),
       q=st.tuples(grid, grid), dq=st.tuples(grid, grid), text=props)
def test_determinacy_monotone_along_future(locs, vals, q, dq, text):
    d = Determinations(tuple(DeterminationEvent(n, v, P(*l)) for n, v, l in zip("abc", vals, locs)))
    prop = parse_proposition(text)
    p1 = P(*q)
    p2 = P(q[0] + abs(dq[0]) + abs(dq[1]), q[1] + dq[1])  # inside the future cone of p1
    assert in_future_cone(p1, p2)
    before, after = truth_at(d, prop, p1), truth_at(d, prop, p2)
    if before.determinate:
        assert after is before


finite = st.floats(min_value=-20, max_value=20, allow_nan=False)


@settings(max_examples=1000, deadline=None)
@given(t=finite, x=finite, v=st.floats(min_value=-0.99, max_value=0.99), e=st.tuples(finite, finite))
def test_truth_frame_invariant(t, x, v, e):
    d = Determinations((DeterminationEvent("a", 1, P(*e)),))
    q = P(t, x)
    margin = (t - e[0]) - abs(x - e[1])
    if abs(margin) < 1e-6:
        return  # inside the tolerance band, both answers are legitimate
    rep = check_local_reality(d, q, [parse_proposition("a=1")], [Frame(v, "f")])
    assert rep.ok
