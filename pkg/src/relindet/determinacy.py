"""Truth values that propagate causally from determination events.

An atom ``v = k`` is determinate at a point ``q`` exactly when ``q`` lies in
the closed future light cone of the event at which ``v`` acquired its value.
Compound propositions are evaluated with strong Kleene connectives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DeclarationError, ScenarioError
from .logic import Atom, Proposition, TruthValue, evaluate, variables
from .spacetime import (
    EPS_GEOM,
    REST,
    Frame,
    Real,
    SpacetimePoint,
    Worldline,
    boost,
    in_future_cone,
    simultaneity_intersection,
)


@dataclass(frozen=True)
class DeterminationEvent:
    variable: str
    value: int
    location: SpacetimePoint

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"determined value must be a bit, got {self.value!r}")


@dataclass(frozen=True)
class KnowledgeMark:
    """``observer`` knows the value of ``variable`` from ``known_from`` on."""

    observer: str
    variable: str
    known_from: SpacetimePoint


@dataclass(frozen=True)
class Determinations:
    """The realized determination events of a scenario.

    ``variables`` is the declared variable set; a declared variable with no
    event stays indeterminate everywhere.
    """

    events: tuple[DeterminationEvent, ...] = ()
    variables: frozenset[str] = frozenset()
    c: Real = 1
    eps: float = EPS_GEOM
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for e in self.events:
            if e.variable in index:
                raise ScenarioError(f"variable {e.variable!r} is determined more than once")
            index[e.variable] = e
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "variables", frozenset(self.variables) | frozenset(index))
        object.__setattr__(self, "_index", index)

    def event(self, variable: str) -> DeterminationEvent | None:
        if variable not in self.variables:
            raise DeclarationError(f"undeclared variable {variable!r}")
        return self._index.get(variable)

    def reaches(self, e: DeterminationEvent, q: SpacetimePoint) -> bool:
        return in_future_cone(e.location, q, self.c, self.eps)

    def past_of(self, q: SpacetimePoint) -> list[DeterminationEvent]:
        """Events whose closed future cone contains ``q``."""
        return [e for e in self.events if self.reaches(e, q)]

    def boosted(self, v: Real, frame_id: str | None = None) -> Determinations:
        moved = tuple(
            DeterminationEvent(e.variable, e.value, boost(e.location, v, self.c, frame_id))
            for e in self.events
        )
        return Determinations(moved, self.variables, self.c, self.eps)

    def without(self, variable: str) -> Determinations:
        kept = tuple(e for e in self.events if e.variable != variable)
        return Determinations(kept, self.variables, self.c, self.eps)

    def only(self, keep: Iterable[str]) -> Determinations:
        keep = set(keep)
        kept = tuple(e for e in self.events if e.variable in keep)
        return Determinations(kept, self.variables, self.c, self.eps)


def atom_truth_at(d: Determinations, atom: Atom, q: SpacetimePoint) -> TruthValue:
    e = d.event(atom.variable)
    if e is None or not d.reaches(e, q):
        return TruthValue.INDETERMINATE
    return TruthValue.of(e.value == atom.value)


def truth_at(d: Determinations, p: Proposition, q: SpacetimePoint) -> TruthValue:
    return evaluate(p, lambda atom: atom_truth_at(d, atom, q))


def relevant_events(d: Determinations, p: Proposition) -> list[DeterminationEvent]:
    found = (d.event(v) for v in sorted(variables(p)))
    return [e for e in found if e is not None]


def determined_by(d: Determinations, p: Proposition, known: Iterable[str]) -> TruthValue:
    """Value of ``p`` when only the outcomes of ``known`` are settled."""
    known = set(known)

    def valuation(atom: Atom) -> TruthValue:
        e = d.event(atom.variable)
        if e is None or atom.variable not in known:
            return TruthValue.INDETERMINATE
        return TruthValue.of(e.value == atom.value)

    return evaluate(p, valuation)


def minimal_determining_sets(d: Determinations, p: Proposition,
                             limit: int = 12) -> list[tuple[DeterminationEvent, ...]]:
    """Inclusion-minimal sets of realized events that settle ``p``.

    ``p`` is determinate at ``q`` exactly when one of these sets lies wholly in
    the causal past of ``q``, so the determinate region is the union of the
    corresponding cone intersections.
    """
    events = relevant_events(d, p)
    if len(events) > limit:
        raise ValueError(f"{len(events)} relevant events exceed the enumeration limit {limit}")
    found: list[tuple[DeterminationEvent, ...]] = []
    for k in range(len(events) + 1):
        for combo in itertools.combinations(events, k):
            names = {e.variable for e in combo}
            if any({e.variable for e in f} <= names for f in found):
                continue
            if determined_by(d, p, names).determinate:
                found.append(combo)
    return found


def locally_verifiable(d: Determinations, p: Proposition, q: SpacetimePoint) -> bool:
    """Whether every outcome ``p`` mentions has reached ``q``."""
    evs = [d.event(v) for v in variables(p)]
    return all(e is not None and d.reaches(e, q) for e in evs)


def determinacy_frontier(d: Determinations, p: Proposition, w: Worldline) -> Real | None:
    """Earliest coordinate time at which ``p`` is determinate along ``w``.

    Truth along a timelike worldline only changes when the worldline enters
    another event's cone, so it suffices to test the entry times in order.
    """
    entries = sorted(w.cone_entry_time(e.location, d.c) for e in relevant_events(d, p))
    for t in entries:
        if truth_at(d, p, w.at(t)).determinate:
            return t
    return None


@dataclass(frozen=True)
class Discrepancy:
    proposition: str
    frame: str
    rest_value: TruthValue
    frame_value: TruthValue


@dataclass(frozen=True)
class LocalRealityReport:
    point: SpacetimePoint
    checked: tuple[str, ...]
    discrepancies: tuple[Discrepancy, ...]

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def check_local_reality(d: Determinations, q: SpacetimePoint, propositions: Sequence[Proposition],
                        frames: Sequence[Frame] = ()) -> LocalRealityReport:
    """Re-evaluate every proposition in each frame's coordinates of the same
    point and list any value that differs from the rest-frame value."""
    found = []
    for f in frames:
        if f.velocity == 0:
            continue
        moved = d.boosted(f.velocity, f.label)
        q_f = boost(q, f.velocity, d.c, f.label)
        for p in propositions:
            here, there = truth_at(d, p, q), truth_at(moved, p, q_f)
            if here != there:
                found.append(Discrepancy(str(p), f.label, here, there))
    return LocalRealityReport(q, tuple(str(p) for p in propositions), tuple(found))


@dataclass(frozen=True)
class Counterexample:
    """Two simultaneous points disagreeing on whether a proposition is determinate."""

    determinate_at: SpacetimePoint
    indeterminate_at: SpacetimePoint
    proposition: Atom
    value_at_determinate: TruthValue
    frame: str
    observer: str


def present_reality_falsifier(d: Determinations, observers: Sequence[tuple[str, Worldline]],
                              frame: Frame = Frame(0, REST)) -> Counterexample | None:
    """Find a determination event ``P`` and a point ``Q`` on some observer's
    worldline, ``frame``-simultaneous with ``P``, at which the event's own
    atom is still indeterminate. Returns ``None`` when no observer offers one.
    """
    for e in d.events:
        atom = Atom(e.variable, e.value)
        at_p = atom_truth_at(d, atom, e.location)
        for label, w in observers:
            q = simultaneity_intersection(frame, e.location, w, d.c)
            if atom_truth_at(d, atom, q) is TruthValue.INDETERMINATE:
                return Counterexample(e.location, q, atom, at_p, frame.label, label)
    return None


def knowledge_violations(d: Determinations, marks: Iterable[KnowledgeMark]) -> list[str]:
    """Marks claiming knowledge of a value that is not yet determinate there."""
    bad = []
    for m in marks:
        truth = atom_truth_at(d, Atom(m.variable, 0), m.known_from)
        if not truth.determinate:
            bad.append(
                f"{m.observer} cannot know {m.variable} at "
                f"(t={m.known_from.t}, x={m.known_from.x}): value still indeterminate there"
            )
    return bad
