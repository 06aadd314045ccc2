"""Scenario documents: parsing, validation and canonical printing.

A scenario is a UTF-8 JSON object with ``"schema": 1``. Points are written as
``[t, x]`` in the rest frame or as ``{"t": .., "x": .., "frame": label}`` in a
declared frame; they are normalized to rest-frame coordinates on load.
Numbers may be JSON numbers or exact rationals written as strings (``"3/4"``).
See ``docs/scenario-schema.md`` for the full field list.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any

from .boxes import Box, BoxSetup, pr_box, uniform_box, validate_box
from .determinacy import KnowledgeMark
from .errors import ScenarioError
from .logic import Proposition, PropositionSyntaxError, parse_proposition, variables
from .quantum import (
    MAX_QUBITS,
    NORM_TOL,
    MeasurementEvent,
    QuantumRegister,
    QuantumSetup,
    bloch_basis,
    resolve_basis,
    standard_states,
)
from .randomness import (
    CorrelationModel,
    TrngProcess,
    as_probability,
    coordinate_period,
    tick_events,
    validate_model,
)
from .spacetime import EPS_GEOM, REST, Frame, SpacetimePoint, Worldline

SCHEMA_VERSION = 1
BUILTINS = ("fig1", "fig2", "fig3", "prbox", "singlet", "correlated")
QUERY_KINDS = (
    "truth", "propensity", "state", "frontier", "falsify-present-reality",
    "no-signaling", "chsh", "local-reality",
)


@dataclass(frozen=True)
class Observer:
    label: str
    worldline: Worldline


@dataclass(frozen=True)
class TrngDecl:
    process: TrngProcess
    count: int
    values: tuple[int | None, ...] = ()

    def variables(self) -> list[str]:
        return [self.process.bit_name(k) for k in range(1, self.count + 1)]


@dataclass(frozen=True)
class EventDecl:
    """A variable determined at a declared point; ``value`` None means sampled."""

    variable: str
    location: SpacetimePoint
    value: int | None = None
    marginal: Any = Fraction(1, 2)


@dataclass(frozen=True)
class BoxDecl:
    name: str
    setup: BoxSetup
    table_name: str | None = None  # "pr" or "uniform" when declared by name


@dataclass(frozen=True)
class QuantumDecl:
    setup: QuantumSetup
    initial_name: str | None = None

    def __eq__(self, other):
        if not isinstance(other, QuantumDecl):
            return NotImplemented
        a, b = self.setup, other.setup
        return (
            self.initial_name == other.initial_name
            and a.initial.n_qubits == b.initial.n_qubits
            and bool(abs(a.initial.amplitudes - b.initial.amplitudes).max() <= NORM_TOL)
            and len(a.measurements) == len(b.measurements)
            and all(_measurement_eq(m1, m2) for m1, m2 in zip(a.measurements, b.measurements))
        )

    __hash__ = None


def _measurement_eq(m1: MeasurementEvent, m2: MeasurementEvent) -> bool:
    same_basis = (
        m1.basis == m2.basis if isinstance(m1.basis, str) or isinstance(m2.basis, str)
        else bool(abs(resolve_basis(m1.basis) - resolve_basis(m2.basis)).max() <= NORM_TOL)
    )
    return (m1.qubit, m1.outcome, m1.variable, m1.location) == \
        (m2.qubit, m2.outcome, m2.variable, m2.location) and same_basis


@dataclass(frozen=True)
class Query:
    kind: str
    params: dict
    label: str = ""


@dataclass(frozen=True)
class Scenario:
    c: Any = 1
    name: str = ""
    description: str = ""
    seed: int = 0
    tolerance: float = EPS_GEOM
    frames: tuple[Frame, ...] = ()
    observers: tuple[Observer, ...] = ()
    trngs: tuple[TrngDecl, ...] = ()
    events: tuple[EventDecl, ...] = ()
    correlations: tuple[CorrelationModel, ...] = ()
    boxes: tuple[BoxDecl, ...] = ()
    quantum: QuantumDecl | None = None
    knowledge: tuple[KnowledgeMark, ...] = ()
    queries: tuple[Query, ...] = ()
    diagram: dict = field(default_factory=dict)

    def frame(self, label: str) -> Frame:
        for f in self.frames:
            if f.label == label:
                return f
        if label == REST:
            return Frame(0, REST)
        raise KeyError(label)

    def observer(self, label: str) -> Observer:
        for o in self.observers:
            if o.label == label:
                return o
        raise KeyError(label)

    def box(self, name: str) -> BoxDecl:
        for b in self.boxes:
            if b.name == name:
                return b
        raise KeyError(name)

    def locations(self) -> dict[str, SpacetimePoint]:
        """Every variable's determination point, in declaration order."""
        out = {}
        for decl in self.trngs:
            last = decl.process.worldline.anchor.t + decl.count * coordinate_period(decl.process, self.c)
            ticks = tick_events(decl.process, last, self.c, self.tolerance) if decl.count else []
            for name, point in zip(decl.variables(), ticks):
                out[name] = point
        for e in self.events:
            out[e.variable] = e.location
        if self.quantum is not None:
            for m in self.quantum.setup.measurements:
                if m.variable:
                    out[m.variable] = m.location
        return out

    def variables(self) -> frozenset[str]:
        names = set(self.locations())
        for m in self.correlations:
            names.update(m.variables)
        return frozenset(names)


# -- parsing ----------------------------------------------------------------

class _Parser:
    def __init__(self):
        self.issues: list[str] = []
        self.frames: dict[str, Frame] = {REST: Frame(0, REST)}
        self.c = 1

    def fail(self, msg: str) -> None:
        self.issues.append(msg)

    def number(self, value, where: str, exact_ok: bool = True):
        if isinstance(value, bool):
            raise ScenarioError(f"{where}: expected a number, got a boolean")
        if isinstance(value, int):
            return value
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ScenarioError(f"{where}: number must be finite")
            return value
        if isinstance(value, str) and exact_ok:
            try:
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError):
                pass
        raise ScenarioError(f"{where}: expected a number or rational string, got {value!r}")

    def point(self, value, where: str) -> SpacetimePoint:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ScenarioError(f"{where}: a point is [t, x]")
            return SpacetimePoint(self.number(value[0], where), self.number(value[1], where))
        if isinstance(value, dict):
            t = self.number(value.get("t"), f"{where}.t")
            x = self.number(value.get("x"), f"{where}.x")
            label = value.get("frame", REST)
            if label not in self.frames:
                raise ScenarioError(f"{where}: unknown frame {label!r}")
            f = self.frames[label]
            if f.velocity == 0:
                return SpacetimePoint(t, x)
            return f.to_rest(t, x, self.c)
        raise ScenarioError(f"{where}: expected [t, x] or {{t, x, frame}}")

    def velocity(self, value, where: str):
        v = self.number(value, where)
        if not abs(v) < self.c:
            raise ScenarioError(f"{where}: |velocity| must be below c = {self.c}")
        return v

    def bit(self, value, where: str) -> int:
        if value not in (0, 1) or isinstance(value, bool):
            raise ScenarioError(f"{where}: expected a bit 0 or 1, got {value!r}")
        return int(value)

    def guarded(self, where: str, fn, *args):
        """Run ``fn``; record any failure as an issue located at ``where``."""
        try:
            return fn(*args)
        except ScenarioError as exc:
            self.issues.extend(exc.issues)
        except KeyError as exc:
            self.issues.append(f"{where}: missing required field {exc.args[0]!r}")
        except (ValueError, TypeError, IndexError, AttributeError) as exc:
            self.issues.append(f"{where}: {exc}")
        return None


def _json_position(exc: json.JSONDecodeError) -> str:
    return f"{exc.lineno}:{exc.colno}: syntax error: {exc.msg}"


def parse_scenario(document: str | bytes | dict) -> Scenario:
    """Parse and validate a scenario document; raises :class:`ScenarioError`
    listing every problem found."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    if isinstance(document, str):
        if not document.strip():
            doc = {}
        else:
            try:
                doc = json.loads(document)
            except json.JSONDecodeError as exc:
                raise ScenarioError(_json_position(exc)) from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ScenarioError("document root must be a JSON object")
    return _build(doc)


def _build(doc: dict) -> Scenario:
    P = _Parser()
    if "c" not in doc:
        raise ScenarioError("missing required field: c")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema version {schema!r}; expected {SCHEMA_VERSION}")
    known = {"schema", "c", "name", "description", "seed", "tolerance", "frames", "observers",
             "trngs", "events", "correlations", "boxes", "quantum", "knowledge", "queries", "diagram"}
    for key in doc:
        if key not in known:
            P.fail(f"unknown top-level field {key!r}")

    c = P.number(doc["c"], "c")
    if not c > 0:
        raise ScenarioError("c must be positive")
    P.c = c
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        P.fail("seed must be an unsigned 64-bit integer")
        seed = 0
    tolerance = doc.get("tolerance", EPS_GEOM)
    if not isinstance(tolerance, (int, float)) or isinstance(tolerance, bool) or not tolerance >= 0:
        P.fail("tolerance must be a non-negative number")
        tolerance = EPS_GEOM

    frames = []
    for i, f in enumerate(doc.get("frames", [])):
        where = f"frames[{i}]"
        fr = P.guarded(where, lambda: Frame(P.velocity(f.get("velocity", 0), f"{where}.velocity"),
                                            str(f["label"])))
        if fr is not None:
            if fr.label in P.frames and not (fr.label == REST and fr.velocity == 0):
                P.fail(f"{where}: duplicate frame label {fr.label!r}")
            P.frames[fr.label] = fr
            frames.append(fr)

    observers = []
    for i, o in enumerate(doc.get("observers", [])):
        where = f"observers[{i}]"

        def make():
            w = Worldline(P.point(o["anchor"], f"{where}.anchor"),
                          P.velocity(o.get("velocity", 0), f"{where}.velocity"))
            return Observer(str(o["label"]), w)
        ob = P.guarded(where, make)
        if ob is not None:
            if any(x.label == ob.label for x in observers):
                P.fail(f"{where}: duplicate observer {ob.label!r}")
            observers.append(ob)

    trngs = []
    for i, t in enumerate(doc.get("trngs", [])):
        where = f"trngs[{i}]"

        def make():
            bits = tuple(str(b) for b in t.get("bits", []))
            values = tuple(None if v is None else P.bit(v, f"{where}.values") for v in t.get("values", []))
            count = t.get("count", len(bits))
            if not isinstance(count, int) or count < 0:
                raise ScenarioError(f"{where}: count must be a non-negative integer")
            if len(values) > count:
                raise ScenarioError(f"{where}: more values than ticks")
            proc = TrngProcess(
                str(t.get("prefix", "")),
                Worldline(P.point(t["anchor"], f"{where}.anchor"),
                          P.velocity(t.get("velocity", 0), f"{where}.velocity")),
                P.number(t.get("proper_period", 1), f"{where}.proper_period"),
                as_probability(t.get("marginal", "1/2")),
                bits,
            )
            return TrngDecl(proc, count, values)
        decl = P.guarded(where, make)
        if decl is not None:
            trngs.append(decl)

    events = []
    for i, e in enumerate(doc.get("events", [])):
        where = f"events[{i}]"

        def make():
            value = e.get("value")
            return EventDecl(str(e["variable"]), P.point(e["at"], f"{where}.at"),
                             None if value is None else P.bit(value, f"{where}.value"),
                             as_probability(e.get("marginal", "1/2")))
        ev = P.guarded(where, make)
        if ev is not None:
            events.append(ev)

    correlations = []
    for i, m in enumerate(doc.get("correlations", [])):
        where = f"correlations[{i}]"

        def make():
            names = tuple(str(v) for v in m["variables"])
            joint = {}
            for key, p in m["joint"].items():
                if len(key) != len(names) or set(key) - {"0", "1"}:
                    raise ScenarioError(f"{where}.joint: key {key!r} is not a {len(names)}-bit string")
                joint[tuple(int(ch) for ch in key)] = as_probability(p)
            model = CorrelationModel(names, joint, m.get("marginals", {}))
            report = validate_model(model)
            if not report.ok:
                raise ScenarioError([f"{where}: {v}" for v in report.violations])
            return model
        model = P.guarded(where, make)
        if model is not None:
            correlations.append(model)

    boxes = []
    for i, b in enumerate(doc.get("boxes", [])):
        where = f"boxes[{i}]"

        def make():
            table = b.get("table", "pr")
            name = None
            if table == "pr":
                box, name = pr_box(), "pr"
            elif table == "uniform":
                box, name = uniform_box(), "uniform"
            else:
                box = Box.from_array(table)
            issues = validate_box(box)
            if issues:
                raise ScenarioError([f"{where}: {v}" for v in issues])
            x, y = (str(v) for v in b.get("inputs", ["x", "y"]))
            a, bb = (str(v) for v in b.get("outputs", ["a", "b"]))
            return BoxDecl(str(b.get("name", f"box{i}")), BoxSetup(box, x, y, a, bb), name)
        decl = P.guarded(where, make)
        if decl is not None:
            boxes.append(decl)

    quantum = None
    if doc.get("quantum") is not None:
        quantum = P.guarded("quantum", _quantum, P, doc["quantum"], c, tolerance)

    knowledge = []
    for i, k in enumerate(doc.get("knowledge", [])):
        where = f"knowledge[{i}]"
        mark = P.guarded(where, lambda: KnowledgeMark(
            str(k["observer"]), str(k["variable"]), P.point(k["known_from"], f"{where}.known_from")))
        if mark is not None:
            knowledge.append(mark)

    diagram = doc.get("diagram") or {}
    if not isinstance(diagram, dict):
        P.fail("diagram: expected an object")
        diagram = {}
    elif not isinstance(diagram.get("simultaneity", []), list):
        P.fail("diagram.simultaneity: expected a list")
        diagram = {k: v for k, v in diagram.items() if k != "simultaneity"}

    scenario = Scenario(
        c=c, name=str(doc.get("name", "")), description=str(doc.get("description", "")),
        seed=seed, tolerance=float(tolerance), frames=tuple(frames), observers=tuple(observers),
        trngs=tuple(trngs), events=tuple(events), correlations=tuple(correlations),
        boxes=tuple(boxes), quantum=quantum, knowledge=tuple(knowledge),
        diagram=diagram,
    )

    # identifiers declared so far; queries and cross references are checked against them
    declared = _check_variables(P, scenario)
    queries = []
    for i, q in enumerate(doc.get("queries", [])):
        where = f"queries[{i}]"
        query = P.guarded(where, _query, P, scenario, declared, q, where)
        if query is not None:
            queries.append(query)
    _check_diagram(P, scenario)
    if P.issues:
        raise ScenarioError(P.issues)
    return Scenario(**{**scenario.__dict__, "queries": tuple(queries)})


def _quantum(P: _Parser, q: dict, c, tolerance) -> QuantumDecl:
    init = q.get("initial")
    name = None
    if isinstance(init, str):
        states = standard_states()
        if init not in states:
            raise ScenarioError(f"quantum.initial: unknown state {init!r}; known: {sorted(states)}")
        register, name = states[init], init
    elif isinstance(init, list):
        amps = [_complex(P, a, "quantum.initial") for a in init]
        register = QuantumRegister(amps)
    else:
        raise ScenarioError("quantum.initial: expected a state name or amplitude list")
    measurements = []
    for i, m in enumerate(q.get("measurements", [])):
        where = f"quantum.measurements[{i}]"
        outcome = m.get("outcome")
        qubit = m.get("qubit")
        if not isinstance(qubit, int) or isinstance(qubit, bool) or not 0 <= qubit < MAX_QUBITS:
            raise ScenarioError(f"{where}.qubit: expected an integer in [0, {MAX_QUBITS})")
        measurements.append(MeasurementEvent(
            qubit, _basis(P, m.get("basis", "z"), f"{where}.basis"),
            P.point(m["at"], f"{where}.at"),
            None if outcome is None else P.bit(outcome, f"{where}.outcome"),
            str(m.get("variable", "")),
        ))
    return QuantumDecl(QuantumSetup(register, tuple(measurements), c, tolerance), name)


def _complex(P: _Parser, value, where: str) -> complex:
    if isinstance(value, list) and len(value) == 2:
        return complex(float(P.number(value[0], where)), float(P.number(value[1], where)))
    return complex(float(P.number(value, where)))


def _basis(P: _Parser, value, where: str):
    if isinstance(value, str):
        resolve_basis(value)
        return value
    if isinstance(value, dict):
        theta = math.radians(float(P.number(value.get("theta_deg", 0), where)))
        phi = math.radians(float(P.number(value.get("phi_deg", 0), where)))
        return bloch_basis(theta, phi)
    if isinstance(value, list) and len(value) == 2:
        vecs = tuple(tuple(_complex(P, a, where) for a in vec) for vec in value)
        resolve_basis(vecs)
        return vecs
    raise ScenarioError(f"{where}: expected x, y, z, {{theta_deg, phi_deg}} or two vectors")


def _check_variables(P: _Parser, s: Scenario) -> frozenset[str]:
    seen: dict[str, str] = {}

    def claim(name: str, where: str):
        if not name:
            return
        if name in seen:
            P.fail(f"{where}: variable {name!r} is determined more than once "
                   f"(already by {seen[name]})")
        else:
            seen[name] = where

    for i, t in enumerate(s.trngs):
        for name in t.variables():
            claim(name, f"trngs[{i}]")
    for i, e in enumerate(s.events):
        claim(e.variable, f"events[{i}]")
    if s.quantum is not None:
        for i, m in enumerate(s.quantum.setup.measurements):
            claim(m.variable, f"quantum.measurements[{i}]")
    quantum_vars = {m.variable for m in s.quantum.setup.measurements} if s.quantum else set()
    in_model: dict[str, str] = {}
    for i, m in enumerate(s.correlations):
        for v in m.variables:
            if v not in seen:
                P.fail(f"correlations[{i}]: variable {v!r} has no determination point")
            if v in quantum_vars:
                P.fail(f"correlations[{i}]: {v!r} is a quantum measurement outcome")
            if v in in_model:
                P.fail(f"correlations[{i}]: {v!r} already modelled by {in_model[v]}")
            in_model[v] = f"correlations[{i}]"
    names = set()
    for i, b in enumerate(s.boxes):
        if b.name in names:
            P.fail(f"boxes[{i}]: duplicate box name {b.name!r}")
        names.add(b.name)
        st = b.setup
        for v in (st.x, st.y, st.a, st.b):
            if v not in seen:
                P.fail(f"boxes[{i}]: variable {v!r} has no determination point")
            elif v in quantum_vars:
                P.fail(f"boxes[{i}]: {v!r} is a quantum measurement outcome")
        for v in (st.a, st.b):
            if v in in_model:
                P.fail(f"boxes[{i}]: output {v!r} already modelled by {in_model[v]}")
            in_model[v] = f"boxes[{i}]"
    for i, k in enumerate(s.knowledge):
        if k.variable not in seen:
            P.fail(f"knowledge[{i}]: unknown variable {k.variable!r}")
    return frozenset(seen)


def _proposition(text, declared, where) -> Proposition:
    try:
        prop = parse_proposition(text) if isinstance(text, str) else None
    except PropositionSyntaxError as exc:
        raise ScenarioError(f"{where}: {exc}") from None
    if prop is None:
        raise ScenarioError(f"{where}: proposition must be a string")
    unknown = sorted(variables(prop) - declared)
    if unknown:
        raise ScenarioError(f"{where}: undeclared variable(s) {', '.join(unknown)}")
    return prop


def _query(P: _Parser, s: Scenario, declared, q: dict, where: str) -> Query:
    kind = q.get("kind")
    if kind not in QUERY_KINDS:
        raise ScenarioError(f"{where}: unknown query kind {kind!r}")
    label = str(q.get("label", ""))
    params: dict[str, Any] = {}
    if kind == "truth":
        params["proposition"] = _proposition(q.get("proposition"), declared, f"{where}.proposition")
        params["text"] = q["proposition"]
        params["at"] = P.point(q.get("at"), f"{where}.at")
    elif kind == "propensity":
        claim = q.get("claim")
        if not (isinstance(claim, list) and len(claim) == 2):
            raise ScenarioError(f"{where}.claim: expected [variable, bit]")
        if claim[0] not in declared:
            raise ScenarioError(f"{where}.claim: undeclared variable {claim[0]!r}")
        params["claim"] = (str(claim[0]), P.bit(claim[1], f"{where}.claim"))
        params["at"] = P.point(q.get("at"), f"{where}.at")
    elif kind == "state":
        if s.quantum is None:
            raise ScenarioError(f"{where}: state query needs a quantum section")
        params["target"] = _state_target(P, s, q, where)
        if "compare" in q:
            params["compare"] = _state_target(P, s, q["compare"], f"{where}.compare")
    elif kind == "frontier":
        params["proposition"] = _proposition(q.get("proposition"), declared, f"{where}.proposition")
        params["text"] = q["proposition"]
        if "observer" in q:
            try:
                params["observer"] = s.observer(q["observer"]).label
            except KeyError:
                raise ScenarioError(f"{where}: unknown observer {q['observer']!r}") from None
        elif "worldline" in q:
            wl = q["worldline"]
            params["worldline"] = Worldline(P.point(wl["anchor"], f"{where}.worldline.anchor"),
                                            P.velocity(wl.get("velocity", 0), f"{where}.worldline.velocity"))
        else:
            raise ScenarioError(f"{where}: frontier needs an observer or a worldline")
    elif kind == "falsify-present-reality":
        label_ = q.get("frame", REST)
        if label_ not in P.frames:
            raise ScenarioError(f"{where}: unknown frame {label_!r}")
        params["frame"] = label_
    elif kind == "no-signaling":
        if "box" in q:
            _known_box(s, q["box"], where)
            params["box"] = q["box"]
        elif "measurement" in q:
            if s.quantum is None:
                raise ScenarioError(f"{where}: quantum no-signaling needs a quantum section")
            names = [m.variable for m in s.quantum.setup.measurements]
            if q["measurement"] not in names:
                raise ScenarioError(f"{where}: unknown measurement {q['measurement']!r}")
            params["measurement"] = q["measurement"]
            params["keep"] = tuple(int(k) for k in q.get("keep", []))
            if not params["keep"]:
                raise ScenarioError(f"{where}: keep must list at least one qubit")
            params["at"] = P.point(q.get("at"), f"{where}.at")
        else:
            raise ScenarioError(f"{where}: no-signaling needs a box or a measurement")
    elif kind == "chsh":
        if "box" in q:
            _known_box(s, q["box"], where)
            params["box"] = q["box"]
        elif "quantum" in q:
            if s.quantum is None:
                raise ScenarioError(f"{where}: quantum CHSH needs a quantum section")
            spec = q["quantum"]
            params["alice"] = tuple(_basis(P, b, f"{where}.quantum.alice") for b in spec["alice"])
            params["bob"] = tuple(_basis(P, b, f"{where}.quantum.bob") for b in spec["bob"])
            params["qubits"] = tuple(int(k) for k in spec.get("qubits", [0, 1]))
            params["alice_doc"] = tuple(_basis_source(b) for b in spec["alice"])
            params["bob_doc"] = tuple(_basis_source(b) for b in spec["bob"])
        else:
            raise ScenarioError(f"{where}: chsh needs a box or quantum settings")
    elif kind == "local-reality":
        params["at"] = P.point(q.get("at"), f"{where}.at")
        texts = q.get("propositions", [])
        params["propositions"] = tuple(
            _proposition(p, declared, f"{where}.propositions[{j}]") for j, p in enumerate(texts)
        )
        params["texts"] = tuple(texts)
    return Query(kind, params, label)


def _basis_source(b):
    """Hashable copy of a basis as written, kept for faithful printing."""
    if isinstance(b, dict):
        return tuple(sorted(b.items()))
    if isinstance(b, list):
        return tuple(_basis_source(x) for x in b)
    return b


def _unfreeze(b):
    if isinstance(b, tuple) and b and isinstance(b[0], tuple) and len(b[0]) == 2 and isinstance(b[0][0], str):
        return dict(b)
    if isinstance(b, tuple):
        return [_unfreeze(x) for x in b]
    return b


def _known_box(s: Scenario, name, where):
    try:
        s.box(name)
    except KeyError:
        raise ScenarioError(f"{where}: unknown box {name!r}") from None


def _state_target(P: _Parser, s: Scenario, q: dict, where: str):
    if "at" in q:
        return ("point", P.point(q["at"], f"{where}.at"))
    if "frame" in q and "time" in q:
        if q["frame"] not in P.frames:
            raise ScenarioError(f"{where}: unknown frame {q['frame']!r}")
        return ("frame", q["frame"], P.number(q["time"], f"{where}.time"))
    raise ScenarioError(f"{where}: state target needs 'at' or 'frame' and 'time'")


def _check_diagram(P: _Parser, s: Scenario):
    for i, entry in enumerate(s.diagram.get("simultaneity", [])):
        if not isinstance(entry, dict):
            P.fail(f"diagram.simultaneity[{i}]: expected an object")
            continue
        if entry.get("frame", REST) not in P.frames:
            P.fail(f"diagram.simultaneity[{i}]: unknown frame {entry.get('frame')!r}")
        where = f"diagram.simultaneity[{i}].through"
        P.guarded(where, P.point, entry.get("through", [0, 0]), where)
    window = s.diagram.get("window")
    if window is not None:
        for axis in ("t", "x"):
            span = window.get(axis) if isinstance(window, dict) else None
            if span is None:
                continue
            where = f"diagram.window.{axis}"
            if not (isinstance(span, list) and len(span) == 2):
                P.fail(f"{where}: expected [low, high]")
                continue
            lo = P.guarded(where, P.number, span[0], where)
            hi = P.guarded(where, P.number, span[1], where)
            if lo is not None and hi is not None and not lo < hi:
                P.fail(f"{where}: low must be below high")


# -- printing ---------------------------------------------------------------

def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def _pt(p: SpacetimePoint):
    return [_num(p.t), _num(p.x)]


def _cplx(z: complex):
    return [z.real, z.imag]


def _basis_doc(b):
    if isinstance(b, str):
        return b
    return [[_cplx(complex(a)) for a in vec] for vec in b]


def _state_target_doc(t):
    if t[0] == "point":
        return {"at": _pt(t[1])}
    return {"frame": t[1], "time": _num(t[2])}


def query_to_document(q: Query) -> dict:
    doc: dict[str, Any] = {"kind": q.kind}
    p = q.params
    if q.kind in ("truth", "frontier"):
        doc["proposition"] = p.get("text", str(p["proposition"]))
    if q.kind == "propensity":
        doc["claim"] = list(p["claim"])
    if "at" in p and q.kind != "state":
        doc["at"] = _pt(p["at"])
    if q.kind == "state":
        doc.update(_state_target_doc(p["target"]))
        if "compare" in p:
            doc["compare"] = _state_target_doc(p["compare"])
    if q.kind == "frontier":
        if "observer" in p:
            doc["observer"] = p["observer"]
        else:
            w = p["worldline"]
            doc["worldline"] = {"anchor": _pt(w.anchor), "velocity": _num(w.velocity)}
    if q.kind == "falsify-present-reality":
        doc["frame"] = p["frame"]
    if "box" in p:
        doc["box"] = p["box"]
    if "measurement" in p:
        doc["measurement"] = p["measurement"]
        doc["keep"] = list(p["keep"])
    if q.kind == "chsh" and "alice" in p:
        doc["quantum"] = {"alice": [_unfreeze(b) for b in p["alice_doc"]],
                          "bob": [_unfreeze(b) for b in p["bob_doc"]],
                          "qubits": list(p["qubits"])}
    if q.kind == "local-reality":
        doc["propositions"] = list(p["texts"])
    if q.label:
        doc["label"] = q.label
    return doc


def scenario_to_document(s: Scenario) -> dict:
    doc: dict[str, Any] = {"schema": SCHEMA_VERSION, "name": s.name}
    if s.description:
        doc["description"] = s.description
    doc.update({"c": _num(s.c), "seed": s.seed, "tolerance": s.tolerance})
    doc["frames"] = [{"label": f.label, "velocity": _num(f.velocity)} for f in s.frames]
    doc["observers"] = [
        {"label": o.label, "anchor": _pt(o.worldline.anchor), "velocity": _num(o.worldline.velocity)}
        for o in s.observers
    ]
    doc["trngs"] = []
    for t in s.trngs:
        p = t.process
        entry = {"prefix": p.variable_prefix, "anchor": _pt(p.worldline.anchor),
                 "velocity": _num(p.worldline.velocity), "proper_period": _num(p.proper_period),
                 "marginal": _num(p.marginal), "count": t.count}
        if p.bits:
            entry["bits"] = list(p.bits)
        if t.values:
            entry["values"] = list(t.values)
        doc["trngs"].append(entry)
    doc["events"] = []
    for e in s.events:
        entry = {"variable": e.variable, "at": _pt(e.location)}
        if e.value is not None:
            entry["value"] = e.value
        if e.marginal != Fraction(1, 2):
            entry["marginal"] = _num(e.marginal)
        doc["events"].append(entry)
    doc["correlations"] = [
        {"variables": list(m.variables),
         "joint": {"".join(map(str, k)): _num(v) for k, v in sorted(m.joint.items())},
         **({"marginals": {k: _num(v) for k, v in m.marginals.items()}} if m.marginals else {})}
        for m in s.correlations
    ]
    doc["boxes"] = [
        {"name": b.name,
         "table": b.table_name or [_num(v) for v in b.setup.box.to_array()],
         "inputs": [b.setup.x, b.setup.y], "outputs": [b.setup.a, b.setup.b]}
        for b in s.boxes
    ]
    if s.quantum is not None:
        qs = s.quantum.setup
        initial = s.quantum.initial_name or [_cplx(a) for a in qs.initial.amplitudes]
        ms = []
        for m in qs.measurements:
            entry = {"variable": m.variable, "qubit": m.qubit, "basis": _basis_doc(m.basis),
                     "at": _pt(m.location)}
            if m.outcome is not None:
                entry["outcome"] = m.outcome
            ms.append(entry)
        doc["quantum"] = {"initial": initial, "measurements": ms}
    if s.knowledge:
        doc["knowledge"] = [{"observer": k.observer, "variable": k.variable,
                             "known_from": _pt(k.known_from)} for k in s.knowledge]
    doc["queries"] = [query_to_document(q) for q in s.queries]
    if s.diagram:
        doc["diagram"] = s.diagram
    return doc


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_document(s), indent=2, ensure_ascii=False) + "\n"


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise KeyError(f"unknown built-in scenario {name!r}; choose from {', '.join(BUILTINS)}")
    return resources.files("relindet").joinpath("scenarios", f"{name}.json").read_text("utf-8")


def load_builtin(name: str) -> Scenario:
    return parse_scenario(builtin_text(name))
