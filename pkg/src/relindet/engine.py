"""Realizing a scenario's random variables and answering its queries."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .boxes import box_propensity_at, chsh_value, local_bound, no_signaling_check
from .determinacy import (
    DeterminationEvent,
    Determinations,
    check_local_reality,
    determinacy_frontier,
    knowledge_violations,
    locally_verifiable,
    present_reality_falsifier,
    relevant_events,
    truth_at,
)
from .errors import RelindetError
from .quantum import (
    MeasurementEvent,
    QuantumRegister,
    born_probabilities,
    box_from_state,
    format_state,
    no_signaling_quantum,
    overlap,
    realize_outcomes,
    state_at,
    state_in_frame,
)
from .randomness import ClassicalSetup, CorrelationModel, draw, make_rng, propensity_at
from .scenario import Scenario, query_to_document
from .spacetime import SpacetimePoint, in_future_cone

REPORT_SCHEMA = 1


@dataclass(frozen=True)
class Realization:
    determinations: Determinations
    classical: ClassicalSetup
    measurements: tuple[MeasurementEvent, ...]


def classical_setup(s: Scenario) -> ClassicalSetup:
    """Correlation models plus independent single-bit models for every other
    classical variable that is not a box output."""
    locations = s.locations()
    quantum_vars = {m.variable for m in s.quantum.setup.measurements} if s.quantum else set()
    box_outputs = {v for b in s.boxes for v in (b.setup.a, b.setup.b)}
    modelled = {v for m in s.correlations for v in m.variables}
    marginals = {}
    for t in s.trngs:
        for name in t.variables():
            marginals[name] = t.process.marginal
    for e in s.events:
        marginals[e.variable] = e.marginal
    models = list(s.correlations)
    for name in locations:
        if name in quantum_vars or name in box_outputs or name in modelled:
            continue
        models.append(CorrelationModel.independent(name, marginals.get(name, Fraction(1, 2))))
    classical_vars = {v for m in models for v in m.variables}
    return ClassicalSetup(tuple(models), {v: p for v, p in locations.items() if v in classical_vars})


def fixed_values(s: Scenario) -> dict[str, int]:
    fixed = {}
    for t in s.trngs:
        for name, value in zip(t.variables(), t.values):
            if value is not None:
                fixed[name] = value
    for e in s.events:
        if e.value is not None:
            fixed[e.variable] = e.value
    return fixed


def realize(s: Scenario, seed: int | None = None) -> Realization:
    """Draw every unfixed outcome; classical models first, then boxes (given
    their realized inputs), then quantum measurements in causal order."""
    rng = make_rng(s.seed if seed is None else seed)
    setup = classical_setup(s)
    fixed = fixed_values(s)
    locations = s.locations()
    values: dict[str, int] = {}
    for m in setup.models:
        outcome = draw(m, rng, fixed)
        values.update(zip(m.variables, outcome))
    for b in s.boxes:
        st = b.setup
        model = st.box.given_inputs(values[st.x], values[st.y], (st.a, st.b))
        values.update(zip(model.variables, draw(model, rng, fixed)))
    measurements: tuple[MeasurementEvent, ...] = ()
    if s.quantum is not None:
        measurements = realize_outcomes(s.quantum.setup, rng)
        for m in measurements:
            if m.variable:
                values[m.variable] = m.outcome
    events = tuple(DeterminationEvent(v, values[v], p) for v, p in locations.items() if v in values)
    d = Determinations(events, s.variables(), s.c, s.tolerance)
    return Realization(d, setup, measurements)


# -- JSON helpers -------------------------------------------------------------

def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return v
    return v


def _pt(p: SpacetimePoint):
    return [_num(p.t), _num(p.x)]


def _event_doc(e: DeterminationEvent) -> dict:
    return {"variable": e.variable, "value": e.value, "at": _pt(e.location)}


def _state_doc(r: QuantumRegister) -> dict:
    return {"ket": format_state(r), "amplitudes": [[a.real, a.imag] for a in r.amplitudes]}


# -- query evaluation ---------------------------------------------------------

class _Evaluator:
    def __init__(self, s: Scenario, real: Realization):
        self.s = s
        self.real = real
        self.d = real.determinations

    def evaluate(self, kind: str, p: dict) -> tuple[Any, list[str]]:
        return getattr(self, "q_" + kind.replace("-", "_"))(p)

    def q_truth(self, p):
        prop, q = p["proposition"], p["at"]
        value = truth_at(self.d, prop, q)
        cond = [e.variable for e in relevant_events(self.d, prop) if self.d.reaches(e, q)]
        return {"value": str(value), "locally_verifiable": locally_verifiable(self.d, prop, q)}, cond

    def q_propensity(self, p):
        variable, value = p["claim"]
        q = p["at"]
        for b in self.s.boxes:
            if variable in (b.setup.a, b.setup.b):
                pa = box_propensity_at(b.setup, self.d, (variable, value), q)
                return self._propensity_doc(pa.propensity, pa.conditioned_on, variable), list(pa.conditioned_on)
        for i, m in enumerate(self.real.measurements):
            if m.variable == variable:
                return self._quantum_propensity(i, m, value, q)
        pa = propensity_at(self.real.classical, self.d, (variable, value), q)
        return self._propensity_doc(pa.propensity, pa.conditioned_on, variable), list(pa.conditioned_on)

    def _propensity_doc(self, prob, conditioned_on, variable):
        return {
            "propensity": _num(prob),
            "float": float(prob),
            "determinate": variable in conditioned_on and prob in (0, 1),
        }

    def _quantum_propensity(self, index, m, value, q):
        if in_future_cone(m.location, q, self.s.c, self.s.tolerance):
            prob = Fraction(int(m.outcome == value))
            return self._propensity_doc(prob, (m.variable,), m.variable), [m.variable]
        assignment = state_at(self.s.quantum.setup, self.real.measurements, q)
        prob = born_probabilities(assignment.state, m.qubit, m.basis)[value]
        applied = [e.label() for e in assignment.applied_events]
        return self._propensity_doc(prob, tuple(applied), m.variable), applied

    def _state(self, target):
        setup = self.s.quantum.setup
        if target[0] == "point":
            return state_at(setup, self.real.measurements, target[1])
        return state_in_frame(setup, self.real.measurements, self.s.frame(target[1]), target[2])

    def q_state(self, p):
        a = self._state(p["target"])
        result = _state_doc(a.state)
        result["applied"] = [e.label() for e in a.applied_events]
        if "compare" in p:
            b = self._state(p["compare"])
            ov = overlap(a.state, b.state)
            result["compare"] = {**_state_doc(b.state), "applied": [e.label() for e in b.applied_events]}
            result["overlap"] = [ov.real, ov.imag]
            result["overlap_abs2"] = abs(ov) ** 2
        return result, [e.label() for e in a.applied_events]

    def q_frontier(self, p):
        prop = p["proposition"]
        w = self.s.observer(p["observer"]).worldline if "observer" in p else p["worldline"]
        t = determinacy_frontier(self.d, prop, w)
        cond = [e.variable for e in relevant_events(self.d, prop)]
        if t is None:
            return {"t": None, "point": None}, cond
        return {"t": _num(t), "point": _pt(w.at(t))}, cond

    def q_falsify_present_reality(self, p):
        frame = self.s.frame(p["frame"])
        observers = [(o.label, o.worldline) for o in self.s.observers]
        ce = present_reality_falsifier(self.d, observers, frame)
        if ce is None:
            return {"found": False, "message": "no counterexample constructible"}, []
        return {
            "found": True,
            "frame": ce.frame,
            "observer": ce.observer,
            "proposition": str(ce.proposition),
            "P": _pt(ce.determinate_at),
            "Q": _pt(ce.indeterminate_at),
            "value_at_P": str(ce.value_at_determinate),
            "value_at_Q": "Indeterminate",
        }, [ce.proposition.variable]

    def q_no_signaling(self, p):
        if "box" in p:
            report = no_signaling_check(self.s.box(p["box"]).setup.box)
            return {"ok": report.ok, "violations": [str(v) for v in report.violations]}, []
        idx = next(i for i, m in enumerate(self.real.measurements) if m.variable == p["measurement"])
        rep = no_signaling_quantum(self.s.quantum.setup, self.real.measurements, idx, p["at"], p["keep"])
        past = [m.label() for m in self.real.measurements
                if in_future_cone(m.location, p["at"], self.s.c, self.s.tolerance)]
        return {"ok": rep.ok, "selective_deviation": rep.selective_deviation,
                "ensemble_deviation": rep.ensemble_deviation}, past

    def q_chsh(self, p):
        if "box" in p:
            box = self.s.box(p["box"]).setup.box
        else:
            box = box_from_state(self.s.quantum.setup.initial, p["alice"], p["bob"], p["qubits"])
        loc = local_bound(box)
        return {"S": _num(chsh_value(box)), "is_local": loc.is_local, "best_S": _num(loc.best_S)}, []

    def q_local_reality(self, p):
        rep = check_local_reality(self.d, p["at"], p["propositions"], self.s.frames)
        return {
            "ok": rep.ok,
            "frames": [f.label for f in self.s.frames],
            "discrepancies": [
                {"proposition": x.proposition, "frame": x.frame,
                 "rest": str(x.rest_value), "other": str(x.frame_value)}
                for x in rep.discrepancies
            ],
        }, []


@dataclass
class Report:
    scenario: Scenario
    realization: Realization
    document: dict

    def to_json(self) -> str:
        return json.dumps(self.document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def entries(self) -> list[dict]:
        return self.document["queries"]

    def to_text(self, color: bool | None = None) -> str:
        if color is None:
            color = False
        return render_text(self.document, color)


def run(s: Scenario, seed: int | None = None, timing: bool = False) -> Report:
    """Evaluate every query in order. Per-query failures are recorded in the
    entry's ``error`` field and do not stop the run. ``elapsed`` is only
    filled in with ``timing=True`` so reports stay byte-reproducible."""
    seed = s.seed if seed is None else seed
    real = realize(s, seed)
    ev = _Evaluator(s, real)
    entries = []
    for i, q in enumerate(s.queries):
        start = time.perf_counter()
        entry: dict[str, Any] = {"index": i, "kind": q.kind, "label": q.label,
                                 "inputs": query_to_document(q)}
        try:
            result, cond = ev.evaluate(q.kind, q.params)
            entry["result"] = result
            entry["conditioning_events"] = cond
        except (RelindetError, ValueError, KeyError, IndexError) as exc:
            entry["result"] = None
            entry["error"] = f"{type(exc).__name__}: {exc}"
            entry["conditioning_events"] = []
        entry["elapsed"] = round(time.perf_counter() - start, 6) if timing else None
        entries.append(entry)
    doc = {
        "report_schema": REPORT_SCHEMA,
        "scenario": s.name,
        "seed": seed,
        "c": _num(s.c),
        "tolerance": s.tolerance,
        "events": [_event_doc(e) for e in real.determinations.events],
        "measurements": [
            {"variable": m.variable, "qubit": m.qubit, "basis": m.basis if isinstance(m.basis, str) else "custom",
             "outcome": m.outcome, "at": _pt(m.location)}
            for m in real.measurements
        ],
        "knowledge_violations": knowledge_violations(real.determinations, s.knowledge),
        "queries": entries,
    }
    return Report(s, real, doc)


# -- text rendering -----------------------------------------------------------

_COLORS = {"True": "32", "False": "31", "Indeterminate": "33"}


def use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str | None, color: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if color and code else text


def _fmt(v) -> str:
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float, str)) for x in v):
        return f"(t={v[0]}, x={v[1]})"
    return str(v)


def clock(t) -> str:
    """Wall-clock reading of ``t`` minutes after 1:00 pm, to the second."""
    seconds = round(float(Fraction(str(t))) * 60)
    sign = "-" if seconds < 0 else ""
    minutes, secs = divmod(abs(seconds), 60)
    hours, minutes = divmod(minutes, 60)
    if sign:
        return f"{hours}:{minutes:02d}:{secs:02d} before 1:00 pm"
    return f"{1 + hours}:{minutes:02d}:{secs:02d} pm"


def _summary(entry: dict, color: bool) -> str:
    r = entry["result"]
    inp = entry["inputs"]
    kind = entry["kind"]
    if kind == "truth":
        return f"{inp['proposition']} at {_fmt(inp['at'])} -> {_paint(r['value'], _COLORS[r['value']], color)}"
    if kind == "propensity":
        prob = r["propensity"]
        shown = f"{prob:.12g}" if isinstance(prob, float) else prob
        return f"p({inp['claim'][0]}={inp['claim'][1]}) at {_fmt(inp['at'])} = {shown}"
    if kind == "state":
        where = _fmt(inp["at"]) if "at" in inp else f"frame {inp['frame']} time {inp['time']}"
        line = f"state at {where}: {r['ket']}"
        if "overlap_abs2" in r:
            line += f"  |overlap|^2 with comparison = {r['overlap_abs2']:.12g}"
        return line
    if kind == "frontier":
        who = inp.get("observer") or "worldline"
        if r["t"] is None:
            return f"{inp['proposition']} never becomes determinate along {who}"
        return f"{inp['proposition']} determinate along {who} from t = {r['t']} min ({clock(r['t'])})"
    if kind == "falsify-present-reality":
        if not r["found"]:
            return r["message"]
        return (f"frame {r['frame']}: {r['proposition']} is {r['value_at_P']} at {_fmt(r['P'])} "
                f"but Indeterminate at simultaneous {_fmt(r['Q'])} ({r['observer']})")
    if kind == "no-signaling":
        return "no-signaling: " + ("pass" if r["ok"] else "FAIL") + (
            f" ({'; '.join(r['violations'])})" if r.get("violations") else "")
    if kind == "chsh":
        return f"CHSH S = {r['S']}, local = {r['is_local']}, best S = {r['best_S']}"
    if kind == "local-reality":
        return "local reality: " + ("consistent" if r["ok"] else f"{len(r['discrepancies'])} discrepancies")
    return json.dumps(r)


def render_text(doc: dict, color: bool = False) -> str:
    lines = [f"scenario {doc['scenario'] or '(unnamed)'}  seed {doc['seed']}  c = {doc['c']}"]
    for e in doc["events"]:
        lines.append(f"  event {e['variable']} = {e['value']} at {_fmt(e['at'])}")
    for v in doc["knowledge_violations"]:
        lines.append(f"  knowledge violation: {v}")
    for entry in doc["queries"]:
        head = f"[{entry['index']}] {entry['kind']}"
        if entry["label"]:
            head += f" ({entry['label']})"
        if entry.get("error"):
            lines.append(f"{head}: {_paint('error', '31', color)} {entry['error']}")
        else:
            lines.append(f"{head}: {_summary(entry, color)}")
    return "\n".join(lines) + "\n"
