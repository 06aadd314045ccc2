"""Dense state vectors for up to four qubits, with per-point state assignment.

Qubit 0 is the leftmost tensor factor, so ``|100>`` has qubit 0 in ``|1>``.
Outcome ``k`` of a basis is its ``k``-th vector; for the Pauli bases outcome
0 is the +1 eigenvector (``|0>_x = |+>``, ``|0>_y = |+i>``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

import numpy as np

from .boxes import Box
from .errors import ModelInconsistencyError, ScenarioError
from .randomness import make_rng
from .spacetime import (
    EPS_GEOM,
    Frame,
    Real,
    SpacetimePoint,
    causal_relation,
    CausalKind,
    in_future_cone,
    simultaneity_coordinate,
)

MAX_QUBITS = 4
NORM_TOL = 1e-12
PROB_FLOOR = 1e-12

_S = 1 / math.sqrt(2)
PAULI_BASES = {
    "z": np.array([[1, 0], [0, 1]], dtype=complex),
    "x": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "y": np.array([[_S, 1j * _S], [_S, -1j * _S]], dtype=complex),
}

BasisSpec = Union[str, tuple[tuple[complex, complex], tuple[complex, complex]]]


def resolve_basis(basis: BasisSpec) -> np.ndarray:
    """Rows of the returned 2x2 array are the basis vectors for outcomes 0, 1."""
    if isinstance(basis, str):
        try:
            return PAULI_BASES[basis]
        except KeyError:
            raise ValueError(f"unknown basis {basis!r}; use x, y, z or two vectors") from None
    vecs = np.asarray(basis, dtype=complex)
    if vecs.shape != (2, 2):
        raise ValueError("an explicit basis is a pair of complex 2-vectors")
    if np.max(np.abs(vecs.conj() @ vecs.T - np.eye(2))) > NORM_TOL:
        raise ValueError("basis vectors are not orthonormal")
    return vecs


def bloch_basis(theta: float, phi: float = 0.0) -> BasisSpec:
    """Eigenbasis of ``n . sigma`` for the Bloch direction ``(theta, phi)``;
    outcome 0 is the +1 eigenvector."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    plus = (complex(c), e * s)
    minus = (-s * e.conjugate(), complex(c))
    return (plus, minus)


@dataclass(frozen=True, eq=False)
class QuantumRegister:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(len(amps)))) if len(amps) else -1
        if n < 1 or 2**n != len(amps):
            raise ValueError(f"amplitude count {len(amps)} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits are supported, got {n}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"squared norm is {norm}, not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: Iterable[complex]) -> QuantumRegister:
        amps = np.asarray(list(amplitudes), dtype=complex)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def basis_state(cls, bits: str) -> QuantumRegister:
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return len(self.amplitudes).bit_length() - 1

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n_qubits)

    def __repr__(self) -> str:
        return f"QuantumRegister({format_state(self)})"


def product_state(*qubits: Sequence[complex]) -> QuantumRegister:
    amps = np.array([1], dtype=complex)
    for q in qubits:
        amps = np.kron(amps, np.asarray(q, dtype=complex))
    return QuantumRegister.normalized(amps)


def basis_vector(basis: BasisSpec, outcome: int) -> np.ndarray:
    return resolve_basis(basis)[outcome]


def standard_states() -> dict[str, QuantumRegister]:
    """Named registers: the singlet and the three-qubit W state."""
    return {
        "singlet": QuantumRegister.normalized([0, 1, -1, 0]),
        "w3": QuantumRegister.normalized([0, 1, 1, 0, 1, 0, 0, 0]),
    }


def _check_qubit(r: QuantumRegister, qubit: int) -> None:
    if not 0 <= qubit < r.n_qubits:
        raise IndexError(f"qubit {qubit} out of range for a {r.n_qubits}-qubit register")


def _split(r: QuantumRegister, qubit: int) -> np.ndarray:
    """View the amplitudes as ``(left, 2, right)`` around ``qubit``."""
    n = r.n_qubits
    return r.amplitudes.reshape(2**qubit, 2, 2 ** (n - qubit - 1))


def _component(r: QuantumRegister, qubit: int, vec: np.ndarray) -> np.ndarray:
    """``<vec|_qubit psi>``: the unnormalized state of the other qubits."""
    arr = _split(r, qubit)
    bra = vec.conj()
    return bra[0] * arr[:, 0, :] + bra[1] * arr[:, 1, :]


def born_probabilities(r: QuantumRegister, qubit: int, basis: BasisSpec = "z") -> tuple[float, float]:
    _check_qubit(r, qubit)
    vecs = resolve_basis(basis)
    p = [float(np.vdot(c, c).real) for c in (_component(r, qubit, v) for v in vecs)]
    return p[0], p[1]


def project_onto(r: QuantumRegister, qubit: int, basis: BasisSpec, outcome: int) -> QuantumRegister:
    """Projection postulate: keep the ``outcome`` branch and renormalize."""
    _check_qubit(r, qubit)
    vec = basis_vector(basis, outcome)
    rest = _component(r, qubit, vec)
    prob = float(np.vdot(rest, rest).real)
    if prob <= PROB_FLOOR:
        raise ModelInconsistencyError(
            f"outcome {outcome} on qubit {qubit} has probability {prob:.3g}; cannot project"
        )
    full = np.empty((rest.shape[0], 2, rest.shape[1]), dtype=complex)
    scale = 1 / math.sqrt(prob)
    full[:, 0, :] = (vec[0] * scale) * rest
    full[:, 1, :] = (vec[1] * scale) * rest
    return QuantumRegister(full.reshape(-1))


def overlap(r1: QuantumRegister, r2: QuantumRegister) -> complex:
    """Inner product ``<r1|r2>``."""
    if r1.n_qubits != r2.n_qubits:
        raise ValueError(f"cannot compare {r1.n_qubits}- and {r2.n_qubits}-qubit registers")
    return complex(np.vdot(r1.amplitudes, r2.amplitudes))


def same_ray(r1: QuantumRegister, r2: QuantumRegister, tol: float = NORM_TOL) -> bool:
    """Equality up to global phase."""
    return abs(abs(overlap(r1, r2)) - 1) <= tol


def reduced_density(r: QuantumRegister, keep: Sequence[int]) -> np.ndarray:
    """Partial trace over every qubit not in ``keep``."""
    keep = list(keep)
    for q in keep:
        _check_qubit(r, q)
    traced = [q for q in range(r.n_qubits) if q not in keep]
    m = np.transpose(r.tensor(), keep + traced).reshape(2 ** len(keep), -1)
    return m @ m.conj().T


def format_state(r: QuantumRegister, digits: int = 6) -> str:
    """Ket notation in the computational basis, e.g. ``0.707107|01> - 0.707107|10>``."""
    out = ""
    n = r.n_qubits
    for i, a in enumerate(r.amplitudes):
        if abs(a) < 10**-digits:
            continue
        re_, im = round(a.real, digits) + 0.0, round(a.imag, digits) + 0.0
        if im == 0:
            sign, coef = ("-" if re_ < 0 else "+"), f"{abs(re_):g}"
        elif re_ == 0:
            sign, coef = ("-" if im < 0 else "+"), f"{abs(im):g}j"
        else:
            sign, coef = "+", f"({re_:g}{im:+g}j)"
        ket = f"{coef}|{i:0{n}b}>"
        if not out:
            out = ket if sign == "+" else "-" + ket
        else:
            out += f" {sign} {ket}"
    return out or "0"


# -- measurements in space-time ---------------------------------------------

@dataclass(frozen=True)
class MeasurementEvent:
    qubit: int
    basis: BasisSpec
    location: SpacetimePoint
    outcome: int | None = None
    variable: str = ""

    def __post_init__(self):
        resolve_basis(self.basis)
        if self.outcome not in (None, 0, 1):
            raise ValueError(f"outcome must be 0, 1 or None, got {self.outcome!r}")

    @property
    def realized(self) -> bool:
        return self.outcome is not None

    def label(self) -> str:
        return self.variable or f"q{self.qubit}@({self.location.t},{self.location.x})"


@dataclass(frozen=True)
class QuantumSetup:
    initial: QuantumRegister
    measurements: tuple[MeasurementEvent, ...]
    c: Real = 1
    eps: float = EPS_GEOM

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        problems = []
        for m in self.measurements:
            if not 0 <= m.qubit < self.initial.n_qubits:
                problems.append(f"measurement {m.label()} targets qubit {m.qubit} of "
                                f"a {self.initial.n_qubits}-qubit register")
        for m1, m2 in itertools.combinations(self.measurements, 2):
            if m1.qubit != m2.qubit:
                continue
            rel = causal_relation(m1.location, m2.location, self.c, self.eps)
            if rel.kind is CausalKind.SPACELIKE:
                problems.append(f"measurements {m1.label()} and {m2.label()} act on qubit "
                                f"{m1.qubit} at space-like separation")
        if problems:
            raise ScenarioError(problems)

    def with_measurements(self, measurements: Iterable[MeasurementEvent]) -> QuantumSetup:
        return replace(self, measurements=tuple(measurements))


def _causal_sequence(events: Iterable[MeasurementEvent]) -> list[MeasurementEvent]:
    # rest-frame time order is a linear extension of the causal order
    return sorted(events, key=lambda e: (float(e.location.t), e.qubit))


def apply_measurements(r: QuantumRegister, events: Iterable[MeasurementEvent]) -> QuantumRegister:
    for e in _causal_sequence(events):
        if not e.realized:
            raise ModelInconsistencyError(f"measurement {e.label()} has no realized outcome")
        r = project_onto(r, e.qubit, e.basis, e.outcome)
    return r


def project(r: QuantumRegister, e: MeasurementEvent) -> QuantumRegister:
    if not e.realized:
        raise ModelInconsistencyError(f"measurement {e.label()} has no realized outcome")
    return project_onto(r, e.qubit, e.basis, e.outcome)


def realize_outcomes(setup: QuantumSetup, seed: int | np.random.Generator) -> tuple[MeasurementEvent, ...]:
    """Draw every unforced outcome by the Born rule, in causal order.

    Forced outcomes are kept and projected on. Returned events keep the
    declaration order of ``setup.measurements``.
    """
    rng = make_rng(seed)
    state = setup.initial
    done = {}
    for e in _causal_sequence(setup.measurements):
        if e.realized:
            outcome = e.outcome
        else:
            vecs = resolve_basis(e.basis)
            branch = _component(state, e.qubit, vecs[0])
            p0 = float(np.vdot(branch, branch).real)
            outcome = 0 if rng.random() < p0 else 1
        state = project_onto(state, e.qubit, e.basis, outcome)
        done[id(e)] = e if e.outcome == outcome else replace(e, outcome=outcome)
    return tuple(done[id(e)] for e in setup.measurements)


@dataclass(frozen=True)
class StateAssignment:
    point: SpacetimePoint | None
    state: QuantumRegister
    applied_events: tuple[MeasurementEvent, ...]
    frame: str | None = None
    frame_time: Real | None = None


def state_at(setup: QuantumSetup, realized: Sequence[MeasurementEvent],
             q: SpacetimePoint) -> StateAssignment:
    """Global state at ``q``: the projections of exactly the measurements in
    the closed causal past of ``q``."""
    applied = tuple(e for e in realized if in_future_cone(e.location, q, setup.c, setup.eps))
    return StateAssignment(q, apply_measurements(setup.initial, applied), applied)


def state_in_frame(setup: QuantumSetup, realized: Sequence[MeasurementEvent],
                   frame: Frame, time: Real) -> StateAssignment:
    """Conventional hyperplane-dependent assignment: every measurement at or
    before ``time`` in ``frame`` has been applied."""
    applied = tuple(
        e for e in realized
        if simultaneity_coordinate(frame, e.location, setup.c) <= time + setup.eps
    )
    return StateAssignment(None, apply_measurements(setup.initial, applied), applied,
                           frame.label, time)


@dataclass(frozen=True)
class QuantumSignalingReport:
    point: SpacetimePoint
    measurement: str
    keep: tuple[int, ...]
    selective_deviation: float
    ensemble_deviation: float
    tol: float = NORM_TOL

    @property
    def ok(self) -> bool:
        return self.selective_deviation <= self.tol and self.ensemble_deviation <= self.tol


def no_signaling_quantum(setup: QuantumSetup, realized: Sequence[MeasurementEvent], index: int,
                         q: SpacetimePoint, keep: Sequence[int],
                         alternatives: Sequence[BasisSpec] = ("x", "y", "z")) -> QuantumSignalingReport:
    """How much the reduced state of ``keep`` at ``q`` depends on measurement ``index``.

    ``selective_deviation``: swap the measurement's basis and outcome for each
    alternative and recompute the per-point state at ``q``.
    ``ensemble_deviation``: apply the measurement to the state at ``q`` and
    average over its outcomes with Born weights; the remote reduced state must
    not move.
    """
    keep = tuple(keep)
    target = realized[index]
    if target.qubit in keep:
        raise ValueError("the measured qubit cannot be among the kept qubits")
    reference = reduced_density(state_at(setup, realized, q).state, keep)
    selective = 0.0
    for basis in alternatives:
        for outcome in (0, 1):
            variant = list(realized)
            variant[index] = replace(target, basis=basis, outcome=outcome)
            try:
                rho = reduced_density(state_at(setup, variant, q).state, keep)
            except ModelInconsistencyError:
                continue  # that outcome is impossible; nothing to compare
            selective = max(selective, float(np.max(np.abs(rho - reference))))
    others = [e for i, e in enumerate(realized) if i != index]
    base = state_at(setup, others, q).state
    rho_base = reduced_density(base, keep)
    ensemble = 0.0
    for basis in alternatives:
        avg = np.zeros_like(rho_base)
        for outcome, p in enumerate(born_probabilities(base, target.qubit, basis)):
            if p > PROB_FLOOR:
                avg += p * reduced_density(project_onto(base, target.qubit, basis, outcome), keep)
        ensemble = max(ensemble, float(np.max(np.abs(avg - rho_base))))
    return QuantumSignalingReport(q, target.label(), keep, selective, ensemble)


def box_from_state(r: QuantumRegister, alice_bases: Sequence[BasisSpec],
                   bob_bases: Sequence[BasisSpec], qubits: tuple[int, int] = (0, 1)) -> Box:
    """Born-rule box ``p(a, b | x, y)`` for local measurements on two qubits."""
    qa, qb = qubits
    table = {}
    for x, y in itertools.product((0, 1), repeat=2):
        for a, pa in enumerate(born_probabilities(r, qa, alice_bases[x])):
            if pa <= PROB_FLOOR:
                for b in (0, 1):
                    table[(a, b, x, y)] = 0.0
                continue
            after = project_onto(r, qa, alice_bases[x], a)
            for b, pb in enumerate(born_probabilities(after, qb, bob_bases[y])):
                table[(a, b, x, y)] = pa * pb
    return Box(table)
