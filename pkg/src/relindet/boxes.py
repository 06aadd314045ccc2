"""Bipartite binary-input, binary-output boxes ``p(a, b | x, y)``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .determinacy import Determinations
from .errors import ModelInconsistencyError
from .randomness import CorrelationModel, Prob, PropensityAssignment, as_probability
from .spacetime import SpacetimePoint

BITS = (0, 1)
TOL = 1e-12
Key = tuple[int, int, int, int]  # (a, b, x, y)


@dataclass(frozen=True)
class Box:
    table: Mapping[Key, Prob]

    def __post_init__(self):
        full = {}
        for a, b, x, y in itertools.product(BITS, repeat=4):
            full[(a, b, x, y)] = as_probability(self.table.get((a, b, x, y), Fraction(0)))
        object.__setattr__(self, "table", full)

    def p(self, a: int, b: int, x: int, y: int) -> Prob:
        return self.table[(a, b, x, y)]

    @classmethod
    def from_array(cls, entries: Sequence) -> Box:
        """Build from 16 entries in lexicographic ``(x, y, a, b)`` order."""
        if len(entries) != 16:
            raise ValueError(f"a box table has 16 entries, got {len(entries)}")
        keys = itertools.product(BITS, repeat=4)
        return cls({(a, b, x, y): as_probability(v) for (x, y, a, b), v in zip(keys, entries)})

    def to_array(self) -> list[Prob]:
        return [self.p(a, b, x, y) for x, y, a, b in itertools.product(BITS, repeat=4)]

    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.table.values())

    def marginal_a(self, a: int, x: int, y: int) -> Prob:
        return self.p(a, 0, x, y) + self.p(a, 1, x, y)

    def marginal_b(self, b: int, x: int, y: int) -> Prob:
        return self.p(0, b, x, y) + self.p(1, b, x, y)

    def given_inputs(self, x: int, y: int, names: tuple[str, str] = ("a", "b")) -> CorrelationModel:
        """The joint over outputs for fixed inputs, as a correlation model."""
        return CorrelationModel(names, {(a, b): self.p(a, b, x, y) for a in BITS for b in BITS})

    def swapped(self) -> Box:
        """Relabel the parties: ``(a, x) <-> (b, y)``."""
        return Box({(b, a, y, x): v for (a, b, x, y), v in self.table.items()})

    def to_numpy(self) -> np.ndarray:
        return np.array([float(v) for v in self.to_array()])


def validate_box(b: Box, tol: float = TOL) -> list[str]:
    issues = []
    for key, v in b.table.items():
        if not 0 <= v <= 1:
            issues.append(f"p{key} = {v} outside [0, 1]")
    for x, y in itertools.product(BITS, repeat=2):
        s = sum((b.p(a, bb, x, y) for a in BITS for bb in BITS), Fraction(0))
        if abs(s - 1) > tol:
            issues.append(f"outputs for inputs (x={x}, y={y}) sum to {s}, not 1")
    return issues


def pr_box() -> Box:
    """Outputs satisfy ``a xor b = x*y`` with uniform marginals."""
    half = Fraction(1, 2)
    return Box({
        (a, b, x, y): half if (a ^ b) == x * y else Fraction(0)
        for a, b, x, y in itertools.product(BITS, repeat=4)
    })


def deterministic_box(fa: Sequence[int], fb: Sequence[int]) -> Box:
    """Local deterministic strategy ``a = fa[x]``, ``b = fb[y]``."""
    return Box({
        (a, b, x, y): Fraction(int(a == fa[x] and b == fb[y]))
        for a, b, x, y in itertools.product(BITS, repeat=4)
    })


def local_strategies() -> list[Box]:
    funcs = list(itertools.product(BITS, repeat=2))
    return [deterministic_box(fa, fb) for fa in funcs for fb in funcs]


def uniform_box() -> Box:
    return Box({k: Fraction(1, 4) for k in itertools.product(BITS, repeat=4)})


@dataclass(frozen=True)
class SignalingViolation:
    side: str  # the party whose marginal moved
    outcome: int
    own_input: int
    magnitude: Prob

    def __str__(self) -> str:
        other = "y" if self.side == "A" else "x"
        own = "x" if self.side == "A" else "y"
        return (f"marginal of {self.side} outcome {self.outcome} at {own}={self.own_input} "
                f"changes by {self.magnitude} with {other}")


@dataclass(frozen=True)
class SignalingReport:
    violations: tuple[SignalingViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def no_signaling_check(b: Box, tol: float = TOL) -> SignalingReport:
    found = []
    for out, own in itertools.product(BITS, repeat=2):
        gap = abs(b.marginal_a(out, own, 0) - b.marginal_a(out, own, 1))
        if gap > tol:
            found.append(SignalingViolation("A", out, own, gap))
        gap = abs(b.marginal_b(out, 0, own) - b.marginal_b(out, 1, own))
        if gap > tol:
            found.append(SignalingViolation("B", out, own, gap))
    return SignalingReport(tuple(found))


def correlator(b: Box, x: int, y: int) -> Prob:
    return sum(((-1) ** (a ^ bb) * b.p(a, bb, x, y) for a in BITS for bb in BITS), Fraction(0))


def chsh_value(b: Box) -> Prob:
    """``S = sum_xy (-1)^(x y) E_xy``."""
    return sum(((-1) ** (x * y) * correlator(b, x, y) for x in BITS for y in BITS), Fraction(0))


def chsh_variants(b: Box) -> list[Prob]:
    """The eight relabelled CHSH expressions; a box is local iff all are <= 2."""
    values = []
    for odd in itertools.product(BITS, repeat=2):
        for sign in (1, -1):
            s = sum(
                ((-1) ** int((x, y) == odd) * correlator(b, x, y) for x in BITS for y in BITS),
                Fraction(0),
            )
            values.append(sign * s)
    return values


@dataclass(frozen=True)
class Locality:
    is_local: bool
    best_S: Prob
    weights: tuple[float, ...] = ()


def local_bound(b: Box, tol: float = 1e-9) -> Locality:
    """Decide membership of ``b`` in the local polytope.

    Feasibility of ``b = sum_k w_k D_k`` over the 16 deterministic strategies
    ``D_k`` with ``w >= 0`` and ``sum w = 1`` is a linear program. ``best_S``
    is the largest of the eight CHSH expressions evaluated on ``b``.
    """
    vertices = np.array([s.to_numpy() for s in local_strategies()]).T  # 16 x 16
    a_eq = np.vstack([vertices, np.ones((1, 16))])
    b_eq = np.concatenate([b.to_numpy(), [1.0]])
    res = linprog(np.zeros(16), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * 16, method="highs")
    best = max(chsh_variants(b))
    if res.status != 0:
        return Locality(False, best)
    if np.max(np.abs(a_eq @ res.x - b_eq)) > tol:
        return Locality(False, best)
    return Locality(True, best, tuple(float(w) for w in res.x))


@dataclass(frozen=True)
class ConditionedBox:
    """``base`` seen from inside the cone of one side's input/outcome pair."""

    base: Box
    side: str
    input: int
    outcome: int

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise ValueError("side must be 'A' or 'B'")
        for remote in BITS:
            if self._local_marginal(remote) == 0:
                raise ModelInconsistencyError(
                    f"side {self.side} outcome {self.outcome} has probability zero "
                    f"for input {self.input}"
                )

    def _local_marginal(self, remote_input: int) -> Prob:
        if self.side == "A":
            return self.base.marginal_a(self.outcome, self.input, remote_input)
        return self.base.marginal_b(self.outcome, remote_input, self.input)

    def _joint(self, other_outcome: int, remote_input: int) -> Prob:
        if self.side == "A":
            return self.base.p(self.outcome, other_outcome, self.input, remote_input)
        return self.base.p(other_outcome, self.outcome, remote_input, self.input)


def condition_box(cb: ConditionedBox, remote_input: int, q_in_cone: bool) -> dict[int, Prob]:
    """Distribution of the other side's outcome given its input.

    Inside the conditioning side's cone: ``p(b | x, y, a) = p(a, b | x, y) / p(a | x)``.
    Elsewhere the plain marginal ``p(b | y)``; for a signaling box the
    marginal is taken at the conditioning side's input.
    """
    if q_in_cone:
        denom = cb._local_marginal(remote_input)
        return {o: cb._joint(o, remote_input) / denom for o in BITS}
    if cb.side == "A":
        return {o: cb.base.marginal_b(o, cb.input, remote_input) for o in BITS}
    return {o: cb.base.marginal_a(o, remote_input, cb.input) for o in BITS}


@dataclass(frozen=True)
class BoxSetup:
    """A box wired into a scenario: the variables holding inputs and outputs."""

    box: Box
    x: str = "x"
    y: str = "y"
    a: str = "a"
    b: str = "b"

    def sides(self):
        return {"A": (self.x, self.a), "B": (self.y, self.b)}


def box_propensity_at(setup: BoxSetup, d: Determinations, claim: tuple[str, int],
                      q: SpacetimePoint) -> PropensityAssignment:
    """Propensity of one box output at ``q``.

    The claimed output's own determination decides it outright once it has
    reached ``q``. Otherwise the other side's (input, output) pair conditions
    the propensity if both have reached ``q``. The claimed side's input is
    the realized setting the outcome is produced with.
    """
    variable, value = claim
    if variable == setup.a:
        own, other_side = "A", "B"
    elif variable == setup.b:
        own, other_side = "B", "A"
    else:
        raise ModelInconsistencyError(f"{variable!r} is not an output of this box")
    own_in = d.event(setup.x if own == "A" else setup.y)
    if own_in is None:
        raise ModelInconsistencyError(f"input for {variable!r} has not been realized")
    own_out = d.event(variable)
    if own_out is not None and d.reaches(own_out, q):
        return PropensityAssignment(variable, value, q, Fraction(int(own_out.value == value)),
                                    (variable,))
    in_var, out_var = setup.sides()[other_side]
    in_ev, out_ev = d.event(in_var), d.event(out_var)
    if (in_ev is not None and out_ev is not None
            and d.reaches(in_ev, q) and d.reaches(out_ev, q)):
        cb = ConditionedBox(setup.box, other_side, in_ev.value, out_ev.value)
        dist = condition_box(cb, own_in.value, True)
        return PropensityAssignment(variable, value, q, dist[value], tuple(sorted((in_var, out_var))))
    # remote setting unknown here; a no-signaling marginal does not depend on it
    remote = in_ev.value if in_ev is not None else 0
    if own == "B":
        p = setup.box.marginal_b(value, remote, own_in.value)
    else:
        p = setup.box.marginal_a(value, own_in.value, remote)
    return PropensityAssignment(variable, value, q, p, ())
