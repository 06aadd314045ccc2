"""TRNG tick processes and correlated-randomness propensity models.

Joint tables are held as exact :class:`fractions.Fraction` values whenever the
input is rational, so the conditional propensities come out exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .determinacy import DeterminationEvent, Determinations
from .errors import ModelInconsistencyError
from .spacetime import EPS_GEOM, Real, SpacetimePoint, Worldline, gamma

Prob = Union[Fraction, float]
Outcome = tuple[int, ...]

NORM_TOL = 1e-12
SEED_BITS = 64


def as_probability(value) -> Prob:
    """Parse ``"3/8"``, ints and Fractions exactly; floats stay floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("probability cannot be a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return float(value)


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**SEED_BITS:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class TrngProcess:
    """A generator riding ``worldline`` that emits one bit per ``proper_period``
    of its own proper time, starting one period after the anchor."""

    variable_prefix: str
    worldline: Worldline
    proper_period: Real = 1
    marginal: Prob = Fraction(1, 2)
    bits: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.proper_period > 0:
            raise ValueError("proper_period must be positive")
        if not 0 <= self.marginal <= 1:
            raise ValueError("marginal must lie in [0, 1]")

    def bit_name(self, k: int) -> str:
        """Variable name of the k-th tick (1-based)."""
        if k <= len(self.bits):
            return self.bits[k - 1]
        return f"{self.variable_prefix}{k}"


def coordinate_period(p: TrngProcess, c: Real = 1) -> Real:
    """Rest-frame time between ticks: the proper period dilated by gamma."""
    if p.worldline.velocity == 0:
        return p.proper_period
    return gamma(p.worldline.velocity, c) * p.proper_period


def tick_events(p: TrngProcess, horizon: Real, c: Real = 1,
                eps: float = EPS_GEOM) -> list[SpacetimePoint]:
    anchor = p.worldline.anchor
    if not horizon > anchor.t:
        raise ValueError("horizon must lie after the worldline anchor")
    period = coordinate_period(p, c)
    ticks = []
    for k in itertools.count(1):
        t = anchor.t + k * period
        if t > horizon + eps:
            break
        ticks.append(p.worldline.at(t))
    return ticks


@dataclass(frozen=True)
class CorrelationModel:
    """Joint propensities over binary variables.

    ``joint`` maps outcome tuples, ordered like ``variables``, to
    propensities; missing tuples have propensity zero. ``marginals`` optionally
    declares ``P(v = 1)`` per variable for consistency checking.
    """

    variables: tuple[str, ...]
    joint: Mapping[Outcome, Prob]
    marginals: Mapping[str, Prob] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "joint", {tuple(k): as_probability(v) for k, v in self.joint.items()})
        object.__setattr__(self, "marginals", {k: as_probability(v) for k, v in self.marginals.items()})

    @classmethod
    def independent(cls, variable: str, p_one: Prob = Fraction(1, 2)) -> CorrelationModel:
        p_one = as_probability(p_one)
        return cls((variable,), {(0,): 1 - p_one, (1,): p_one})

    @classmethod
    def agreement(cls, a: str, b: str, p_equal: Prob = Fraction(3, 4)) -> CorrelationModel:
        """Two uniformly random bits that agree with propensity ``p_equal``."""
        p_equal = as_probability(p_equal)
        same, diff = p_equal / 2, (1 - p_equal) / 2
        return cls((a, b), {(0, 0): same, (1, 1): same, (0, 1): diff, (1, 0): diff})

    def outcomes(self) -> list[Outcome]:
        return list(itertools.product((0, 1), repeat=len(self.variables)))

    def p(self, outcome: Outcome) -> Prob:
        return self.joint.get(tuple(outcome), Fraction(0))

    def probability(self, given: Mapping[str, int]) -> Prob:
        """Total propensity of outcomes consistent with the partial assignment."""
        idx = {v: i for i, v in enumerate(self.variables)}
        return sum(
            (self.p(o) for o in self.outcomes() if all(o[idx[v]] == b for v, b in given.items())),
            Fraction(0),
        )

    def marginal(self, variable: str) -> Prob:
        return self.probability({variable: 1})

    def conditional(self, variable: str, value: int, given: Mapping[str, int]) -> Prob:
        given = {v: b for v, b in given.items() if v in self.variables}
        denom = self.probability(given)
        if denom == 0:
            raise ModelInconsistencyError(
                f"conditioning on {given} has propensity zero in the joint table"
            )
        if variable in given:
            return Fraction(int(given[variable] == value))
        return self.probability({**given, variable: value}) / denom


@dataclass(frozen=True)
class ModelReport:
    violations: tuple[str, ...]
    marginals: dict

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_model(m: CorrelationModel, tol: float = NORM_TOL) -> ModelReport:
    issues = []
    n = len(m.variables)
    if len(set(m.variables)) != n:
        issues.append(f"duplicate variables in {m.variables}")
    for key, value in m.joint.items():
        if len(key) != n or any(b not in (0, 1) for b in key):
            issues.append(f"outcome {key} is not a {n}-bit tuple")
        if not 0 <= value <= 1:
            issues.append(f"propensity of {key} is {value}, outside [0, 1]")
    total = sum(m.joint.values(), Fraction(0))
    if abs(total - 1) > tol:
        issues.append(f"normalization: propensities sum to {total}, not 1")
    marginals = {v: m.marginal(v) for v in m.variables} if not issues else {}
    for v, declared in m.marginals.items():
        if v not in m.variables:
            issues.append(f"marginal declared for unknown variable {v!r}")
        elif marginals and abs(marginals[v] - declared) > tol:
            issues.append(f"marginal of {v}: joint gives {marginals[v]}, declared {declared}")
    return ModelReport(tuple(issues), marginals)


@dataclass(frozen=True)
class PropensityAssignment:
    variable: str
    value: int
    point: SpacetimePoint
    propensity: Prob
    conditioned_on: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 <= self.propensity <= 1:
            raise ValueError(f"propensity {self.propensity} outside [0, 1]")

    @property
    def determinate(self) -> bool:
        return self.propensity in (0, 1) and self.variable in self.conditioned_on


@dataclass(frozen=True)
class ClassicalSetup:
    """Where each random variable is determined and which model governs it."""

    models: tuple[CorrelationModel, ...]
    locations: Mapping[str, SpacetimePoint]

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        seen = set()
        for m in self.models:
            for v in m.variables:
                if v in seen:
                    raise ModelInconsistencyError(f"variable {v!r} appears in more than one model")
                if v not in self.locations:
                    raise ModelInconsistencyError(f"variable {v!r} has no determination location")
                seen.add(v)

    def model_of(self, variable: str) -> CorrelationModel | None:
        for m in self.models:
            if variable in m.variables:
                return m
        return None


def draw(m: CorrelationModel, rng: np.random.Generator,
         fixed: Mapping[str, int] | None = None) -> Outcome:
    """Draw one outcome tuple, conditioned on any ``fixed`` values."""
    fixed = {v: b for v, b in (fixed or {}).items() if v in m.variables}
    idx = {v: i for i, v in enumerate(m.variables)}
    allowed = [o for o in m.outcomes() if all(o[idx[v]] == b for v, b in fixed.items())]
    weights = [float(m.p(o)) for o in allowed]
    total = math.fsum(weights)
    if total <= 0:
        raise ModelInconsistencyError(f"fixed values {fixed} have propensity zero")
    u = rng.random() * total
    acc = 0.0
    for o, w in zip(allowed, weights):
        acc += w
        if u < acc and w > 0:
            return o
    return next(o for o, w in zip(reversed(allowed), reversed(weights)) if w > 0)


def sample(setup: ClassicalSetup, seed: int | np.random.Generator,
           fixed: Mapping[str, int] | None = None) -> tuple[DeterminationEvent, ...]:
    """Realize every modelled variable; deterministic for a given seed."""
    rng = make_rng(seed)
    events = []
    for m in setup.models:
        outcome = draw(m, rng, fixed)
        events.extend(
            DeterminationEvent(v, b, setup.locations[v]) for v, b in zip(m.variables, outcome)
        )
    return tuple(events)


def propensity_at(setup: ClassicalSetup, d: Determinations, claim: tuple[str, int],
                  q: SpacetimePoint) -> PropensityAssignment:
    """Propensity of ``variable = value`` at ``q``, conditioned on exactly the
    determination events in the closed causal past of ``q``."""
    variable, value = claim
    d.event(variable)  # raises on undeclared variables
    m = setup.model_of(variable)
    if m is None:
        raise ModelInconsistencyError(f"no propensity model covers {variable!r}")
    past = [e for e in d.past_of(q) if e.variable in m.variables]
    given = {e.variable: e.value for e in past}
    prob = m.conditional(variable, value, given)
    return PropensityAssignment(variable, value, q, prob, tuple(sorted(given)))


def frequency(events_list: Iterable[Sequence[DeterminationEvent]], predicate) -> float:
    """Fraction of realizations whose value map satisfies ``predicate``."""
    hits = total = 0
    for evs in events_list:
        total += 1
        hits += bool(predicate({e.variable: e.value for e in evs}))
    return hits / total if total else math.nan
