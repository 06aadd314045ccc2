"""1+1D special-relativistic kinematics.

Coordinates are ``(t, x)`` in minutes and light-minutes; ``c`` defaults to 1.
Every function is pure. Functions that need no square root (intervals, cone
membership, worldline positions, simultaneity intersections) work unchanged
on :class:`fractions.Fraction` inputs, which gives an exact rational path for
the geometric checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import SuperluminalError

Real = Union[float, int, Fraction]

#: absolute tolerance for cone membership and simultaneity comparisons
EPS_GEOM = 1e-9
REST = "rest"


def _check_subluminal(v: Real, c: Real) -> None:
    if not abs(v) < c:
        raise SuperluminalError(f"|v| = {abs(v)} must be strictly below c = {c}")


def _div(n: Real, d: Real) -> Real:
    """Quotient that stays rational when both operands are."""
    if isinstance(n, (int, Fraction)) and isinstance(d, (int, Fraction)):
        return Fraction(n) / d
    return n / d


def gamma(v: Real, c: Real = 1) -> float:
    """Lorentz factor ``1/sqrt(1 - v^2/c^2)``."""
    _check_subluminal(v, c)
    return 1.0 / math.sqrt(1.0 - float(v) ** 2 / float(c) ** 2)


@dataclass(frozen=True, eq=False)
class SpacetimePoint:
    t: Real
    x: Real
    frame_id: str = REST

    def __post_init__(self):
        for name in ("t", "x"):
            value = getattr(self, name)
            if not math.isfinite(float(value)):
                raise ValueError(f"coordinate {name} must be finite, got {value!r}")

    def isclose(self, other: SpacetimePoint, eps: float = EPS_GEOM) -> bool:
        return (
            self.frame_id == other.frame_id
            and abs(self.t - other.t) <= eps
            and abs(self.x - other.x) <= eps
        )

    # Equality is tolerance based, so the hash may only depend on the frame.
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpacetimePoint):
            return NotImplemented
        return self.isclose(other)

    def __hash__(self) -> int:
        return hash(self.frame_id)

    def __iter__(self):
        yield self.t
        yield self.x

    def __repr__(self) -> str:
        return f"SpacetimePoint(t={self.t!r}, x={self.x!r}, frame_id={self.frame_id!r})"


@dataclass(frozen=True)
class Frame:
    """An inertial frame moving at ``velocity`` relative to the rest frame."""

    velocity: Real
    label: str = REST

    def gamma(self, c: Real = 1) -> float:
        return gamma(self.velocity, c)

    def coordinates(self, p: SpacetimePoint, c: Real = 1) -> SpacetimePoint:
        """Express a rest-frame point in this frame's coordinates."""
        return boost(p, self.velocity, c, frame_id=self.label)

    def to_rest(self, t: Real, x: Real, c: Real = 1) -> SpacetimePoint:
        """Convert coordinates declared in this frame back to the rest frame."""
        return boost(SpacetimePoint(t, x, self.label), -self.velocity, c, frame_id=REST)


@dataclass(frozen=True)
class Worldline:
    """Inertial trajectory ``x(t) = anchor.x + velocity * (t - anchor.t)``."""

    anchor: SpacetimePoint
    velocity: Real = 0

    def __post_init__(self):
        if not math.isfinite(float(self.velocity)):
            raise ValueError(f"worldline velocity must be finite, got {self.velocity!r}")

    # timelike-ness depends on c, which the worldline does not carry
    def check(self, c: Real = 1) -> None:
        _check_subluminal(self.velocity, c)

    def at(self, t: Real) -> SpacetimePoint:
        return worldline_point_at(self, t)

    def cone_entry_time(self, source: SpacetimePoint, c: Real = 1) -> Real:
        """Coordinate time at which this worldline enters the closed future
        cone of ``source``.

        ``c(t - ts) - |x(t) - xs|`` is strictly increasing along a timelike
        worldline, so the entry is the larger root of its two linear pieces.
        """
        self.check(c)
        a = self.anchor
        u = self.velocity
        ts, xs = source.t, source.x
        # piece where x(t) >= xs:  c(t - ts) = x(t) - xs
        right = _div(c * ts + a.x - u * a.t - xs, c - u)
        # piece where x(t) <= xs:  c(t - ts) = xs - x(t)
        left = _div(c * ts + xs - a.x + u * a.t, c + u)
        return max(right, left)


class CausalKind(str, enum.Enum):
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"


class CausalOrder(str, enum.Enum):
    FIRST_PRECEDES_SECOND = "first-precedes-second"
    SECOND_PRECEDES_FIRST = "second-precedes-first"
    NONE = "none"


@dataclass(frozen=True)
class CausalRelation:
    kind: CausalKind
    order: CausalOrder

    def __post_init__(self):
        if self.kind is CausalKind.SPACELIKE and self.order is not CausalOrder.NONE:
            raise ValueError("spacelike separation carries no causal order")


def _same_frame(p: SpacetimePoint, q: SpacetimePoint) -> None:
    if p.frame_id != q.frame_id:
        raise ValueError(
            f"points declared in different frames ({p.frame_id!r} vs {q.frame_id!r}); "
            "convert first"
        )


def boost(p: SpacetimePoint, v: Real, c: Real = 1, frame_id: str | None = None) -> SpacetimePoint:
    """Coordinates of ``p`` in a frame moving at ``v`` relative to ``p``'s frame.

    >>> boost(SpacetimePoint(1, 0), 0)
    SpacetimePoint(t=1, x=0, frame_id='rest')
    """
    _check_subluminal(v, c)
    if frame_id is None:
        frame_id = p.frame_id if v == 0 else f"{p.frame_id}>boost({float(v):.17g})"
    if v == 0:
        return SpacetimePoint(p.t, p.x, frame_id)
    g = gamma(v, c)
    t = g * (p.t - v * p.x / c**2)
    x = g * (p.x - v * p.t)
    return SpacetimePoint(t, x, frame_id)


def interval(p: SpacetimePoint, q: SpacetimePoint, c: Real = 1) -> Real:
    """Squared interval ``c^2 dt^2 - dx^2``; positive means timelike."""
    _same_frame(p, q)
    dt = q.t - p.t
    dx = q.x - p.x
    return c**2 * dt**2 - dx**2


def _cone_margin(p: SpacetimePoint, q: SpacetimePoint, c: Real) -> Real:
    return c * (q.t - p.t) - abs(q.x - p.x)


def causal_relation(p: SpacetimePoint, q: SpacetimePoint, c: Real = 1,
                    eps: float = EPS_GEOM) -> CausalRelation:
    """Classify the separation of ``p`` and ``q``.

    The light cone is closed: lightlike pairs are causally ordered. The
    lightlike band is ``| c|dt| - |dx| | <= eps``.
    """
    _same_frame(p, q)
    dt = q.t - p.t
    margin = c * abs(dt) - abs(q.x - p.x)
    if margin < -eps:
        return CausalRelation(CausalKind.SPACELIKE, CausalOrder.NONE)
    kind = CausalKind.LIGHTLIKE if margin <= eps else CausalKind.TIMELIKE
    if dt > 0:
        order = CausalOrder.FIRST_PRECEDES_SECOND
    elif dt < 0:
        order = CausalOrder.SECOND_PRECEDES_FIRST
    else:
        # coincident events within tolerance
        order = CausalOrder.NONE
    return CausalRelation(kind, order)


def in_future_cone(source: SpacetimePoint, q: SpacetimePoint, c: Real = 1,
                   eps: float = EPS_GEOM) -> bool:
    """True iff ``q`` lies in the closed future light cone of ``source``."""
    _same_frame(source, q)
    return q.t - source.t >= -eps and _cone_margin(source, q, c) >= -eps


def simultaneity_coordinate(f: Frame, p: SpacetimePoint, c: Real = 1) -> Real:
    """Time coordinate of rest-frame point ``p`` in frame ``f``."""
    if f.velocity == 0:
        return p.t
    return gamma(f.velocity, c) * (p.t - f.velocity * p.x / c**2)


def simultaneous(f: Frame, p: SpacetimePoint, q: SpacetimePoint, c: Real = 1,
                 eps: float = EPS_GEOM) -> bool:
    return abs(simultaneity_coordinate(f, p, c) - simultaneity_coordinate(f, q, c)) <= eps


def simultaneity_intersection(f: Frame, through: SpacetimePoint, w: Worldline,
                              c: Real = 1) -> SpacetimePoint:
    """Point where ``w`` crosses the plane of ``f``-simultaneity through ``through``.

    Solves ``t - v x(t) / c^2 = t_p - v x_p / c^2`` directly, without the
    common factor gamma, so rational inputs give a rational answer.
    """
    v, u, a = f.velocity, w.velocity, w.anchor
    _check_subluminal(v, c)
    w.check(c)
    c2 = c * c
    t = _div(c2 * through.t - v * through.x + v * (a.x - u * a.t), c2 - v * u)
    return worldline_point_at(w, t)


def worldline_point_at(w: Worldline, t: Real) -> SpacetimePoint:
    a = w.anchor
    return SpacetimePoint(t, a.x + w.velocity * (t - a.t), a.frame_id)


def compose_velocities(v1: Real, v2: Real, c: Real = 1) -> Real:
    """Relativistic velocity addition ``(v1 + v2) / (1 + v1 v2 / c^2)``."""
    _check_subluminal(v1, c)
    _check_subluminal(v2, c)
    c2 = c * c
    return _div(c2 * (v1 + v2), c2 + v1 * v2)
