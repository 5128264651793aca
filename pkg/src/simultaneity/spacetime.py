"""Flat 1+1 dimensional kinematics in natural units (c = 1).

Times are in seconds (or any unit) and positions in the matching light-unit,
so a light ray satisfies |dx| == |dt|.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

LIGHTLIKE_RTOL = 1e-9
SIMULTANEITY_ATOL = 1e-12


class IntervalClass(enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


class Ordering(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    SIMULTANEOUS = "simultaneous"


def _check_finite(*values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise ValidationError(f"non-finite coordinate: {value!r}")


def _check_velocity(v: float) -> None:
    _check_finite(v)
    if abs(v) >= 1:
        raise DomainError(f"superluminal frame: |v| = {abs(v)} >= 1")


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float

    def __post_init__(self) -> None:
        _check_finite(self.t, self.x)

    def __sub__(self, other: SpacetimeEvent) -> tuple[float, float]:
        return (self.t - other.t, self.x - other.x)


@dataclass(frozen=True)
class Boost:
    """Frame moving at velocity ``v`` (fraction of c) relative to the rest frame."""

    v: float

    def __post_init__(self) -> None:
        _check_velocity(self.v)

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.v * self.v)

    def apply(self, delta: tuple[float, float]) -> tuple[float, float]:
        return boost(delta, self.v)


def lorentz_factor(v: float) -> float:
    _check_velocity(v)
    return 1.0 / math.sqrt(1.0 - v * v)


def boost(delta: tuple[float, float], v: float) -> tuple[float, float]:
    """Return ``(dt', dx')`` of a coordinate difference seen from a frame at velocity ``v``."""
    dt, dx = delta
    _check_finite(dt, dx)
    g = lorentz_factor(v)
    return (g * (dt - v * dx), g * (dx - v * dt))


def boost_many(dt, dx, v) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`boost` over broadcastable arrays."""
    dt = np.asarray(dt, dtype=float)
    dx = np.asarray(dx, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(dt)) and np.all(np.isfinite(dx)) and np.all(np.isfinite(v))):
        raise ValidationError("non-finite coordinate in array input")
    if np.any(np.abs(v) >= 1):
        raise DomainError("superluminal frame: some |v| >= 1")
    g = 1.0 / np.sqrt(1.0 - v * v)
    return g * (dt - v * dx), g * (dx - v * dt)


def compose_velocities(v1: float, v2: float) -> float:
    _check_velocity(v1)
    _check_velocity(v2)
    return (v1 + v2) / (1.0 + v1 * v2)


def interval(delta: tuple[float, float]) -> float:
    """Squared interval dt^2 - dx^2 (positive for timelike separation)."""
    dt, dx = delta
    return dt * dt - dx * dx


def classify_interval(delta: tuple[float, float]) -> IntervalClass:
    dt, dx = delta
    _check_finite(dt, dx)
    s2 = dt * dt - dx * dx
    if abs(s2) <= LIGHTLIKE_RTOL * max(dt * dt, dx * dx, 1.0):
        return IntervalClass.LIGHTLIKE
    return IntervalClass.TIMELIKE if s2 > 0 else IntervalClass.SPACELIKE


def _sign_order(dt: float) -> Ordering:
    # dt is t(e2) - t(e1): positive means e1 came first.
    if abs(dt) < SIMULTANEITY_ATOL:
        return Ordering.SIMULTANEOUS
    return Ordering.BEFORE if dt > 0 else Ordering.AFTER


def order_in_frame(e1: SpacetimeEvent, e2: SpacetimeEvent, v: float) -> Ordering:
    """Order of ``e1`` relative to ``e2`` in the frame moving at ``v``.

    ``Ordering.BEFORE`` means e1 precedes e2 in that frame.
    """
    dt_prime, _ = boost(e2 - e1, v)
    return _sign_order(dt_prime)
