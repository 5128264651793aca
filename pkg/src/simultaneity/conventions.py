"""Synchronisation conventions: Reichenbach epsilon, anisotropic kappa speeds,
the kappa-modified Lorentz factor, and first-order relativistic clock rates.

All functions accept ``float`` or :class:`fractions.Fraction` where the
arithmetic allows it, so callers that need exact results can stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .errors import DomainError, ValidationError

# GPS preset. Values follow Ashby, "Relativity in the Global Positioning
# System", Living Rev. Relativity 6 (2003), rounded as commonly quoted.
SPEED_OF_LIGHT_M_S = 299_792_458.0
GM_EARTH_M3_S2 = 3.986e14  # geocentric gravitational constant
EARTH_RADIUS_M = 6.371e6  # mean Earth radius (ground clock)
GPS_ORBIT_RADIUS_M = 2.6561e7  # semi-major axis of the GPS orbit
GPS_ORBITAL_SPEED_M_S = 3874.0

SECONDS_PER_DAY = 86_400
MICRO = 10**6


class _Instantaneous:
    """One-way speed in the extreme anisotropic case: the leg takes no time.

    Deliberately not a float; arithmetic on it raises so callers branch.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INSTANTANEOUS"

    def __reduce__(self):
        return "INSTANTANEOUS"


INSTANTANEOUS = _Instantaneous()


def check_epsilon(eps: Real) -> Real:
    if not isinstance(eps, Real) or not math.isfinite(eps):
        raise ValidationError(f"epsilon must be a finite real, got {eps!r}")
    if not 0 < eps < 1:
        raise DomainError(f"epsilon must lie in the open interval (0, 1), got {eps}")
    return eps


def check_kappa(kappa: Real) -> Real:
    if not isinstance(kappa, Real) or not math.isfinite(kappa):
        raise ValidationError(f"kappa must be a finite real, got {kappa!r}")
    if not -1 <= kappa <= 1:
        raise DomainError(f"kappa must lie in [-1, 1], got {kappa}")
    return kappa


def reichenbach_assign(t1: Real, t3: Real, eps: Real) -> Real:
    """Timestamp assigned to the remote reflection of a round trip t1 -> t3.

    ``eps = 1/2`` is Einstein's midpoint rule.
    """
    check_epsilon(eps)
    if t3 < t1:
        raise ValidationError(f"non-causal round trip: t3={t3} < t1={t1}")
    return t1 + eps * (t3 - t1)


def kappa_speeds(kappa: Real):
    """One-way light speeds ``(c_plus, c_minus)`` in units of c.

    At ``kappa = +1`` (resp. -1) the forward (resp. backward) speed is
    :data:`INSTANTANEOUS`.
    """
    check_kappa(kappa)
    one = Fraction(1) if isinstance(kappa, Fraction) else 1.0
    c_plus = INSTANTANEOUS if kappa == 1 else one / (1 - kappa)
    c_minus = INSTANTANEOUS if kappa == -1 else one / (1 + kappa)
    return c_plus, c_minus


def travel_time(distance: Real, speed) -> Real:
    """Time to cover ``distance`` at ``speed`` (units of c), zero when instantaneous."""
    if speed is INSTANTANEOUS:
        return 0 * distance
    return distance / speed


def kappa_to_epsilon(kappa: Real) -> Real:
    check_kappa(kappa)
    if abs(kappa) == 1:
        raise DomainError(f"epsilon boundary: kappa={kappa} maps to epsilon outside (0, 1)")
    if isinstance(kappa, (int, Fraction)):
        return Fraction(1 - kappa, 2)
    return (1 - kappa) / 2


def epsilon_to_kappa(eps: Real) -> Real:
    check_epsilon(eps)
    return 1 - 2 * eps


def modified_gamma(v: float, kappa: float) -> float:
    """Anisotropic Lorentz factor (1 - kappa v) / sqrt(1 - v^2)."""
    if not math.isfinite(v) or abs(v) >= 1:
        raise DomainError(f"superluminal frame: |v| = {abs(v)} >= 1")
    check_kappa(kappa)
    return (1 - kappa * v) / math.sqrt(1 - v * v)


@dataclass(frozen=True)
class RelativisticRates:
    """Fractional clock-rate offsets of an orbiting clock against a ground clock."""

    velocity_term: float
    gravity_term: float
    net_per_day: float

    @property
    def velocity_per_day(self) -> float:
        return self.velocity_term * SECONDS_PER_DAY * MICRO

    @property
    def gravity_per_day(self) -> float:
        return self.gravity_term * SECONDS_PER_DAY * MICRO

    def as_dict(self) -> dict:
        return {
            "velocity_term": self.velocity_term,
            "gravity_term": self.gravity_term,
            "velocity_us_per_day": self.velocity_per_day,
            "gravity_us_per_day": self.gravity_per_day,
            "net_us_per_day": self.net_per_day,
        }


def relativistic_rate(v: float, phi_delta: float, c: float = SPEED_OF_LIGHT_M_S) -> RelativisticRates:
    """Weak-field, first-order rate offset: -v^2/(2c^2) + phi_delta/c^2.

    ``phi_delta`` is the potential of the ground clock's position minus that of
    the moving clock, i.e. positive when the moving clock sits higher.
    """
    if c <= 0:
        raise DomainError(f"speed of light must be positive, got {c}")
    if v < 0:
        raise ValidationError(f"speed must be non-negative, got {v}")
    if v >= c:
        raise DomainError(f"superluminal clock: v={v} >= c={c}")
    velocity_term = -(v * v) / (2 * c * c)
    gravity_term = phi_delta / (c * c)
    net = (gravity_term + velocity_term) * SECONDS_PER_DAY * MICRO
    return RelativisticRates(velocity_term, gravity_term, net)


def gps_potential_difference(
    gm: float = GM_EARTH_M3_S2, r_ground: float = EARTH_RADIUS_M, r_orbit: float = GPS_ORBIT_RADIUS_M
) -> float:
    return gm * (1.0 / r_ground - 1.0 / r_orbit)


def gps_rates() -> RelativisticRates:
    """The GPS preset: roughly -7.2, +45.7 and +38.5 microseconds per day."""
    return relativistic_rate(GPS_ORBITAL_SPEED_M_S, gps_potential_difference())
