"""CHSH correlator: the local-hidden-variable bound and the singlet optimum."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

TSIRELSON = 2 * math.sqrt(2)


@dataclass(frozen=True)
class CorrelationTable:
    """E(a,b), E(a,b'), E(a',b), E(a',b')."""

    ab: float
    ab_prime: float
    a_prime_b: float
    a_prime_b_prime: float

    def __post_init__(self) -> None:
        for value in (self.ab, self.ab_prime, self.a_prime_b, self.a_prime_b_prime):
            if not (math.isfinite(value) and -1 <= value <= 1):
                raise ValidationError(f"correlation {value!r} outside [-1, 1]")


def chsh_value(c: CorrelationTable):
    return abs(c.ab + c.ab_prime + c.a_prime_b - c.a_prime_b_prime)


def deterministic_strategies():
    """All 16 assignments of +-1 outcomes to (a, a', b, b')."""
    return list(itertools.product((1, -1), repeat=4))


def strategy_table(a: int, a_prime: int, b: int, b_prime: int) -> CorrelationTable:
    return CorrelationTable(a * b, a * b_prime, a_prime * b, a_prime * b_prime)


def lhv_max() -> int:
    """Largest CHSH value over deterministic local strategies (exactly 2)."""
    return max(chsh_value(strategy_table(*s)) for s in deterministic_strategies())


def singlet_correlation(theta_a: float, theta_b: float) -> float:
    if not (math.isfinite(theta_a) and math.isfinite(theta_b)):
        raise ValidationError("angles must be finite")
    return -math.cos(theta_a - theta_b)


def singlet_table(a: float, a_prime: float, b: float, b_prime: float) -> CorrelationTable:
    return CorrelationTable(
        singlet_correlation(a, b),
        singlet_correlation(a, b_prime),
        singlet_correlation(a_prime, b),
        singlet_correlation(a_prime, b_prime),
    )


OPTIMAL_ANGLES = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)


def _grid_best(a_vals, ap_vals, b_vals, bp_vals):
    """Exhaustive max of the singlet CHSH value over a product of angle sets."""
    best, arg = -1.0, None
    b = np.asarray(b_vals)[:, None]
    bp = np.asarray(bp_vals)[None, :]
    for a in a_vals:
        e_ab = -np.cos(a - b)
        e_abp = -np.cos(a - bp)
        for ap in ap_vals:
            s = np.abs(e_ab + e_abp - np.cos(ap - b) + np.cos(ap - bp))
            k = int(np.argmax(s))
            if s.flat[k] > best:
                i, j = divmod(k, s.shape[1])
                best, arg = float(s.flat[k]), (float(a), float(ap), float(b_vals[i]), float(bp_vals[j]))
    return best, arg


def grid_search(n_angles: int = 360, refine: int = 0, fix_first: bool = True):
    """Maximise the singlet CHSH value over an ``n_angles``-point grid per setting.

    The value depends only on angle differences, and a uniform circular grid
    is closed under rotation by one step, so pinning ``a = 0`` gives exactly
    the full ``n^4`` grid maximum at ``n^3`` cost. ``refine`` rounds of
    coarse-to-fine search then shrink a 9-point local grid around the best
    point. Returns ``(value, (a, a', b, b'))``.
    """
    grid = np.arange(n_angles) * (2 * math.pi / n_angles)
    a_vals = grid[:1] if fix_first else grid
    best, arg = _grid_best(a_vals, grid, grid, grid)
    step = 2 * math.pi / n_angles
    for _ in range(refine):
        local = [np.array(x + step * np.linspace(-1, 1, 9)) for x in arg]
        if fix_first:
            local[0] = np.array([arg[0]])
        cand, cand_arg = _grid_best(*local)
        if cand > best:
            best, arg = cand, cand_arg
        step /= 4
    return best, arg
