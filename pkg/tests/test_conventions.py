import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from simultaneity import conventions as cv
from simultaneity.errors import DomainError, ValidationError

open_unit = st.floats(1e-9, 1 - 1e-9)


def test_einstein_midpoint():
    assert cv.reichenbach_assign(0, 10, 0.5) == 5


def test_reichenbach_direct_evaluation():
    assert cv.reichenbach_assign(2, 12, Fraction(1, 5)) == 4


@pytest.mark.parametrize("eps", [1e-12, 1 - 1e-12])
def test_reichenbach_stays_inside_round_trip(eps):
    assert 0 < cv.reichenbach_assign(0, 10, eps) < 10


@pytest.mark.parametrize("eps", [0, 1, -0.1, 1.5])
def test_epsilon_domain(eps):
    with pytest.raises(DomainError):
        cv.reichenbach_assign(0, 10, eps)


def test_non_causal_round_trip():
    with pytest.raises(ValidationError, match="non-causal"):
        cv.reichenbach_assign(5, 4, 0.5)


@given(st.integers(-10**9, 10**9), st.integers(0, 10**9), open_unit, open_unit)
def test_reichenbach_monotone_and_conserving(t1, span, e1, e2):
    t3 = t1 + span
    lo, hi = sorted((e1, e2))
    assert cv.reichenbach_assign(t1, t3, lo) <= cv.reichenbach_assign(t1, t3, hi)
    # outbound leg plus implied return leg equals the round trip, exactly
    eps = Fraction(lo)
    tb = cv.reichenbach_assign(t1, t3, eps)
    assert (tb - t1) + (t3 - tb) == t3 - t1


def test_kappa_speeds():
    assert cv.kappa_speeds(0) == (1, 1)
    assert cv.kappa_speeds(1) == (cv.INSTANTANEOUS, 0.5)
    assert cv.kappa_speeds(-1) == (0.5, cv.INSTANTANEOUS)
    c_plus, c_minus = cv.kappa_speeds(Fraction(1, 2))
    assert (c_plus, c_minus) == (2, Fraction(2, 3))
    assert 2 * c_plus * c_minus / (c_plus + c_minus) == 1


def test_instantaneous_is_not_a_number():
    with pytest.raises(TypeError):
        cv.INSTANTANEOUS + 1
    assert cv.travel_time(5.0, cv.INSTANTANEOUS) == 0


@pytest.mark.parametrize("kappa", [1.0001, -2])
def test_kappa_domain(kappa):
    with pytest.raises(DomainError):
        cv.kappa_speeds(kappa)


@given(st.floats(-1, 1), st.floats(1e-3, 1e3))
def test_round_trip_speed_is_c(kappa, distance):
    c_plus, c_minus = cv.kappa_speeds(kappa)
    total = cv.travel_time(distance, c_plus) + cv.travel_time(distance, c_minus)
    assert total == pytest.approx(2 * distance, rel=1e-12)


def test_kappa_to_epsilon_examples():
    assert cv.kappa_to_epsilon(0) == Fraction(1, 2)
    assert cv.kappa_to_epsilon(0.6) == pytest.approx(0.2)
    assert cv.kappa_to_epsilon(-0.6) == pytest.approx(0.8)
    assert cv.kappa_to_epsilon(Fraction(3, 5)) == Fraction(1, 5)


def test_kappa_to_epsilon_travel_time_oracle():
    # outbound light time d/c_plus over round trip 2d/c
    for kappa in np.linspace(-0.95, 0.95, 39):
        c_plus, _ = cv.kappa_speeds(float(kappa))
        assert cv.kappa_to_epsilon(float(kappa)) == pytest.approx((1.0 / c_plus) / 2.0, rel=1e-12)


@pytest.mark.parametrize("kappa", [1, -1])
def test_kappa_to_epsilon_boundary(kappa):
    with pytest.raises(DomainError, match="epsilon boundary"):
        cv.kappa_to_epsilon(kappa)


@given(st.floats(-1 + 1e-9, 1 - 1e-9))
def test_kappa_epsilon_inverse(kappa):
    assert cv.epsilon_to_kappa(cv.kappa_to_epsilon(kappa)) == pytest.approx(kappa, abs=1e-15)


def test_modified_gamma_examples():
    assert cv.modified_gamma(0, 0.7) == 1
    assert cv.modified_gamma(0.6, 0) == pytest.approx(1.25, rel=1e-15)
    assert cv.modified_gamma(0.6, 1) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(DomainError):
        cv.modified_gamma(1.0, 0)


def test_modified_gamma_reduces_to_lorentz():
    for v in np.linspace(-0.999, 0.999, 1000):
        assert cv.modified_gamma(float(v), 0) == pytest.approx(1 / math.sqrt(1 - v * v), rel=1e-12)


def test_relativistic_rate_zero():
    r = cv.relativistic_rate(0, 0)
    assert (r.velocity_term, r.gravity_term, r.net_per_day) == (0, 0, 0)


def test_gps_preset():
    r = cv.gps_rates()
    assert r.velocity_per_day == pytest.approx(-7.2, abs=0.3)
    assert r.gravity_per_day == pytest.approx(45.7, abs=0.5)
    assert 37.5 <= r.net_per_day <= 39.5
    assert r.net_per_day == pytest.approx((r.gravity_term + r.velocity_term) * 86_400e6, rel=1e-9)


def test_rate_cancellation_point():
    v = 3000.0
    r = cv.relativistic_rate(v, v * v / 2)
    assert r.net_per_day == pytest.approx(0, abs=1e-12)
    assert cv.relativistic_rate(v, v * v / 2 * 1.01).net_per_day > 0
    assert cv.relativistic_rate(v, v * v / 2 * 0.99).net_per_day < 0


def test_rate_domain():
    with pytest.raises(DomainError):
        cv.relativistic_rate(cv.SPEED_OF_LIGHT_M_S, 0)
