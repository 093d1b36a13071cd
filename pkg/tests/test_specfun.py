import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from jcentropy.specfun import (
    GIBBS,
    AccuracyError,
    SeriesAccuracy,
    TailMethod,
    hurwitz_zeta,
    hurwitz_zeta_scaled,
    lerch_phi_unit,
    q_exp,
    q_log,
)
from oracle_utils import zeta_brute

ZETA3 = 1.2020569031595943

# Frozen from the brute-force oracle (10^7 terms + integral bracketing):
#   zeta_brute(1.667, 3.2) = 0.7682197976473739 +- 1.1e-12
#   zeta_brute(1.25, 0.8)  = 5.041734815793956  +- 8.9e-10
ZETA_1667_32 = 0.7682197976473740
PHI_125_08 = 5.0417348157939467


class TestQExp:
    def test_identity_at_zero(self):
        assert q_exp(0.0, 1.5) == 1.0

    @pytest.mark.parametrize("x", [-1.0, 0.0, 2.0])
    def test_gibbs_flag_is_plain_exponential(self, x):
        assert q_exp(x, GIBBS) == pytest.approx(math.exp(x), rel=1e-15)

    def test_cutoff_convention(self):
        # 1 + (1-q) x = 1 + 0.5*(-3) = -0.5 <= 0
        assert q_exp(-3.0, 0.5) == 0.0

    def test_elementwise(self):
        x = np.array([-3.0, 0.0, 1.0])
        out = q_exp(x, 0.5)
        assert out[0] == 0.0 and out[1] == 1.0 and out[2] > 0.0

    def test_q_exactly_one_rejected(self):
        with pytest.raises(ValueError, match="GIBBS"):
            q_exp(0.3, 1.0)


class TestQLog:
    def test_log_of_one(self):
        assert q_log(1.0, 1.7) == 0.0

    def test_round_trip(self):
        x, q = 0.3, 1.4
        assert q_log(q_exp(x, q), q) == pytest.approx(x, abs=1e-14)

    def test_gibbs_flag(self):
        assert q_log(2.0, GIBBS) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            q_log(0.0, 1.5)
        with pytest.raises(ValueError):
            q_log(-1.0, GIBBS)


class TestHurwitzZeta:
    def test_riemann_zeta2(self):
        assert hurwitz_zeta(2.0, 1.0) == pytest.approx(math.pi**2 / 6.0, abs=1e-10)

    def test_half_integer_identity(self):
        # zeta_H(2, 1/2) = 4 sum 1/(2n+1)^2 = pi^2/2
        assert hurwitz_zeta(2.0, 0.5) == pytest.approx(math.pi**2 / 2.0, abs=1e-10)

    def test_frozen_fixture(self):
        assert hurwitz_zeta(1.667, 3.2) == pytest.approx(ZETA_1667_32, abs=1e-10)

    def test_against_live_brute_force(self):
        value, halfwidth = zeta_brute(1.667, 3.2, n_terms=10**6)
        assert abs(hurwitz_zeta(1.667, 3.2) - value) <= halfwidth + 1e-10

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            hurwitz_zeta(1.0, 2.0)
        with pytest.raises(ValueError):
            hurwitz_zeta(2.0, 0.0)

    def test_plain_truncation_matches_when_feasible(self):
        acc = SeriesAccuracy(abs_tol=1e-8, max_terms=10**7, tail_method=TailMethod.PLAIN_TRUNCATION)
        assert hurwitz_zeta(3.0, 1.0, acc) == pytest.approx(ZETA3, abs=1e-8)

    def test_plain_truncation_accuracy_error(self):
        acc = SeriesAccuracy(abs_tol=1e-10, max_terms=10**4, tail_method=TailMethod.PLAIN_TRUNCATION)
        with pytest.raises(AccuracyError):
            hurwitz_zeta(1.2, 1.0, acc)

    def test_scaled_form_in_near_gibbs_regime(self):
        # s = 1/(q-1) ~ 1e6: scaled sum tends to the geometric series limit
        s = 1.0e6
        x = s / 2.0
        expected = 1.0 / (1.0 - math.exp(-2.0))
        assert hurwitz_zeta_scaled(s, x) == pytest.approx(expected, rel=1e-5)


class TestLerchPhiUnit:
    def test_reduces_to_zeta2(self):
        assert lerch_phi_unit(2.0, 1.0) == pytest.approx(math.pi**2 / 6.0, abs=1e-10)

    def test_shift_recurrence(self):
        assert lerch_phi_unit(3.0, 2.0) == pytest.approx(ZETA3 - 1.0, abs=1e-10)

    def test_frozen_fixture(self):
        assert lerch_phi_unit(1.25, 0.8) == pytest.approx(PHI_125_08, abs=2e-10)

    def test_against_live_brute_force(self):
        value, halfwidth = zeta_brute(1.25, 0.8, n_terms=10**7)
        assert abs(lerch_phi_unit(1.25, 0.8) - value) <= halfwidth + 2e-10


@settings(max_examples=60, deadline=None)
@given(
    s=st.floats(min_value=1.0, max_value=4.0, exclude_min=True),
    x=st.floats(min_value=0.05, max_value=10.0),
)
@example(s=4.0, x=0.05078125)
def test_zeta_shift_recurrence(s, x):
    lhs = hurwitz_zeta(s, x + 1.0)
    rhs = hurwitz_zeta(s, x) - x**-s
    # subtracting x^-s cancels up to x^-s of magnitude, which costs a few
    # ulps of x^-s no matter how the zeta itself is computed
    tol = 1e-10 * max(1.0, abs(rhs)) + 4e-15 * x**-s
    assert lhs == pytest.approx(rhs, abs=tol)


@settings(max_examples=60, deadline=None)
@given(
    s=st.floats(min_value=1.05, max_value=6.0),
    x=st.floats(min_value=0.05, max_value=20.0),
    dx=st.floats(min_value=0.01, max_value=5.0),
)
def test_zeta_strictly_decreasing_in_x(s, x, dx):
    assert hurwitz_zeta(s, x + dx) < hurwitz_zeta(s, x)


@settings(max_examples=60, deadline=None)
@given(
    s=st.floats(min_value=1.05, max_value=5.0),
    r=st.floats(min_value=0.05, max_value=15.0),
)
def test_lerch_unit_equals_hurwitz(s, r):
    assert lerch_phi_unit(s, r) == pytest.approx(hurwitz_zeta(s, r), abs=1e-10)


@settings(max_examples=80, deadline=None)
@given(
    x=st.floats(min_value=-5.0, max_value=5.0),
    q=st.floats(min_value=0.2, max_value=1.9).filter(lambda v: abs(v - 1.0) > 1e-3),
)
def test_q_exp_q_log_round_trip(x, q):
    y = q_exp(x, q)
    if y > 0.0:
        assert q_log(y, q) == pytest.approx(x, abs=1e-9 * max(1.0, abs(x)))


@pytest.mark.parametrize("x", [-2.0, -0.5, 0.0, 0.7, 3.0])
@pytest.mark.parametrize("q", [1.0 - 1e-6, 1.0 + 1e-6])
def test_q_exp_pointwise_gibbs_limit(x, q):
    assert q_exp(x, q) == pytest.approx(math.exp(x), rel=1e-4)
