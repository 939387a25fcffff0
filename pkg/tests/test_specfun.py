import math

import numpy as np
import pytest
from scipy.special import airy, gamma

from painleve_gap.exceptions import DomainError
from painleve_gap.specfun import (
    AI_PRIME_ZERO,
    AI_ZERO,
    airy_ai,
    airy_ai_prime,
    airy_pair,
    constants,
    gamma_ratio,
    log_gamma,
)


class TestAiry:
    """Ai and Ai' against scipy on every evaluation regime."""

    POINTS = np.array([-14.0, -9.5, -6.0, -2.5, -0.3, 0.0, 0.7, 1.9, 4.0, 8.5, 12.0])

    def test_values_at_zero(self):
        ai, ai_prime = airy_pair(0.0)
        assert ai == pytest.approx(AI_ZERO, rel=1e-15)
        assert ai_prime == pytest.approx(-AI_PRIME_ZERO, rel=1e-15)

    def test_array_matches_scipy(self):
        ai, ai_prime = airy_pair(self.POINTS)
        expected_ai, expected_ai_prime, _, _ = airy(self.POINTS)
        np.testing.assert_allclose(ai, expected_ai, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(ai_prime, expected_ai_prime, rtol=1e-9, atol=1e-12)

    def test_scalar_returns_floats(self):
        assert isinstance(airy_ai(1.0), float)
        assert isinstance(airy_ai_prime(1.0), float)

    def test_shape_is_kept(self):
        grid = np.linspace(-1.0, 1.0, 6).reshape(2, 3)
        ai, ai_prime = airy_pair(grid)
        assert ai.shape == (2, 3)
        assert ai_prime.shape == (2, 3)

    def test_airy_equation(self):
        # Ai'' = x Ai, checked by a central difference of Ai'.
        x, step = 1.3, 1e-4
        second = (airy_ai_prime(x + step) - airy_ai_prime(x - step)) / (2 * step)
        assert second == pytest.approx(x * airy_ai(x), rel=1e-7)


class TestGamma:
    """log_gamma and gamma_ratio."""

    def test_real_argument(self):
        assert log_gamma(4.5).real == pytest.approx(math.lgamma(4.5), rel=1e-14)
        assert log_gamma(0.25).real == pytest.approx(math.lgamma(0.25), rel=1e-13)

    def test_complex_ratio_matches_scipy(self):
        numerator, denominator = 1.5 + 2.0j, 0.5 - 0.3j
        expected = gamma(numerator) / gamma(denominator)
        assert gamma_ratio(numerator, denominator) == pytest.approx(
            expected, rel=1e-12
        )

    def test_pole_raises(self):
        with pytest.raises(DomainError):
            log_gamma(-2.0)

    def test_ratio_vanishes_at_denominator_pole(self):
        assert gamma_ratio(1.0, -1.0) == 0j


class TestConstants:
    """Large gap constants."""

    def test_c0(self):
        assert constants().c0 == pytest.approx(-0.13654, abs=1e-5)

    def test_c2_is_c0_plus_c1_at_zero(self):
        values = constants()
        assert values.c2_alpha0 == pytest.approx(values.c0 + values.c1(0.0), abs=1e-14)

    def test_c1_dependence_on_alpha(self):
        values = constants()
        assert values.c1(0.5) - values.c1(0.0) == pytest.approx(
            -0.25 * math.log(2.0), abs=1e-14
        )
