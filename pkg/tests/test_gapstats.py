import math

import pytest

from painleve_gap.consts import Method
from painleve_gap.exceptions import BadParameter, DomainError
from painleve_gap.gapstats import (
    asym_p2,
    asym_p2_alpha0,
    asym_p2_reduction_residual,
    asym_p34,
    diffid_residual,
    factorization_residual,
    logdet_airy_nystrom,
    logdet_p2_nystrom,
    logdet_p2_ode,
    logdet_p34_nystrom,
    logdet_p34_ode,
    logdet_tw,
    total_integral_residual,
)
from painleve_gap.painleve import tw_log_cdf
from painleve_gap.specfun import constants


class TestTracyWidom:
    """The Airy determinant is F_TW."""

    @pytest.mark.parametrize("s", [-2.0, 0.0, 1.0])
    def test_cross_route(self, s):
        nystrom = logdet_airy_nystrom(s)
        assert nystrom.method == Method.NYSTROM
        assert nystrom.log_value == pytest.approx(logdet_tw(s).log_value, abs=1e-6)

    def test_shift(self):
        shifted = logdet_airy_nystrom(-1.0, t=0.5).log_value
        assert shifted == pytest.approx(tw_log_cdf(-0.5), abs=1e-6)

    def test_large_gap(self):
        s = -8.0
        remainder = (
            logdet_airy_nystrom(s).log_value + abs(s) ** 3 / 12.0 + math.log(8.0) / 8.0
        )
        assert remainder == pytest.approx(constants().c0, abs=5e-3)

    def test_beyond_cutoff(self):
        result = logdet_airy_nystrom(12.0)
        assert result.log_value == 0.0


class TestP34:
    """P34 determinants through Nystrom and the coupled system."""

    def test_airy_case(self):
        p34 = logdet_p34_nystrom(-1.0, 0.0, 0.0, 1.0).log_value
        assert p34 == pytest.approx(logdet_airy_nystrom(-1.0).log_value, abs=1e-8)

    def test_no_particles_right_of_zero(self):
        assert logdet_p34_nystrom(0.5, 0.0, 0.3, 0.0).log_value == 0.0

    def test_ode_route_airy_case(self):
        result = logdet_p34_ode(-1.0, 0.5, 0.0, 1.0)
        assert result.method == Method.ODE
        assert result.log_value == pytest.approx(tw_log_cdf(-0.5), abs=1e-7)

    def test_ode_against_nystrom(self):
        ode = logdet_p34_ode(-2.0, 0.5, 0.2, 0.0).log_value
        nystrom = logdet_p34_nystrom(-2.0, 0.5, 0.2, 0.0).log_value
        assert ode == pytest.approx(nystrom, abs=1e-5)

    def test_asym_airy_case(self):
        expected = -512.0 / 12.0 - math.log(8.0) / 8.0 + constants().c0
        assert asym_p34(-8.0, 0.0, 0.0, 1.0) == pytest.approx(expected, abs=1e-12)

    def test_asym_needs_negative_gap(self):
        with pytest.raises(DomainError):
            asym_p34(-1.0, 2.0, 0.0, 1.0)

    def test_asym_needs_positive_t(self):
        with pytest.raises(DomainError):
            asym_p34(-8.0, -0.5, 0.3, 1.0)

    def test_differential_identity_step(self):
        with pytest.raises(BadParameter):
            diffid_residual(1.0, 0.0, 0.3, 1.0, h=0.5)


class TestP2:
    """P2 determinants and their expansions."""

    def test_empty_gap(self):
        assert logdet_p2_nystrom(0.0, 0.0, 0.0).log_value == 0.0

    def test_negative_gap(self):
        with pytest.raises(BadParameter):
            logdet_p2_nystrom(-1.0, 0.0, 0.0)
        with pytest.raises(BadParameter):
            logdet_p2_ode(-1.0, 0.0, 0.0)

    def test_factorization(self):
        assert factorization_residual(0.8, 0.0, 0.0) < 1e-4

    def test_asym_needs_positive_s(self):
        with pytest.raises(DomainError):
            asym_p2(0.0, 0.4, 0.0)

    def test_asym_singular_at_zero_t(self):
        with pytest.raises(DomainError):
            asym_p2(3.0, 0.0, 0.0)

    def test_asym_needs_negative_t(self):
        with pytest.raises(DomainError):
            asym_p2(3.0, 0.4, 0.3)

    @pytest.mark.parametrize("t", [-1.5, 0.4, 2.0])
    def test_reduction(self, t):
        assert asym_p2_reduction_residual(3.0, t) < 1e-9

    def test_reduced_form(self):
        s, t = 3.0, 0.4
        expected = (
            -2.0 / 3.0 * s**6
            - s**4 * t
            - (s * t) ** 2 / 2.0
            - 0.75 * math.log(s)
            - tw_log_cdf(t)
            + constants().c2_alpha0
        )
        assert asym_p2_alpha0(s, t) == pytest.approx(expected, rel=1e-14)


class TestTotalIntegral:
    """Total integral of the Hastings-McLeod solution."""

    @pytest.mark.parametrize("t", [-1.0, 1.0, 3.0])
    def test_residual(self, t):
        assert total_integral_residual(t) < 1e-5

    def test_zero_raises(self):
        with pytest.raises(DomainError):
            total_integral_residual(0.0)


class TestNystromConvergence:
    """Doubling the node count changes nothing at the working accuracy."""

    @pytest.mark.parametrize(
        "logdet",
        [
            lambda m: logdet_airy_nystrom(-1.0, m),
            lambda m: logdet_p34_nystrom(-1.0, 0.0, 0.3, 0.5, m),
            lambda m: logdet_p2_nystrom(1.0, 0.0, 0.0, m),
        ],
        ids=["airy", "p34", "p2"],
    )
    def test_doubling(self, logdet):
        assert logdet(40).log_value == pytest.approx(logdet(80).log_value, abs=1e-8)
