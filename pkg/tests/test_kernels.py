import math

import numpy as np
import pytest
from scipy.special import airy

from painleve_gap.consts import KernelKind
from painleve_gap.exceptions import BadParameter
from painleve_gap.gapstats import logdet_airy_nystrom
from painleve_gap.kernels import (
    AiryKernel,
    KernelSpec,
    P2Kernel,
    P34Kernel,
    hat_kernel_logdet,
    kernel_airy,
    kernel_p2,
    kernel_p34,
    kernel_p34_diag,
    psi_pair,
)


class TestKernelSpec:
    """Validation and truncation of kernel intervals."""

    def test_p2_interval_must_be_symmetric(self):
        with pytest.raises(BadParameter):
            KernelSpec(KernelKind.P2, interval=(-1.0, 2.0))

    def test_empty_soft_edge_interval(self):
        with pytest.raises(BadParameter):
            KernelSpec(KernelKind.AIRY, interval=(3.0, 3.0))

    def test_negative_omega(self):
        with pytest.raises(BadParameter):
            KernelSpec(KernelKind.P34, omega=-0.5, interval=(0.0, math.inf))

    def test_airy_truncation(self):
        start, end = KernelSpec(KernelKind.AIRY).truncated_interval()
        assert start == 0.0
        assert end == pytest.approx(9.886, abs=1e-3)

    def test_truncation_never_below_start(self):
        spec = KernelSpec(KernelKind.AIRY, interval=(12.0, math.inf))
        assert spec.truncated_interval() == (12.0, 12.0)

    def test_zero_omega_ends_at_zero(self):
        spec = KernelSpec(KernelKind.P34, omega=0.0, interval=(-3.0, math.inf))
        assert spec.truncated_interval() == (-3.0, 0.0)

    def test_zero_omega_positive_start_is_empty(self):
        spec = KernelSpec(KernelKind.P34, omega=0.0, interval=(1.0, math.inf))
        start, end = spec.truncated_interval()
        assert end <= start

    def test_p2_interval_is_kept(self):
        spec = KernelSpec(KernelKind.P2, interval=(-1.5, 1.5))
        assert spec.truncated_interval() == (-1.5, 1.5)
        assert spec.as_dict()["s"] == 1.5

    def test_kernel_objects(self):
        assert isinstance(KernelSpec(KernelKind.AIRY).kernel(), AiryKernel)
        spec = KernelSpec(KernelKind.P34, alpha=0.2, omega=0.5)
        assert isinstance(spec.kernel(), P34Kernel)


class TestAiryKernel:
    """The shifted Airy kernel."""

    def test_diagonal_limit(self):
        ai, aip, _, _ = airy(1.3)
        assert kernel_airy(1.0, 1.0, t=0.3) == pytest.approx(aip**2 - 1.3 * ai**2)

    def test_continuous_at_diagonal(self):
        near = kernel_airy(0.7, 0.7 + 1e-6)
        assert near == pytest.approx(kernel_airy(0.7, 0.7), rel=1e-5)

    def test_matrix_matches_function(self):
        nodes = np.array([-1.0, 0.5, 2.0])
        matrix = AiryKernel(0.2).matrix(nodes)
        x_values, y_values = np.meshgrid(nodes, nodes, indexing="ij")
        np.testing.assert_allclose(
            matrix, kernel_airy(x_values, y_values, t=0.2), rtol=1e-12
        )


class TestP34Kernel:
    """P34 kernel from the Lax pair."""

    def test_reduces_to_airy(self):
        nodes = np.linspace(-3.0, 3.0, 10)
        matrix = P34Kernel(0.0, 0.0, 1.0).matrix(nodes)
        assert np.max(np.abs(matrix - AiryKernel(0.0).matrix(nodes))) <= 1e-8

    def test_pointwise_value(self):
        assert kernel_p34(0.5, 1.5, 0.0, 0.0, 1.0) == pytest.approx(
            kernel_airy(0.5, 1.5), abs=1e-8
        )

    def test_diagonal_is_nonnegative(self):
        points = np.linspace(-4.0, 3.0, 20)
        values = [kernel_p34_diag(x, 0.0, 0.3, 0.5) for x in points]
        assert min(values) >= 0.0

    def test_diagonal_is_the_limit(self):
        step = 1e-4
        quotient = kernel_p34(1.0 + step, 1.0 - step, 0.0, 0.3, 1.0)
        assert quotient == pytest.approx(kernel_p34_diag(1.0, 0.0, 0.3, 1.0), abs=1e-6)

    @pytest.mark.parametrize("x", [1.5, -2.0])
    def test_airy_columns(self, x):
        pair = psi_pair(x, 0.0, 0.0, 1.0)
        ai, aip, _, _ = airy(x)
        scale = math.sqrt(2.0 * math.pi)
        assert pair.psi1.real == pytest.approx(scale * ai, rel=1e-9, abs=1e-10)
        assert pair.psi2.imag == pytest.approx(-scale * aip, rel=1e-9, abs=1e-10)
        assert abs(pair.psi1.imag) <= 1e-10
        assert abs(pair.psi2.real) <= 1e-10

    def test_quadrature_avoids_zero(self):
        rule = P34Kernel(0.0, 0.3, 1.0).quadrature(40, (-2.0, 3.0))
        assert not np.any(rule.nodes == 0.0)


class TestP2Kernel:
    """P2 kernel assembled from two P34 kernels."""

    def test_matrix_is_even_and_symmetric(self):
        nodes = np.array([-1.2, -0.4, 0.4, 1.2])
        matrix = P2Kernel(0.0, 0.0).matrix(nodes)
        np.testing.assert_array_equal(matrix, matrix[::-1, ::-1])
        np.testing.assert_allclose(matrix, matrix.T, rtol=1e-12)

    def test_quadrature_is_mirrored(self):
        rule = P2Kernel(0.0, 0.0).quadrature(40, (-1.0, 1.0))
        np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
        np.testing.assert_array_equal(rule.weights, rule.weights[::-1])

    def test_diagonal_is_positive(self):
        points = np.linspace(0.1, 2.0, 10)
        assert all(kernel_p2(x, x, 0.0, 0.0) > 0.0 for x in points)


class TestDressing:
    """Determinant ratio through the omega = 0 kernel."""

    def test_nonpositive_s(self):
        with pytest.raises(BadParameter):
            hat_kernel_logdet(0.0, 0.0, 0.0, 1.0)

    def test_airy_gap(self):
        result = hat_kernel_logdet(1.0, 0.0, 0.0, 1.0)
        assert math.isfinite(result.error_estimate)
        assert result.error_estimate < 1e-6
        assert result.log_value == pytest.approx(
            logdet_airy_nystrom(1.0).log_value, abs=1e-6
        )
        assert result.log_value == pytest.approx(
            result.extra["log_hat"] - result.extra["log_hat_full"]
        )
