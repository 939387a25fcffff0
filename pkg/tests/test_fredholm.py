import math

import numpy as np
import pytest

from painleve_gap.consts import KernelKind, Method
from painleve_gap.exceptions import BadParameter, SingularMatrix
from painleve_gap.fredholm import (
    LogDetResult,
    PointwiseKernel,
    Quadrature,
    composite_legendre_at,
    gauss_jacobi,
    gauss_legendre,
    integrate,
    lu_logdet,
    nystrom_logdet,
    singular_point_quadrature,
    soft_edge_cutoff,
    truncation_point,
)
from painleve_gap.kernels import AiryKernel, KernelSpec


class ShuffledAiryKernel(AiryKernel):
    """Airy kernel whose quadrature nodes come in random order."""

    def __init__(self, rng):
        super().__init__()
        self.rng = rng

    def quadrature(self, m, interval):
        rule = super().quadrature(m, interval)
        order = self.rng.permutation(len(rule))
        return Quadrature(rule.nodes[order], rule.weights[order], rule.interval)


class TestQuadrature:
    """Gauss rules are exact on polynomials."""

    def test_legendre_polynomial(self):
        rule = gauss_legendre(4, (0.0, 2.0))
        assert rule.integrate(rule.nodes**5) == pytest.approx(64.0 / 6.0, rel=1e-14)

    @pytest.mark.parametrize(
        ["m", "nodes", "weights"],
        [
            (1, [0.0], [2.0]),
            (2, [-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)], [1.0, 1.0]),
            (
                3,
                [-math.sqrt(0.6), 0.0, math.sqrt(0.6)],
                [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
            ),
        ],
    )
    def test_legendre_small_rules(self, m, nodes, weights):
        rule = gauss_legendre(m)
        np.testing.assert_allclose(rule.nodes, nodes, atol=1e-15)
        np.testing.assert_allclose(rule.weights, weights, rtol=1e-14)

    def test_legendre_degree(self):
        rule = gauss_legendre(6, (0.0, 2.0))
        assert rule.integrate(rule.nodes**11) == pytest.approx(
            2.0**12 / 12.0, rel=1e-13
        )

    def test_legendre_weights_are_positive(self):
        rule = gauss_legendre(12, (-3.0, 1.0))
        assert np.all(rule.weights > 0)
        assert rule.weights.sum() == pytest.approx(4.0, rel=1e-14)

    def test_jacobi_left_singularity(self):
        rule = gauss_jacobi(6, (0.0, 1.0), 0.3, singular_end="left")
        values = rule.nodes**0.3 * rule.nodes**2
        assert rule.integrate(values) == pytest.approx(1.0 / 3.3, rel=1e-12)

    def test_jacobi_right_singularity(self):
        rule = gauss_jacobi(6, (-1.0, 0.0), -0.4, singular_end="right")
        values = np.abs(rule.nodes) ** -0.4
        assert rule.integrate(values) == pytest.approx(1.0 / 0.6, rel=1e-12)

    def test_jacobi_rejects_bad_exponent(self):
        with pytest.raises(BadParameter):
            gauss_jacobi(4, (0.0, 1.0), -1.0)

    def test_singular_point_rule(self):
        rule = singular_point_quadrature(40, (-2.0, 3.0), 0.6)
        values = np.abs(rule.nodes) ** 0.6
        expected = (2.0**1.6 + 3.0**1.6) / 1.6
        assert rule.integrate(values) == pytest.approx(expected, rel=1e-10)
        assert np.all(np.diff(rule.nodes) > 0)

    def test_composite_rule_covers_panels(self):
        rule = composite_legendre_at(20, [0.0, 1.0, 4.0])
        assert rule.interval == (0.0, 4.0)
        assert rule.integrate(np.ones(len(rule))) == pytest.approx(4.0, rel=1e-14)

    def test_empty_interval_raises(self):
        with pytest.raises(BadParameter):
            gauss_legendre(4, (1.0, 1.0))


class TestIntegrate:
    """Panel integration of vectorized functions."""

    def test_polynomial(self):
        assert integrate(lambda x: x**2, (0.0, 3.0)) == pytest.approx(9.0, rel=1e-14)

    def test_reversed_interval(self):
        assert integrate(lambda x: x**2, (3.0, 0.0)) == pytest.approx(-9.0, rel=1e-14)

    def test_empty_interval(self):
        assert integrate(np.exp, (1.0, 1.0)) == 0.0


class TestLogDet:
    """LU log-determinants and Nystrom discretization."""

    def test_lu_logdet_sign(self):
        log_value, sign = lu_logdet(np.array([[2.0, 0.0], [0.0, -3.0]]))
        assert log_value == pytest.approx(math.log(6.0), rel=1e-14)
        assert sign == -1

    def test_lu_logdet_with_pivoting(self):
        log_value, sign = lu_logdet(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert log_value == pytest.approx(0.0, abs=1e-15)
        assert sign == -1

    def test_singular_matrix(self):
        with pytest.raises(SingularMatrix):
            lu_logdet(np.zeros((3, 3)))

    def test_rank_one_kernel(self):
        # det(I - c f f^T) = 1 - c int f^2 with f = exp(-x) on (0, 2).
        strength = 0.7
        kernel = PointwiseKernel(lambda x, y: strength * np.exp(-x - y))
        result = nystrom_logdet(kernel, (0.0, 2.0), m=24)
        expected = math.log(1.0 - strength * (1.0 - math.exp(-4.0)) / 2.0)
        np.testing.assert_allclose(result.log_value, expected, rtol=1e-12)
        assert result.method == Method.NYSTROM
        assert result.sign == 1
        assert result.error_estimate < 1e-10

    def test_diagonal_rule_is_used(self):
        kernel = PointwiseKernel(
            lambda x, y: np.sin(x - y) / (x - y), diagonal=np.ones_like
        )
        assert kernel(0.5, 0.5) == 1.0
        matrix = kernel.matrix(np.array([0.1, 0.4]))
        np.testing.assert_allclose(np.diag(matrix), [1.0, 1.0])

    def test_node_order_does_not_matter(self):
        kernel = ShuffledAiryKernel(np.random.default_rng(7))
        shuffled = nystrom_logdet(kernel, (-1.0, 8.0), m=40)
        ordered = nystrom_logdet(AiryKernel(), (-1.0, 8.0), m=40)
        assert shuffled.log_value == pytest.approx(ordered.log_value, abs=1e-13)

    def test_too_few_nodes(self):
        with pytest.raises(BadParameter):
            nystrom_logdet(lambda x, y: x * y, (0.0, 1.0), m=2)

    def test_result_value(self):
        result = LogDetResult(log_value=math.log(0.25), method=Method.ODE,
                              error_estimate=0.0, sign=-1)
        assert result.value == pytest.approx(-0.25)
        assert result.as_row() == {"logdet_ode": math.log(0.25), "error_ode": 0.0}


class TestTruncation:
    """Cutoff of soft-edge intervals."""

    def test_airy_cutoff(self):
        expected = (0.75 * math.log(1e18)) ** (2.0 / 3.0)
        assert soft_edge_cutoff(0.0, 0.0, 1e-18) == pytest.approx(expected, rel=1e-10)

    def test_shift_moves_cutoff(self):
        base = soft_edge_cutoff(0.0, 0.0, 1e-18)
        assert soft_edge_cutoff(2.0, 0.0, 1e-18) == pytest.approx(base - 2.0, rel=1e-8)

    def test_smaller_eps_moves_cutoff_right(self):
        spec = KernelSpec(KernelKind.P34, alpha=0.3, omega=0.5, t=-1.0)
        points = [truncation_point(spec, eps) for eps in (1e-10, 1e-18, 1e-30)]
        assert points[0] < points[1] < points[2]

    def test_nonpositive_eps(self):
        with pytest.raises(BadParameter):
            soft_edge_cutoff(0.0, 0.0, 0.0)
