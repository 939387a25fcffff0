import math

import numpy as np
import pytest
from scipy.special import airy

from painleve_gap.exceptions import BadParameter
from painleve_gap.lax import (
    LaxData,
    evolve_in_t,
    formal_column,
    fundamental_determinant,
    integrate_columns,
    kernel_matrix,
)

ROOT_2PI = math.sqrt(2.0 * math.pi)


def scaled_airy(points):
    ai, aip, _, _ = airy(np.asarray(points, dtype=float))
    return ROOT_2PI * ai, ROOT_2PI * aip


class TestLaxData:
    """Coefficients of the zeta-equation."""

    def test_airy_coefficients(self):
        a_value, b_value, c_value = LaxData.airy(0.5).coefficients(2.0)
        assert a_value == 0.0
        assert b_value == 1.0
        assert c_value == pytest.approx(2.5)

    def test_from_hamiltonian(self):
        lax = LaxData.from_hamiltonian(
            t=1.0, alpha=0.2, u=0.5, u_t=-0.1, hamiltonian=2.0
        )
        assert lax.k == pytest.approx(2.0 + 0.25 + 0.5)


class TestColumns:
    """At alpha = 0 the P34 pair reduces to the Airy functions."""

    @pytest.mark.parametrize(["zeta", "rtol"], [(10.0, 1e-10), (20.0, 1e-12)])
    def test_formal_column_is_airy(self, zeta, rtol):
        psi1, psi2 = formal_column(zeta, LaxData.airy(0.0), sign=-1)
        expected_p, expected_q = scaled_airy(zeta)
        np.testing.assert_allclose(psi1.real, expected_p, rtol=rtol)
        np.testing.assert_allclose((1j * psi2).real, expected_q, rtol=rtol)

    def test_formal_column_keeps_corrections(self):
        psi1, _ = formal_column(20.0, LaxData.airy(0.0), sign=-1)
        leading = math.exp(-2.0 / 3.0 * 20.0**1.5) / (math.sqrt(2.0) * 20.0**0.25)
        xi = 2.0 / 3.0 * 20.0**1.5
        np.testing.assert_allclose(
            psi1.real / leading,
            1.0 - 5.0 / (72.0 * xi) + 385.0 / (10368.0 * xi**2),
            rtol=1e-6,
        )

    def test_positive_points(self):
        points = [1.0, 2.5]
        values = integrate_columns(points, LaxData.airy(0.0), omega=1.0)
        expected_p, expected_q = scaled_airy(points)
        np.testing.assert_allclose(values.p, expected_p, rtol=1e-7)
        np.testing.assert_allclose(values.q, expected_q, rtol=1e-7)
        np.testing.assert_allclose(values.dp, values.q)

    def test_negative_points(self):
        points = [-3.0, -1.0]
        values = integrate_columns(points, LaxData.airy(0.0), omega=1.0)
        expected_p, expected_q = scaled_airy(points)
        np.testing.assert_allclose(values.p, expected_p, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(values.q, expected_q, rtol=1e-6, atol=1e-8)

    def test_shift_in_t(self):
        values = integrate_columns([1.5], LaxData.airy(0.5), omega=1.0)
        expected_p, _ = scaled_airy([2.0])
        np.testing.assert_allclose(values.p, expected_p, rtol=1e-7)

    def test_zero_omega_kills_positive_side(self):
        values = integrate_columns([0.5, 2.0], LaxData.airy(0.0), omega=0.0)
        np.testing.assert_array_equal(values.p, [0.0, 0.0])
        np.testing.assert_array_equal(values.q, [0.0, 0.0])

    def test_zero_point_raises(self):
        with pytest.raises(BadParameter):
            integrate_columns([0.0, 1.0], LaxData.airy(0.0), omega=1.0)

    def test_determinant_is_one(self):
        value = fundamental_determinant(-2.0, LaxData.airy(0.0))
        assert abs(value - 1.0) <= 1e-9

    def test_determinant_at_zero_raises(self):
        with pytest.raises(BadParameter):
            fundamental_determinant(0.0, LaxData.airy(0.0))


class TestKernel:
    """Integrable kernel built from the columns."""

    def test_airy_kernel_matrix(self):
        points = np.array([0.5, 1.0, 2.0])
        p, q = scaled_airy(points)
        matrix = kernel_matrix(points, p, q, LaxData.airy(0.0))
        ai, aip = p / ROOT_2PI, q / ROOT_2PI
        expected_off = (ai[0] * aip[1] - aip[0] * ai[1]) / (points[0] - points[1])
        np.testing.assert_allclose(matrix[0, 1], expected_off, rtol=1e-12)
        expected_diagonal = aip**2 - points * ai**2
        np.testing.assert_allclose(np.diag(matrix), expected_diagonal, rtol=1e-12)
        np.testing.assert_allclose(matrix, matrix.T, rtol=1e-12)


class TestEvolution:
    """The t-equation shifts the Airy functions."""

    def test_airy_shift(self):
        points = np.array([0.5, 1.5])
        p_start, q_start = scaled_airy(points)
        t_grid = np.array([0.0, 0.5, 1.0])
        p_values, q_values = evolve_in_t(
            points, p_start, q_start, t_grid, lambda t: 0.0
        )
        for row, t in enumerate(t_grid):
            expected_p, expected_q = scaled_airy(points + t)
            np.testing.assert_allclose(p_values[row], expected_p, rtol=1e-7)
            np.testing.assert_allclose(q_values[row], expected_q, rtol=1e-7)

    def test_single_time(self):
        points = np.array([1.0])
        p_start, q_start = scaled_airy(points)
        p_values, _ = evolve_in_t(points, p_start, q_start, np.array([0.0]), abs)
        np.testing.assert_array_equal(p_values, p_start[None, :])
