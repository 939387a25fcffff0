import numpy as np
import pytest

from painleve_gap.coupled_p2 import (
    ROUTE_HASTINGS_MCLEOD,
    ROUTE_P34,
    CoupledP2State,
    backlund_residuals,
    covering_trajectory,
    default_range,
    hamiltonian,
    hamiltonian_asymptotics,
    hamiltonian_shift_residual,
    integrate,
    minus_infinity_state,
    seed_plus_infinity,
    solve_coupled,
    sum_identity_residual,
    vector_field,
)
from painleve_gap.exceptions import BadParameter, DomainError
from painleve_gap.painleve import covering_length, hastings_mcleod, p34_transcendent

GRID = np.linspace(-5.0, 8.0, 27)


def make_state(**overrides):
    values = dict(
        x=-1.0, s=0.5, alpha=0.2, omega=1.0, v1=0.3, v2=0.1, w1=-0.4, w2=0.7
    )
    values.update(overrides)
    return CoupledP2State(**values)


class TestVectorField:
    """The coupled system and its Hamiltonian."""

    def test_field(self):
        state = make_state()
        field = vector_field(state.x, state.as_array(), state.s, state.alpha)
        np.testing.assert_allclose(
            field,
            [
                2.0 * 0.3 * -0.4,
                2.0 * 0.1 * 0.7 + 0.4,
                0.8 - 1.0 - 0.16,
                0.8 - 1.0 - 0.5 - 0.49,
            ],
        )

    def test_hamiltonian_is_conjugate(self):
        # v1' = dH/dw1 and w1' = -dH/dv1.
        state = make_state()
        step = 1e-6
        field = vector_field(state.x, state.as_array(), state.s, state.alpha)
        moved_w1 = make_state(w1=state.w1 + step)
        moved_v1 = make_state(v1=state.v1 + step)
        moved_w2 = make_state(w2=state.w2 + step)
        base = hamiltonian(state)
        assert (hamiltonian(moved_w1) - base) / step == pytest.approx(
            field[0], abs=1e-5
        )
        assert (hamiltonian(moved_v1) - base) / step == pytest.approx(
            -field[2], abs=1e-5
        )
        assert (hamiltonian(moved_w2) - base) / step == pytest.approx(
            field[1], abs=1e-5
        )

    def test_potential(self):
        assert make_state().potential == pytest.approx(0.4)


class TestRoutes:
    """Trajectories built from a single transcendent."""

    def test_airy_case(self):
        trajectory = covering_trajectory(1.0, 0.0, 1.0, GRID[0], GRID[-1])
        assert trajectory.route == ROUTE_HASTINGS_MCLEOD
        v1, v2, *_ = trajectory.evaluate(GRID)
        y = hastings_mcleod(0.0).evaluate(GRID)
        np.testing.assert_allclose(v2, 0.0, atol=1e-8)
        np.testing.assert_allclose(v1, y * y, atol=1e-6)

    def test_jump_at_zero(self):
        alpha = 0.3
        trajectory = covering_trajectory(0.0, alpha, 0.5, GRID[0], GRID[-1])
        assert trajectory.route == ROUTE_P34
        v1, v2, *_ = trajectory.evaluate(GRID)
        u = p34_transcendent(alpha, 0.0, covering_length(GRID[0])).evaluate(GRID)
        np.testing.assert_allclose(v1, 0.0, atol=1e-8)
        np.testing.assert_allclose(v2, u, atol=1e-6)

    def test_hamiltonian_flow(self):
        # H' = -V along the trajectory.
        trajectory = solve_coupled(0.0, 0.3, 0.0)
        interior = slice(5, -5)
        slope = np.gradient(trajectory.h, trajectory.grid)
        np.testing.assert_allclose(
            slope[interior], -(trajectory.v1 + trajectory.v2)[interior], atol=1e-3
        )

    def test_backlund_for_negative_jump(self):
        first, second = backlund_residuals(-2.0, 0.0, 0.0, np.linspace(-3.0, 6.0, 19))
        assert first < 1e-6
        assert second < 1e-6

    def test_hamiltonian_shift(self):
        grid = np.linspace(-3.0, 6.0, 19)
        assert hamiltonian_shift_residual(-2.0, 0.0, 0.0, grid) < 1e-6

    def test_sum_identity(self):
        grid = np.linspace(-3.0, 6.0, 19)
        assert sum_identity_residual(-2.0, 0.5, 0.0, grid) < 1e-6


class TestTrajectory:
    """Evaluation and export of trajectories."""

    def test_outside_grid_raises(self):
        trajectory = solve_coupled(1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            trajectory.evaluate(trajectory.grid[-1] + 1.0)

    def test_scalar_evaluation(self):
        trajectory = solve_coupled(1.0, 0.0, 1.0)
        values = trajectory.evaluate(0.5)
        assert len(values) == 5
        assert all(isinstance(value, float) for value in values)
        state = trajectory.state_at(0.5)
        assert state.potential == pytest.approx(trajectory.potential(0.5))

    def test_to_frame(self):
        frame = solve_coupled(1.0, 0.0, 1.0).to_frame()
        assert list(frame.columns) == ["x", "v1", "v2", "w1", "w2", "H"]

    def test_default_range(self):
        assert default_range(-2.0) == (-22.0, 16.0)
        assert default_range(3.0, 0.3, 0.5)[0] == -3.0

    def test_alpha_out_of_range(self):
        with pytest.raises(BadParameter):
            solve_coupled(1.0, -0.5, 1.0)

    def test_empty_range(self):
        with pytest.raises(BadParameter):
            solve_coupled(1.0, 0.0, 1.0, x_min=12.0, x_max=11.0)

    def test_right_end_too_close(self):
        with pytest.raises(BadParameter):
            solve_coupled(1.0, 0.0, 1.0, x_max=5.0)


class TestAsymptotics:
    """States at both infinities."""

    def test_seed_right_end(self):
        with pytest.raises(BadParameter):
            seed_plus_infinity(5.0, 0.0, 0.0)

    def test_seed_without_jump(self):
        state = seed_plus_infinity(12.0, 0.0, 0.3)
        assert state.v1 == 0.0

    def test_seed_point_does_not_matter(self):
        near = integrate(seed_plus_infinity(12.0, -1.0, 0.0, 1.0), -1.0)
        far = integrate(seed_plus_infinity(14.0, -1.0, 0.0, 1.0), -1.0)
        np.testing.assert_allclose(
            near.evaluate(0.0), far.evaluate(0.0), rtol=0.0, atol=1e-8
        )

    def test_integrate_backward_only(self):
        seed = seed_plus_infinity(12.0, -1.0, 0.0)
        with pytest.raises(BadParameter):
            integrate(seed, 13.0)

    def test_minus_infinity_negative_jump(self):
        state = minus_infinity_state(-30.0, -4.0, 0.3)
        assert state.v1 == 15.0
        assert state.v2 == pytest.approx(0.15)
        assert state.w2 == pytest.approx(-2.0)

    def test_minus_infinity_oscillates(self):
        with pytest.raises(DomainError):
            minus_infinity_state(-30.0, 1.0, 0.3, 0.5)

    def test_hamiltonian_asymptotics(self):
        h, state = hamiltonian_asymptotics(-4.0, 1.0, 0.0)
        assert h == pytest.approx(9.0 / 4.0 + 1.0 / 24.0)
        assert state.x == -3.0

    @pytest.mark.parametrize("s, t", [(1.0, -3.0), (-2.0, 3.0)])
    def test_hamiltonian_asymptotics_domain(self, s, t):
        with pytest.raises(DomainError):
            hamiltonian_asymptotics(s, t, 0.0)
