"""
The coupled P2 Hamiltonian system.

For a jump point s and a parameter alpha the system reads

    v1' = 2 v1 w1,           w1' = 2V + x - w1^2,
    v2' = 2 v2 w2 + 2 alpha, w2' = 2V + x - s - w2^2,

with V = v1 + v2 and Hamiltonian
H = -V^2 - V x + v1 w1^2 + v2 w2^2 + s v2 + 2 alpha w2, so that H' = -V.
alpha is the kernel parameter throughout: the trajectory at alpha belongs to
the P34 kernel with the same alpha.

Trajectories are built by :func:`solve_coupled`, which picks one of three
constructions:

* a potential route, when V is known in closed form from a scalar
  transcendent and v1, w1, w2 follow from two linear equations;
* a dressing route for s > 0, omega > 0, where V comes from the hat kernel
  flow on (0, s);
* collocation of the full system for s < 0.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_bvp, solve_ivp
from scipy.interpolate import BPoly, CubicHermiteSpline

from painleve_gap.consts import (
    BVP_MAX_NODES,
    BVP_TOL,
    COUPLED_DENSE_STEP,
    COUPLED_FIT_WINDOW,
    COUPLED_LEFT,
    COUPLED_RIGHT_MARGIN,
    DEFAULT_N_COLLOC,
    DRESSING_T_MAX,
    DRESSING_T_MIN,
    IVP_ATOL,
    IVP_RTOL,
)
from painleve_gap.exceptions import (
    BadParameter,
    DomainError,
    NewtonDiverged,
    StepFailure,
)
from painleve_gap.painleve import (
    covering_length,
    hastings_mcleod,
    hat_kernel_flow,
    p34_minus_infinity_branch,
    p34_plus_infinity_series,
    p34_transcendent,
    real_omega,
)
from painleve_gap.specfun import airy_pair
from painleve_gap.util import smooth_max

logger = logging.getLogger(__name__)

SEED_MIN_X = 10.0

ROUTE_HASTINGS_MCLEOD = "hastings-mcleod"
ROUTE_P34 = "p34"
ROUTE_DRESSING = "dressing"
ROUTE_COLLOCATION = "collocation"
ROUTE_IVP = "ivp"


@dataclass(frozen=True)
class CoupledP2State:
    """Point of a coupled P2 trajectory."""

    x: float
    s: float
    alpha: float
    omega: float
    v1: float
    v2: float
    w1: float
    w2: float

    @property
    def potential(self) -> float:
        """V = v1 + v2."""
        return self.v1 + self.v2

    def as_array(self) -> np.ndarray:
        """(v1, v2, w1, w2) as an array."""
        return np.array([self.v1, self.v2, self.w1, self.w2])


def hamiltonian(state: CoupledP2State) -> float:
    """
    Hamiltonian of the coupled system at a state.

    :param state: State of the system
    :type state: CoupledP2State
    :return: H(v1, v2, w1, w2; x, s, alpha)
    :rtype: float
    """
    return float(
        _hamiltonian_values(
            state.x, state.s, state.alpha, state.v1, state.v2, state.w1, state.w2
        )
    )


def vector_field(x, y, s: float, alpha: float) -> np.ndarray:
    """Right-hand side for y = (v1, v2, w1, w2), on a point or a mesh."""
    v1, v2, w1, w2 = y
    potential = v1 + v2
    return np.array(
        [
            2.0 * v1 * w1,
            2.0 * v2 * w2 + 2.0 * alpha,
            2.0 * potential + x - w1 * w1,
            2.0 * potential + x - s - w2 * w2,
        ]
    )


def vector_field_jacobian(x, y) -> np.ndarray:
    """Jacobian of :func:`vector_field` on a mesh, shaped (4, 4, n)."""
    v1, v2, w1, w2 = y
    jacobian = np.zeros((4, 4, np.size(x)))
    jacobian[0, 0] = 2.0 * w1
    jacobian[0, 2] = 2.0 * v1
    jacobian[1, 1] = 2.0 * w2
    jacobian[1, 3] = 2.0 * v2
    jacobian[2, 0] = jacobian[2, 1] = 2.0
    jacobian[2, 2] = -2.0 * w1
    jacobian[3, 0] = jacobian[3, 1] = 2.0
    jacobian[3, 3] = -2.0 * w2
    return jacobian


class _FieldInterpolant:
    """Quintic Hermite interpolation of a tabulated solution of the system."""

    def __init__(self, grid, states, h, s: float, alpha: float):
        v1, v2, w1, w2 = states
        first = vector_field(grid, states, s, alpha)
        potential_slope = first[0] + first[1]
        second = np.array(
            [
                2.0 * first[0] * w1 + 2.0 * v1 * first[2],
                2.0 * first[1] * w2 + 2.0 * v2 * first[3],
                2.0 * potential_slope + 1.0 - 2.0 * w1 * first[2],
                2.0 * potential_slope + 1.0 - 2.0 * w2 * first[3],
            ]
        )
        self._splines = [
            BPoly.from_derivatives(
                grid, np.column_stack([states[index], first[index], second[index]])
            )
            for index in range(4)
        ]
        self._splines.append(
            BPoly.from_derivatives(
                grid, np.column_stack([h, -(v1 + v2), -potential_slope])
            )
        )

    def __call__(self, points: np.ndarray) -> Tuple[np.ndarray, ...]:
        return tuple(spline(points) for spline in self._splines)


class _PotentialInterpolant:
    """
    Interpolation of a trajectory rebuilt from its potential V.

    y1 and phi solve y'' = (x + 2V) y and y'' = (x - s + 2V) y. Their quintic
    Hermite interpolants use the equations for the second and third
    derivatives.
    """

    def __init__(
        self,
        grid,
        s: float,
        potential,
        potential_slope,
        h,
        recessive,
        shifted,
        scale: float,
    ):
        self._scale = scale
        self._potential = CubicHermiteSpline(grid, potential, potential_slope)
        self._h = BPoly.from_derivatives(
            grid, np.column_stack([h, -potential, -potential_slope])
        )
        self._recessive = _linear_splines(
            grid, grid + 2.0 * potential, potential_slope, recessive
        )
        self._shifted = _linear_splines(
            grid, grid - s + 2.0 * potential, potential_slope, shifted
        )

    def __call__(self, points: np.ndarray) -> Tuple[np.ndarray, ...]:
        potential = self._potential(points)
        y1, y1_slope = (spline(points) for spline in self._recessive)
        phi, phi_slope = (spline(points) for spline in self._shifted)
        v1 = self._scale * y1 * y1
        return (
            v1,
            potential - v1,
            y1_slope / y1,
            phi_slope / phi,
            self._h(points),
        )


@dataclass(frozen=True, eq=False)
class CoupledP2Trajectory:
    """
    Solution of the coupled P2 system tabulated on an ascending grid.

    ``h`` is the Hamiltonian along the trajectory. Values between grid points
    come from Hermite interpolants. Points outside the grid are rejected.
    """

    s: float
    alpha: float
    omega: float
    route: str
    grid: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    h: np.ndarray
    interpolant: Any = field(repr=False)

    def evaluate(self, x):
        """
        v1, v2, w1, w2 and H at a point or array of points.

        :param x: Point or array of points inside the grid
        :type x: float or numpy.ndarray
        :return: The five values, floats for a scalar input
        :rtype: Tuple
        :raises DomainError: if a point lies outside the grid
        """
        points = np.asarray(x, dtype=float)
        scalar = points.ndim == 0
        points = np.atleast_1d(points)
        if np.any(points < self.grid[0]) or np.any(points > self.grid[-1]):
            raise DomainError(
                f"Trajectory is tabulated on [{self.grid[0]}, {self.grid[-1]}]",
                x_min=float(points.min()),
                x_max=float(points.max()),
            )
        values = self.interpolant(points)
        if scalar:
            return tuple(float(value[0]) for value in values)
        return values

    def potential(self, x):
        """V = v1 + v2 at a point or array of points."""
        v1, v2, *_ = self.evaluate(x)
        return v1 + v2

    def state_at(self, x: float) -> CoupledP2State:
        """The state at a single point."""
        v1, v2, w1, w2, _ = self.evaluate(float(x))
        return CoupledP2State(
            x=float(x),
            s=self.s,
            alpha=self.alpha,
            omega=self.omega,
            v1=v1,
            v2=v2,
            w1=w1,
            w2=w2,
        )

    def to_frame(self) -> pd.DataFrame:
        """Table with columns x, v1, v2, w1, w2, H."""
        return pd.DataFrame(
            {
                "x": self.grid,
                "v1": self.v1,
                "v2": self.v2,
                "w1": self.w1,
                "w2": self.w2,
                "H": self.h,
            }
        )


def seed_plus_infinity(
    x0: float, s: float, alpha: float, omega: complex = 1.0
) -> CoupledP2State:
    """
    State of the trajectory at a large x0 from its +inf asymptotics.

    v1 carries the constant c = omega for s > 0 and c = 1 otherwise. Ai(x0)^2
    stands for its leading form exp(-4/3 x0^(3/2)) / (4 pi sqrt(x0)), and
    Ai'/Ai for -sqrt(x0) when alpha = 0. v2 and w2 are the P34 series at
    x0 - s, and w1 = -sqrt(x0) - (alpha + 1/4) / x0 - alpha s / (2 x0^2).

    :param x0: Seed point
    :type x0: float
    :param s: Jump point
    :type s: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :return: The seed state
    :rtype: CoupledP2State
    :raises BadParameter: if x0 < max(10, s + 10)
    """
    omega_value = real_omega(omega)
    _check_right_end(x0, s)
    constant = omega_value if s > 0 else 1.0
    ai, ai_prime = airy_pair(x0)
    if s == 0 and alpha != 0:
        v1 = 0.0
    else:
        v1 = (
            constant
            * 2.0 ** (-4.0 * alpha)
            * ai
            * ai
            * abs(s / x0) ** (2.0 * alpha)
            * (1.0 + alpha * s / x0)
        )
    v2, v2_slope = _p34_right(x0 - s, alpha)
    return CoupledP2State(
        x=float(x0),
        s=float(s),
        alpha=float(alpha),
        omega=omega_value,
        v1=float(v1),
        v2=float(v2),
        w1=_w1_right(x0, s, alpha),
        w2=_w2_right(x0 - s, alpha, v2, v2_slope),
    )


def integrate(seed: CoupledP2State, x_to: float) -> CoupledP2Trajectory:
    """
    Integrate the system backward from a seed.

    Output is stored every 0.05. The backward problem is only faithful when
    the exponentially small part of v2 vanishes, as for alpha = 0, omega = 1
    with s <= 0.

    :param seed: Initial state
    :type seed: CoupledP2State
    :param x_to: End point, left of the seed
    :type x_to: float
    :return: The trajectory on [x_to, seed.x]
    :rtype: CoupledP2Trajectory
    :raises BadParameter: if x_to is not left of the seed
    :raises StepFailure: if the integrator stops, most likely at a pole
    """
    if x_to >= seed.x:
        raise BadParameter(
            f"Integration runs backward, got x_to={x_to} >= {seed.x}", x_to=x_to
        )
    start = seed.as_array()
    count = int(math.ceil((seed.x - x_to) / COUPLED_DENSE_STEP))
    t_eval = np.linspace(seed.x, x_to, count + 1)
    solution = solve_ivp(
        vector_field,
        (seed.x, x_to),
        start,
        method="DOP853",
        t_eval=t_eval,
        args=(seed.s, seed.alpha),
        rtol=IVP_RTOL,
        atol=IVP_ATOL * np.maximum(np.abs(start), 1e-200),
    )
    if solution.status != 0 or solution.y.shape[1] != len(t_eval):
        last_x = float(solution.t[-1]) if len(solution.t) > 0 else seed.x
        raise StepFailure(
            f"Coupled P2 integration stopped at x={last_x}: {solution.message}",
            last_x=last_x,
        )
    grid = solution.t[::-1]
    states = solution.y[:, ::-1]
    logger.debug(
        "Integrated coupled P2 (s=%g, alpha=%g) from %g to %g",
        seed.s,
        seed.alpha,
        seed.x,
        x_to,
    )
    return _tabulated(seed.s, seed.alpha, seed.omega, ROUTE_IVP, grid, states)


def default_range(
    s: float, alpha: float = 0.0, omega: complex = 1.0
) -> Tuple[float, float]:
    """Default [x_min, x_max] of a trajectory."""
    x_min = min(s, 0.0) - COUPLED_LEFT
    if _is_dressed(s, alpha, real_omega(omega)):
        x_min = s + DRESSING_T_MIN
    return x_min, max(s, 0.0) + COUPLED_RIGHT_MARGIN


def solve_coupled(
    s: float,
    alpha: float,
    omega: complex = 1.0,
    x_min: Optional[float] = None,
    x_max: Optional[float] = None,
    n_colloc: int = DEFAULT_N_COLLOC,
) -> CoupledP2Trajectory:
    """
    Compute the trajectory of the coupled system on [x_min, x_max].

    * alpha = 0 with omega = 1 or s < 0: V = y^2 with y the Hastings-McLeod
      solution, v2 = 0.
    * s = 0, or s > 0 with omega = 0: v1 = 0 and V = u(x - s; 2 alpha, 0).
    * s > 0, omega > 0: V = u(x - s; 2 alpha, 0) - d^2/dt^2 ln det(I + omega
      K_hat) on (0, s), at t = x - s. x_min is raised to s - 6.
    * s < 0 otherwise: collocation with the -inf asymptotics on the left.

    :param s: Jump point
    :type s: float
    :param alpha: Kernel parameter, above -1/2
    :type alpha: float
    :param omega: Thinning parameter, real and nonnegative
    :type omega: complex
    :param x_min: Left end, see :func:`default_range` for the default
    :type x_min: Optional[float]
    :param x_max: Right end, see :func:`default_range` for the default
    :type x_max: Optional[float]
    :param n_colloc: Minimal number of collocation nodes
    :type n_colloc: int
    :return: The trajectory
    :rtype: CoupledP2Trajectory
    :raises BadParameter: on parameters outside the validated range
    :raises NewtonDiverged: if collocation fails
    :raises StepFailure: if a linear integration stops
    """
    if alpha <= -0.5:
        raise BadParameter(f"Coupled P2 needs alpha > -1/2, got {alpha}", alpha=alpha)
    omega_value = real_omega(omega)
    default_min, default_max = default_range(s, alpha, omega_value)
    x_min = default_min if x_min is None else float(x_min)
    x_max = default_max if x_max is None else float(x_max)
    if _is_dressed(s, alpha, omega_value) and x_min < s + DRESSING_T_MIN:
        logger.debug("x_min raised from %g to %g for the dressing", x_min, default_min)
        x_min = s + DRESSING_T_MIN
    _check_right_end(x_max, s)
    if x_min >= x_max:
        raise BadParameter(
            f"Empty range [{x_min}, {x_max}]", x_min=x_min, x_max=x_max
        )
    if alpha == 0 and (omega_value == 1 or s < 0):
        return _hastings_mcleod_route(s, omega_value, x_min, x_max)
    if s == 0 or (s > 0 and omega_value == 0):
        return _p34_route(s, alpha, omega_value, x_min, x_max)
    if s > 0:
        return _dressing_route(s, alpha, omega_value, x_min, x_max)
    return _collocation_route(s, alpha, omega_value, x_min, x_max, n_colloc)


@lru_cache(maxsize=64)
def coupled_trajectory(
    s: float,
    alpha: float,
    omega: float = 1.0,
    x_min: Optional[float] = None,
    x_max: Optional[float] = None,
) -> CoupledP2Trajectory:
    """Trajectory with the default budget, computed once."""
    return solve_coupled(float(s), float(alpha), float(omega), x_min, x_max)


def covering_trajectory(
    s: float, alpha: float, omega: complex, x_low: float, x_high: float
) -> CoupledP2Trajectory:
    """Cached trajectory whose range contains [x_low, x_high] when possible."""
    x_min, x_max = default_range(s, alpha, omega)
    if x_low < x_min:
        x_min = float(math.floor(x_low) - 1.0)
    if x_high > x_max:
        x_max = float(math.ceil(x_high) + 1.0)
    return coupled_trajectory(
        float(s), float(alpha), real_omega(omega), float(x_min), float(x_max)
    )


def minus_infinity_state(
    x: float, s: float, alpha: float, omega: complex = 1.0
) -> CoupledP2State:
    """
    Leading behaviour of the trajectory as x -> -inf.

    For s < 0: v1 = -x/2, v2 = alpha / sqrt|s|, w1 = 1/(2x), w2 = -sqrt|s|.
    For s >= 0 and omega = 0, or s = 0: v1 = 0, v2 is the omega = 0 branch
    of u at x - s and w1 = -sqrt(s).

    :param x: Negative point, left of s
    :type x: float
    :param s: Jump point
    :type s: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :return: The asymptotic state
    :rtype: CoupledP2State
    :raises DomainError: for s > 0 with omega > 0, where v2 oscillates
    """
    omega_value = real_omega(omega)
    if s < 0:
        return CoupledP2State(
            x=float(x),
            s=float(s),
            alpha=float(alpha),
            omega=omega_value,
            v1=-x / 2.0,
            v2=alpha / math.sqrt(-s),
            w1=1.0 / (2.0 * x),
            w2=-math.sqrt(-s),
        )
    if s > 0 and omega_value > 0:
        raise DomainError(
            "v2 oscillates at -inf for s > 0 and omega > 0", s=s, omega=omega_value
        )
    v2, v2_slope = p34_minus_infinity_branch(x - s, alpha)
    return CoupledP2State(
        x=float(x),
        s=float(s),
        alpha=float(alpha),
        omega=omega_value,
        v1=0.0,
        v2=v2,
        w1=-math.sqrt(s) if s > 0 else 1.0 / (2.0 * x),
        w2=(v2_slope - 2.0 * alpha) / (2.0 * v2),
    )


def hamiltonian_asymptotics(
    s: float, t: float, alpha: float
) -> Tuple[float, CoupledP2State]:
    """
    H and the state at x = s + t as s -> -inf.

    :param s: Negative jump point
    :type s: float
    :param t: Offset of x from s
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :return: H and the state
    :rtype: Tuple[float, CoupledP2State]
    :raises DomainError: unless s < 0 and s + t < 0
    """
    x = s + t
    if s >= 0 or x >= 0:
        raise DomainError(
            f"Expansion as s -> -inf needs s < 0 and s + t < 0, got s={s}, t={t}",
            s=s,
            t=t,
        )
    root = math.sqrt(-s)
    h = x * x / 4.0 - 2.0 * alpha * root - 1.0 / (8.0 * x)
    state = CoupledP2State(
        x=x,
        s=float(s),
        alpha=float(alpha),
        omega=1.0,
        v1=-x / 2.0,
        v2=alpha / root,
        w1=1.0 / (2.0 * x),
        w2=-root,
    )
    return h, state


def backlund_residuals(
    s: float, alpha: float, omega: complex, x_grid: Sequence[float]
) -> Tuple[float, float]:
    """
    Residuals of the Backlund transformation between alpha and alpha + 1/2.

    r1 = sup |V(alpha + 1/2) - V(alpha) + w2'(alpha)| and
    r2 = sup |w2(alpha + 1/2) + w2(alpha) + (2 alpha + 1) / v2(alpha + 1/2)|,
    with w2' taken from the vector field.

    :param s: Jump point
    :type s: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :param x_grid: Points of the check
    :type x_grid: Sequence[float]
    :return: r1 and r2
    :rtype: Tuple[float, float]
    """
    points = np.atleast_1d(np.asarray(x_grid, dtype=float))
    v1, v2, _, w2, _ = _values_on(s, alpha, omega, points)
    up_v1, up_v2, _, up_w2, _ = _values_on(s, alpha + 0.5, omega, points)
    potential = v1 + v2
    w2_slope = 2.0 * potential + points - s - w2 * w2
    first = up_v1 + up_v2 - potential + w2_slope
    second = up_w2 + w2 + (2.0 * alpha + 1.0) / up_v2
    return float(np.max(np.abs(first))), float(np.max(np.abs(second)))


def hamiltonian_shift_residual(
    s: float, alpha: float, omega: complex, x_grid: Sequence[float]
) -> float:
    """Largest deviation from H(x; alpha + 1/2) - H(x; alpha) = w2(x; alpha)."""
    points = np.atleast_1d(np.asarray(x_grid, dtype=float))
    *_, w2, h = _values_on(s, alpha, omega, points)
    *_, up_h = _values_on(s, alpha + 0.5, omega, points)
    return float(np.max(np.abs(up_h - h - w2)))


def sum_identity_residual(
    s: float, alpha: float, omega: complex, x_grid: Sequence[float]
) -> float:
    """
    Largest deviation from V(a+) + V(a-) = w2(a-)^2 - (x - s).

    a+ = (alpha + 1/2) / 2 and a- = (alpha - 1/2) / 2 are kernel parameters.

    :param s: Jump point
    :type s: float
    :param alpha: Parameter, above -1/2
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :param x_grid: Points of the check
    :type x_grid: Sequence[float]
    :return: Maximum absolute residual
    :rtype: float
    """
    points = np.atleast_1d(np.asarray(x_grid, dtype=float))
    v1, v2, _, w2, _ = _values_on(s, (alpha - 0.5) / 2.0, omega, points)
    up_v1, up_v2, *_ = _values_on(s, (alpha + 0.5) / 2.0, omega, points)
    residual = up_v1 + up_v2 + v1 + v2 - w2 * w2 + (points - s)
    return float(np.max(np.abs(residual)))


# Routes


def _hastings_mcleod_route(
    s: float, omega: float, x_min: float, x_max: float
) -> CoupledP2Trajectory:
    grid = _dense_grid(x_min, x_max)
    y, slope = hastings_mcleod(0.0).pair(grid)
    potential = y * y
    h = -(potential**2) - grid * potential + slope * slope
    return _from_potential(
        s,
        0.0,
        omega,
        ROUTE_HASTINGS_MCLEOD,
        grid,
        potential,
        2.0 * y * slope,
        h,
        share="all",
    )


def _p34_route(
    s: float, alpha: float, omega: float, x_min: float, x_max: float
) -> CoupledP2Trajectory:
    grid = _dense_grid(x_min, x_max)
    base = p34_transcendent(float(alpha), 0.0, covering_length(x_min - s))
    u, slope, h = base.state(grid - s)
    return _from_potential(
        s, alpha, omega, ROUTE_P34, grid, u, slope, h, share="none"
    )


def _dressing_route(
    s: float, alpha: float, omega: float, x_min: float, x_max: float
) -> CoupledP2Trajectory:
    grid = _dense_grid(x_min, x_max)
    times = grid - s
    base = p34_transcendent(float(alpha), 0.0, covering_length(times[0]))
    u, slope, h = base.state(times)
    dressed = times <= DRESSING_T_MAX
    flow = hat_kernel_flow(base, omega, s, times[dressed])
    u[dressed] -= flow.second
    slope[dressed] -= flow.third
    h[dressed] += flow.first
    return _from_potential(
        s, alpha, omega, ROUTE_DRESSING, grid, u, slope, h, share="fit"
    )


def _collocation_route(
    s: float, alpha: float, omega: float, x_min: float, x_max: float, n_colloc: int
) -> CoupledP2Trajectory:
    count = max(n_colloc, int(round((x_max - x_min) / COUPLED_DENSE_STEP)) + 1)
    grid = np.linspace(x_min, x_max, count)
    left_v1 = -x_min / 2.0
    left_v2 = alpha / math.sqrt(-s)
    right_v2, right_slope = _p34_right(x_max - s, alpha)
    right_w1 = _w1_right(x_max, s, alpha)
    right_w2 = _w2_right(x_max - s, alpha, right_v2, right_slope)

    def fun(x, y):
        return vector_field(x, y, s, alpha)

    def bc(ya, yb):
        return np.array(
            [ya[0] - left_v1, ya[1] - left_v2, yb[2] - right_w1, yb[3] - right_w2]
        )

    y, y_slope = hastings_mcleod(0.0).pair(grid)
    stretched = np.sqrt(smooth_max(grid - s, -s))
    guess = np.vstack([y * y, alpha / stretched, y_slope / y, -stretched])
    label = f"Coupled P2(s={s}, alpha={alpha})"
    result = solve_bvp(
        fun,
        bc,
        grid,
        guess,
        fun_jac=vector_field_jacobian,
        tol=BVP_TOL,
        max_nodes=BVP_MAX_NODES,
    )
    if not result.success:
        raise NewtonDiverged(
            f"{label} collocation failed: {result.message}",
            residual=float(np.max(result.rms_residuals)),
        )
    logger.debug(
        "%s collocation converged on %d nodes in %d iterations",
        label,
        result.x.size,
        result.niter,
    )
    return _tabulated(s, alpha, omega, ROUTE_COLLOCATION, result.x, result.y)


def _from_potential(
    s: float,
    alpha: float,
    omega: float,
    route: str,
    grid: np.ndarray,
    potential: np.ndarray,
    potential_slope: np.ndarray,
    h: np.ndarray,
    share: str,
) -> CoupledP2Trajectory:
    """
    Rebuild v1, v2, w1, w2 from V, V' and H.

    y1 and phi are the recessive solutions of y'' = (x + 2V) y and
    y'' = (x - s + 2V) y, normalized at the grid point closest to s. Then
    w1 = y1'/y1, w2 = phi'/phi and v1 = lambda^2 y1^2. ``share`` fixes
    lambda^2: "all" gives v1 = V, "none" gives v1 = 0 and "fit" matches the
    v2-equation, multiplied by phi^2, by least squares near x = s.
    """
    interval = (grid[-1], grid[0])
    recessive = _recessive_solution(
        grid,
        potential,
        potential_slope,
        0.0,
        _w1_right(grid[-1], s, alpha),
        interval,
    )
    right_v2, right_slope = _p34_right(grid[-1] - s, alpha)
    shifted = _recessive_solution(
        grid,
        potential,
        potential_slope,
        s,
        _w2_right(grid[-1] - s, alpha, right_v2, right_slope),
        interval,
    )
    anchor = int(np.argmin(np.abs(grid - s)))
    recessive /= recessive[0, anchor]
    shifted /= shifted[0, anchor]
    y1, y1_slope = recessive
    phi, phi_slope = shifted
    w1 = y1_slope / y1
    if share == "all":
        scale = potential[anchor] / y1[anchor] ** 2
    elif share == "none":
        scale = 0.0
    else:
        scale = _fit_scale(
            grid, s, alpha, potential, potential_slope, y1, w1, phi, phi_slope
        )
    v1 = scale * y1 * y1
    interpolant = _PotentialInterpolant(
        grid, s, potential, potential_slope, h, recessive, shifted, scale
    )
    logger.debug(
        "Coupled P2 (s=%g, alpha=%g, omega=%g) from its potential, lambda^2=%.6g",
        s,
        alpha,
        omega,
        scale,
    )
    return CoupledP2Trajectory(
        s=float(s),
        alpha=float(alpha),
        omega=float(omega),
        route=route,
        grid=grid,
        v1=v1,
        v2=potential - v1,
        w1=w1,
        w2=phi_slope / phi,
        h=h,
        interpolant=interpolant,
    )


# Internals


def _check_right_end(x: float, s: float):
    if x < max(SEED_MIN_X, s + SEED_MIN_X):
        raise BadParameter(
            f"Right end should be at least max({SEED_MIN_X}, s + {SEED_MIN_X}), "
            f"got {x}",
            x=x,
            s=s,
        )


def _is_dressed(s: float, alpha: float, omega: float) -> bool:
    return s > 0 and omega > 0 and not (alpha == 0 and omega == 1)


def _dense_grid(x_min: float, x_max: float) -> np.ndarray:
    count = int(math.ceil((x_max - x_min) / COUPLED_DENSE_STEP))
    return np.linspace(x_min, x_max, count + 1)


def _values_on(s: float, alpha: float, omega: complex, points: np.ndarray):
    trajectory = covering_trajectory(s, alpha, omega, points.min(), points.max())
    return trajectory.evaluate(points)


def _hamiltonian_values(x, s, alpha, v1, v2, w1, w2):
    potential = v1 + v2
    return (
        -potential * potential
        - potential * x
        + v1 * w1 * w1
        + v2 * w2 * w2
        + s * v2
        + 2.0 * alpha * w2
    )


def _tabulated(
    s: float, alpha: float, omega: float, route: str, grid, states
) -> CoupledP2Trajectory:
    v1, v2, w1, w2 = states
    h = _hamiltonian_values(grid, s, alpha, v1, v2, w1, w2)
    return CoupledP2Trajectory(
        s=float(s),
        alpha=float(alpha),
        omega=float(omega),
        route=route,
        grid=grid,
        v1=v1,
        v2=v2,
        w1=w1,
        w2=w2,
        h=h,
        interpolant=_FieldInterpolant(grid, states, h, s, alpha),
    )


def _p34_right(t: float, alpha: float) -> Tuple[float, float]:
    """u(t; 2 alpha, 0) and u' at large t, zero for alpha = 0."""
    if alpha == 0:
        return 0.0, 0.0
    return p34_plus_infinity_series(t, alpha)


def _w1_right(x: float, s: float, alpha: float) -> float:
    if alpha == 0:
        ai, ai_prime = airy_pair(x)
        return float(ai_prime / ai)
    return -math.sqrt(x) - (alpha + 0.25) / x - alpha * s / (2.0 * x * x)


def _w2_right(t: float, alpha: float, v2: float, v2_slope: float) -> float:
    if alpha == 0:
        ai, ai_prime = airy_pair(t)
        return float(ai_prime / ai)
    return (v2_slope - 2.0 * alpha) / (2.0 * v2)


def _recessive_solution(
    grid: np.ndarray,
    potential: np.ndarray,
    potential_slope: np.ndarray,
    shift: float,
    log_slope: float,
    interval: Tuple[float, float],
) -> np.ndarray:
    """Integrate y'' = (x - shift + 2V) y backward, y = 1 at the right end."""
    spline = CubicHermiteSpline(grid, potential, potential_slope)

    def fun(x, y):
        return np.array([y[1], (x - shift + 2.0 * spline(x)) * y[0]])

    solution = solve_ivp(
        fun,
        interval,
        np.array([1.0, log_slope]),
        method="DOP853",
        t_eval=grid[::-1],
        rtol=IVP_RTOL,
        atol=IVP_ATOL,
    )
    if solution.status != 0 or solution.y.shape[1] != len(grid):
        last_x = float(solution.t[-1]) if len(solution.t) > 0 else interval[0]
        raise StepFailure(
            f"Linear integration stopped at x={last_x}: {solution.message}",
            last_x=last_x,
        )
    return solution.y[:, ::-1].copy()


def _fit_scale(grid, s, alpha, potential, potential_slope, y1, w1, phi, phi_slope):
    """
    Least squares lambda^2 near x = s.

    2 y1^2 (phi phi' - w1 phi^2) lambda^2 = 2V phi phi' + (2 alpha - V') phi^2
    """
    window = np.abs(grid - s) <= COUPLED_FIT_WINDOW
    if not np.any(window):
        window = np.ones_like(grid, dtype=bool)
    numerator = (
        2.0 * potential * phi * phi_slope + (2.0 * alpha - potential_slope) * phi**2
    )[window]
    denominator = (2.0 * y1**2 * (phi * phi_slope - w1 * phi**2))[window]
    return float(np.dot(numerator, denominator) / np.dot(denominator, denominator))


def _linear_splines(grid, coefficient, potential_slope, solution):
    value, slope = solution
    second = coefficient * value
    third = (1.0 + 2.0 * potential_slope) * value + coefficient * slope
    return (
        BPoly.from_derivatives(grid, np.column_stack([value, slope, second])),
        BPoly.from_derivatives(grid, np.column_stack([slope, second, third])),
    )
