"""
Solvers for the Hastings-McLeod solution and the P34 transcendent.

The Hastings-McLeod solution y(x; alpha) of y'' = x y + 2 y^3 - alpha and the
P34 transcendent u(t; 2 alpha, omega) are computed on finite grids by
collocation and extended outside the grids by their asymptotic series.

For omega = 0 the P34 equation is solved in its Hamiltonian form

    u' = 2 u w + 2 alpha,    w' = 2 u + t - w^2,

with Hamiltonian H = u w^2 + 2 alpha w - u^2 - t u and H' = -u. For omega > 0
the omega = 0 solution is dressed by ln det(I + omega K_hat), where K_hat is
the integrable kernel built from the recessive column of the Lax pair, and then
continued to the left by the regular system (u, u', H).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_bvp, solve_ivp
from scipy.interpolate import BPoly, CubicHermiteSpline
from scipy.linalg import lu_factor, lu_solve

from painleve_gap.consts import (
    ASYMPTOTIC_SERIES_TERMS,
    BVP_MAX_NODES,
    BVP_TOL,
    DEFAULT_L,
    DEFAULT_L_PLUS,
    DEFAULT_M,
    DEFAULT_N_COLLOC,
    DRESSING_NODES_PER_UNIT,
    DRESSING_STEP,
    DRESSING_T_MAX,
    DRESSING_T_SWITCH,
    IVP_ATOL,
    IVP_RTOL,
    MIN_L,
    MIN_N_COLLOC,
    TRUNCATION_EPS,
)
from painleve_gap.exceptions import (
    BadParameter,
    DomainError,
    NewtonDiverged,
    StepFailure,
)
from painleve_gap.fredholm import (
    integrate,
    logdet_of_factors,
    singular_point_quadrature,
    soft_edge_cutoff,
)
from painleve_gap.lax import LaxData, evolve_in_t, integrate_columns, kernel_matrix
from painleve_gap.specfun import airy_pair, gamma_ratio

logger = logging.getLogger(__name__)

CUBE_ROOT_2 = 2.0 ** (1.0 / 3.0)

Triple = Tuple[Any, Any, Any]


def real_omega(omega: complex) -> float:
    """
    Validate the thinning parameter.

    :param omega: Thinning parameter
    :type omega: complex
    :return: omega as a float
    :rtype: float
    :raises BadParameter: if omega is complex or negative
    """
    value = complex(omega)
    if value.imag != 0:
        raise BadParameter(
            f"Only real omega is evaluated, got {value}", omega=str(value)
        )
    if value.real < 0:
        raise BadParameter(
            f"omega should not be negative, got {value.real}", omega=value.real
        )
    return value.real


def beta_of_omega(omega: complex) -> complex:
    """beta with omega = exp(-2 pi i beta), purely imaginary for omega > 0."""
    value = real_omega(omega)
    if value == 0:
        raise BadParameter("beta is infinite at omega = 0", omega=value)
    return 1j * math.log(value) / (2.0 * math.pi)


def covering_length(t_min: float) -> float:
    """Left extent L of a grid that contains t_min with room to spare."""
    return float(max(DEFAULT_L, math.ceil(max(-t_min, 0.0)) + 2.0))


# Asymptotic series


def p2_plus_infinity_series(
    x: float, alpha: float, n_terms: int = ASYMPTOTIC_SERIES_TERMS
) -> Tuple[float, float]:
    """
    Algebraic expansion y ~ sum d_k x^(-3k-1) of y(x; alpha) at +inf.

    The series vanishes identically for alpha = 0, where the solution is
    exponentially small.

    :param x: Positive point
    :type x: float
    :param alpha: Parameter of the equation
    :type alpha: float
    :param n_terms: Number of coefficients computed
    :type n_terms: int
    :return: y and y' at x
    :rtype: Tuple[float, float]
    :raises DomainError: if x is not positive
    """
    if x <= 0:
        raise DomainError(f"Expansion at +inf needs x > 0, got {x}", x=x)
    coefficients = _p2_plus_coefficients(float(alpha), n_terms)
    exponents = -3.0 * np.arange(n_terms) - 1.0
    return _truncated_power_sum(coefficients, exponents, float(x))


def p2_minus_infinity_series(
    x: float, alpha: float, n_terms: int = ASYMPTOTIC_SERIES_TERMS
) -> Tuple[float, float]:
    """
    Expansion of y(x; alpha) at -inf in powers of (-x)^(1/2 - 3k/2).

    The leading terms are sqrt(-x/2) - alpha / (2x).

    :param x: Negative point
    :type x: float
    :param alpha: Parameter of the equation
    :type alpha: float
    :param n_terms: Number of coefficients computed
    :type n_terms: int
    :return: y and y' at x
    :rtype: Tuple[float, float]
    :raises DomainError: if x is not negative
    """
    if x >= 0:
        raise DomainError(f"Expansion at -inf needs x < 0, got {x}", x=x)
    coefficients = _p2_minus_coefficients(float(alpha), n_terms)
    exponents = 0.5 - 1.5 * np.arange(n_terms)
    value, slope = _truncated_power_sum(coefficients, exponents, -float(x))
    return value, -slope


def p34_plus_infinity_series(
    t: float, alpha: float, n_terms: int = ASYMPTOTIC_SERIES_TERMS
) -> Tuple[float, float]:
    """Algebraic expansion u ~ alpha t^(-1/2) - alpha^2 t^(-2) + ... at +inf."""
    if t <= 0:
        raise DomainError(f"Expansion at +inf needs t > 0, got {t}", t=t)
    coefficients = _p34_plus_coefficients(float(alpha), n_terms)
    exponents = -0.5 * np.arange(len(coefficients))
    return _truncated_power_sum(coefficients, exponents, float(t))


def p34_minus_infinity_branch(
    t: float, alpha: float, n_terms: int = ASYMPTOTIC_SERIES_TERMS
) -> Tuple[float, float]:
    """
    The omega = 0 branch u ~ -t/2 + (16 alpha^2 - 1) / (8 t^2) at -inf.

    :param t: Negative point
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param n_terms: Number of coefficients computed
    :type n_terms: int
    :return: u and u' at t
    :rtype: Tuple[float, float]
    :raises DomainError: if t is not negative
    """
    if t >= 0:
        raise DomainError(f"Expansion at -inf needs t < 0, got {t}", t=t)
    coefficients = _p34_minus_coefficients(float(alpha), n_terms)
    exponents = 1.0 - 3.0 * np.arange(n_terms)
    value, slope = _truncated_power_sum(coefficients, exponents, -float(t))
    return value, -slope


def p2_minus_infinity_coefficients(
    alpha: float, n_terms: int = ASYMPTOTIC_SERIES_TERMS
) -> np.ndarray:
    """Coefficients c_k of y(x; alpha) ~ sum c_k (-x)^(1/2 - 3k/2) at -inf."""
    return np.array(_p2_minus_coefficients(float(alpha), n_terms))


def p34_plus_infinity_coefficients(
    alpha: float, n_terms: int = ASYMPTOTIC_SERIES_TERMS
) -> np.ndarray:
    """Coefficients b_j of u(t; 2 alpha, 0) ~ sum b_j t^(-j/2) at +inf."""
    return np.array(_p34_plus_coefficients(float(alpha), n_terms))


def minus_infinity_oscillatory(t: float, alpha: float, omega: float) -> float:
    """
    Oscillatory behaviour of u(t; 2 alpha, omega) at -inf for omega > 0.

    u ~ |t|^(-1/2) Re[i beta + G exp(i theta) / 2 + G' exp(-i theta) / 2] with
    G = Gamma(1 + alpha - beta) / Gamma(alpha + beta),
    G' = Gamma(1 + alpha + beta) / Gamma(alpha - beta) and the phase
    theta = (4/3)|t|^(3/2) - alpha pi - 6 i beta ln 2 - 3 i beta ln|t|.

    :param t: Negative point
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Positive thinning parameter
    :type omega: float
    :return: Leading behaviour of u at t
    :rtype: float
    :raises DomainError: if t is not negative
    """
    if t >= 0:
        raise DomainError(f"Expansion at -inf needs t < 0, got {t}", t=t)
    beta = beta_of_omega(omega)
    distance = -t
    first = gamma_ratio(1.0 + alpha - beta, alpha + beta)
    second = gamma_ratio(1.0 + alpha + beta, alpha - beta)
    phase = (
        4.0 / 3.0 * distance**1.5
        - alpha * math.pi
        - 6j * beta * math.log(2.0)
        - 3j * beta * math.log(distance)
    )
    value = (
        1j * beta
        + 0.5 * first * np.exp(1j * phase)
        + 0.5 * second * np.exp(-1j * phase)
    )
    return float(value.real) / math.sqrt(distance)


# Hastings-McLeod solution


@dataclass(frozen=True, eq=False)
class HMSolution:
    """
    Hastings-McLeod solution y(x; alpha) tabulated on [-L, L].

    Between grid points y and y' are quintic Hermite interpolants, using the
    second and third derivatives given by the equation. Outside the grid the
    asymptotic series are used, or Ai for alpha = 0 at +inf.
    """

    alpha: float
    L: float
    grid: np.ndarray
    y: np.ndarray
    y_prime: np.ndarray
    _value_spline: BPoly = field(init=False, repr=False)
    _slope_spline: BPoly = field(init=False, repr=False)

    def __post_init__(self):
        """Build the interpolants."""
        x, y, slope = self.grid, self.y, self.y_prime
        second = x * y + 2.0 * y**3 - self.alpha
        third = y + x * slope + 6.0 * y**2 * slope
        object.__setattr__(
            self,
            "_value_spline",
            BPoly.from_derivatives(x, np.column_stack([y, slope, second])),
        )
        object.__setattr__(
            self,
            "_slope_spline",
            BPoly.from_derivatives(x, np.column_stack([slope, second, third])),
        )

    def evaluate(self, x):
        """y at a point or array of points."""
        return self.pair(x)[0]

    def derivative(self, x):
        """y' at a point or array of points."""
        return self.pair(x)[1]

    def pair(self, x):
        """
        y and y' together.

        :param x: Point or array of points
        :type x: float or numpy.ndarray
        :return: y(x) and y'(x)
        :rtype: Tuple
        """
        return _evaluate_piecewise(
            x,
            self.grid,
            (self._value_spline, self._slope_spline),
            self._outside,
        )

    def to_frame(self) -> pd.DataFrame:
        """Table with columns x, y, y_prime."""
        return pd.DataFrame({"x": self.grid, "y": self.y, "y_prime": self.y_prime})

    def _outside(self, x: float) -> Tuple[float, float]:
        if x < self.grid[0]:
            return p2_minus_infinity_series(x, self.alpha)
        if self.alpha == 0:
            return airy_pair(x)
        return p2_plus_infinity_series(x, self.alpha)


def solve_hastings_mcleod(
    alpha: float, L: float = DEFAULT_L, n_colloc: int = DEFAULT_N_COLLOC
) -> HMSolution:
    """
    Solve for the Hastings-McLeod solution by collocation on [-L, L].

    Both ends carry Robin conditions that remove the growing mode of the
    linearized equation, with data from the asymptotic series.

    :param alpha: Parameter of the equation, above -1/2
    :type alpha: float
    :param L: Half width of the grid
    :type L: float
    :param n_colloc: Number of initial collocation nodes
    :type n_colloc: int
    :return: The solution
    :rtype: HMSolution
    :raises BadParameter: if alpha <= -1/2 or the budgets are too small
    :raises NewtonDiverged: if collocation fails
    """
    if alpha <= -0.5:
        raise BadParameter(
            f"Hastings-McLeod needs alpha > -1/2, got {alpha}", alpha=alpha
        )
    _check_budgets(L, n_colloc)
    grid = np.linspace(-L, L, n_colloc)
    left_value, left_slope = p2_minus_infinity_series(-L, alpha)
    left_rate = math.sqrt(2.0 * L) + 1.0 / (4.0 * L)
    right_value, right_slope = _hm_right_data(L, alpha)
    ai, ai_prime = airy_pair(L)
    right_rate = ai_prime / ai

    def fun(x, y):
        return np.vstack([y[1], x * y[0] + 2.0 * y[0] ** 3 - alpha])

    def fun_jac(x, y):
        jacobian = np.zeros((2, 2, x.size))
        jacobian[0, 1] = 1.0
        jacobian[1, 0] = x + 6.0 * y[0] ** 2
        return jacobian

    def bc(ya, yb):
        return np.array(
            [
                ya[1] - left_rate * ya[0] - (left_slope - left_rate * left_value),
                yb[1] - right_rate * yb[0] - (right_slope - right_rate * right_value),
            ]
        )

    result = _run_bvp(
        fun, bc, grid, _hm_guess(grid, alpha), fun_jac, f"Hastings-McLeod({alpha})"
    )
    return HMSolution(
        alpha=float(alpha),
        L=float(L),
        grid=result.x,
        y=result.y[0],
        y_prime=result.y[1],
    )


@lru_cache(maxsize=32)
def hastings_mcleod(alpha: float, L: float = DEFAULT_L) -> HMSolution:
    """Hastings-McLeod solution with the default budget, computed once."""
    return solve_hastings_mcleod(float(alpha), float(L))


# P34 transcendent


@dataclass(frozen=True, eq=False)
class P34Transcendent:
    """
    The transcendent u(t; 2 alpha, omega), with u' and H, on [-L, L_plus].

    Quintic Hermite interpolants use u'' = 2H + 6u^2 + 4tu and H' = -u, which
    hold for every solution and stay regular through zeros of u. For omega = 0
    the auxiliary variable w = (u' - 2 alpha) / (2u) is kept as well.
    """

    alpha: float
    omega: float
    L: float
    L_plus: float
    grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    h: np.ndarray
    w: Optional[np.ndarray] = None
    _splines: Tuple[BPoly, BPoly, BPoly] = field(init=False, repr=False)

    def __post_init__(self):
        """Build the interpolants."""
        t, u, slope, h = self.grid, self.u, self.u_prime, self.h
        second = 2.0 * h + 6.0 * u**2 + 4.0 * t * u
        third = 2.0 * u + 12.0 * u * slope + 4.0 * t * slope
        object.__setattr__(
            self,
            "_splines",
            (
                BPoly.from_derivatives(t, np.column_stack([u, slope, second])),
                BPoly.from_derivatives(t, np.column_stack([slope, second, third])),
                BPoly.from_derivatives(t, np.column_stack([h, -u, -slope])),
            ),
        )

    @property
    def beta(self) -> Optional[complex]:
        """beta with omega = exp(-2 pi i beta), None for omega = 0."""
        if self.omega == 0:
            return None
        return beta_of_omega(self.omega)

    def evaluate(self, t):
        """u at a point or array of points."""
        return self.state(t)[0]

    def derivative(self, t):
        """u' at a point or array of points."""
        return self.state(t)[1]

    def hamiltonian(self, t):
        """H at a point or array of points."""
        return self.state(t)[2]

    def state(self, t) -> Triple:
        """
        u, u' and H together.

        :param t: Point or array of points
        :type t: float or numpy.ndarray
        :return: u(t), u'(t) and H(t)
        :rtype: Tuple
        :raises DomainError: left of the grid when omega > 0
        """
        return _evaluate_piecewise(t, self.grid, self._splines, self._outside)

    def auxiliary(self, t):
        """
        w = (u' - 2 alpha) / (2u), tabulated for omega = 0 only.

        :param t: Point or array of points
        :type t: float or numpy.ndarray
        :return: w(t)
        :raises BadParameter: if w was not tabulated
        """
        if self.w is None:
            raise BadParameter("w is only tabulated for omega = 0", omega=self.omega)
        spline = CubicHermiteSpline(
            self.grid, self.w, 2.0 * self.u + self.grid - self.w**2
        )

        def outside(point: float) -> Tuple[float]:
            u, slope, _ = self._outside(point)
            return ((slope - 2.0 * self.alpha) / (2.0 * u),)

        return _evaluate_piecewise(t, self.grid, (spline,), outside)[0]

    def lax_data(self, t: float) -> LaxData:
        """Coefficients of the zeta-equation at t."""
        u, slope, h = self.state(float(t))
        return LaxData.from_hamiltonian(float(t), self.alpha, u, slope, h)

    def to_frame(self) -> pd.DataFrame:
        """Table with columns t, u, u_prime, hamiltonian."""
        return pd.DataFrame(
            {
                "t": self.grid,
                "u": self.u,
                "u_prime": self.u_prime,
                "hamiltonian": self.h,
            }
        )

    def _outside(self, t: float) -> Tuple[float, float, float]:
        if t > self.grid[-1]:
            if self.alpha == 0:
                ai, ai_prime = airy_pair(t)
                factor = 1.0 - self.omega
                return (
                    factor * ai * ai,
                    2.0 * factor * ai * ai_prime,
                    factor * (ai_prime**2 - t * ai * ai),
                )
            u, slope = p34_plus_infinity_series(t, self.alpha)
            return u, slope, _hamiltonian_from_slope(t, self.alpha, u, slope)
        if self.omega != 0:
            raise DomainError(
                f"u(t; omega={self.omega}) is tabulated down to t={self.grid[0]}",
                t=t,
            )
        u, slope = p34_minus_infinity_branch(t, self.alpha)
        return u, slope, _hamiltonian_from_slope(t, self.alpha, u, slope)


@dataclass(frozen=True)
class HatFlow:
    """ln det(I + omega K_hat) on (0, upper) and its first three t-derivatives."""

    t: np.ndarray
    log_det: np.ndarray
    first: np.ndarray
    second: np.ndarray
    third: np.ndarray
    upper: float
    omega: float
    m: int


def solve_p34_u(
    alpha: float,
    omega: complex,
    L: float = DEFAULT_L,
    L_plus: float = DEFAULT_L_PLUS,
    n_colloc: int = DEFAULT_N_COLLOC,
) -> P34Transcendent:
    """
    Compute the P34 transcendent u(t; 2 alpha, omega) on [-L, L_plus].

    omega = 0 is solved by collocation. Positive omega dresses the omega = 0
    solution on [0, min(L_plus, 8)] and continues it leftwards with the
    regular system (u, u', H).

    :param alpha: Kernel parameter, above -1/2
    :type alpha: float
    :param omega: Thinning parameter, real and nonnegative
    :type omega: complex
    :param L: Left extent of the grid
    :type L: float
    :param L_plus: Right extent of the grid
    :type L_plus: float
    :param n_colloc: Number of initial collocation nodes
    :type n_colloc: int
    :return: The transcendent
    :rtype: P34Transcendent
    :raises BadParameter: on parameters outside the validated range
    :raises NewtonDiverged: if collocation fails
    :raises StepFailure: if the continuation to the left stops
    """
    if alpha <= -0.5:
        raise BadParameter(f"P34 needs alpha > -1/2, got {alpha}", alpha=alpha)
    omega_value = real_omega(omega)
    _check_budgets(L, n_colloc)
    _check_budgets(L_plus, n_colloc)
    if omega_value == 0:
        return _solve_p34_omega_zero(float(alpha), float(L), float(L_plus), n_colloc)
    if alpha == 0 and omega_value == 1:
        grid = np.linspace(-L, L_plus, n_colloc)
        zeros = np.zeros_like(grid)
        return P34Transcendent(
            alpha=0.0,
            omega=1.0,
            L=float(L),
            L_plus=float(L_plus),
            grid=grid,
            u=zeros,
            u_prime=zeros.copy(),
            h=zeros.copy(),
        )
    if n_colloc == DEFAULT_N_COLLOC:
        base = p34_transcendent(float(alpha), 0.0, float(L), float(L_plus))
    else:
        base = _solve_p34_omega_zero(float(alpha), float(L), float(L_plus), n_colloc)
    return _dress(base, omega_value, float(L), float(L_plus))


@lru_cache(maxsize=64)
def p34_transcendent(
    alpha: float,
    omega: float = 0.0,
    L: float = DEFAULT_L,
    L_plus: float = DEFAULT_L_PLUS,
) -> P34Transcendent:
    """P34 transcendent with the default budget, computed once."""
    return solve_p34_u(float(alpha), float(omega), float(L), float(L_plus))


def hat_kernel_flow(
    base: P34Transcendent,
    omega: float,
    upper: float,
    t_grid: Sequence[float],
    m: Optional[int] = None,
) -> HatFlow:
    """
    Evaluate ln det(I + omega K_hat) on (0, upper) along a grid of t.

    K_hat is built from the recessive column (p, q) of the Lax pair driven by
    the omega = 0 transcendent. Since dK_hat/dt = -p p^T / (2 pi), the
    derivatives in t are closed forms in the moments of (I + omega K_hat)^-1.
    The columns are computed once at the largest t and carried to the other
    times by the t-equation, integrated downward.

    :param base: The omega = 0 transcendent
    :type base: P34Transcendent
    :param omega: Thinning parameter
    :type omega: float
    :param upper: Right end of the interval
    :type upper: float
    :param t_grid: Ascending values of t
    :type t_grid: Sequence[float]
    :param m: Number of quadrature nodes. Scales with ``upper`` by default
    :type m: Optional[int]
    :return: The log-determinant and its derivatives on the grid
    :rtype: HatFlow
    :raises BadParameter: if base is not the omega = 0 transcendent
    """
    if base.omega != 0:
        raise BadParameter("Dressing starts from the omega = 0 transcendent")
    omega = real_omega(omega)
    if m is None:
        m = max(DEFAULT_M, int(math.ceil(DRESSING_NODES_PER_UNIT * upper)))
    rule = singular_point_quadrature(m, (0.0, float(upper)), 2.0 * base.alpha)
    nodes = rule.nodes
    root_weights = np.sqrt(rule.weights)
    times = np.asarray(t_grid, dtype=float)
    descending = times[::-1]
    columns = integrate_columns(nodes, base.lax_data(descending[0]), omega=1.0)
    p_rows, q_rows = evolve_in_t(
        nodes, columns.p, columns.q, descending, base.evaluate
    )
    p_rows, q_rows = p_rows[::-1], q_rows[::-1]
    scale = omega / (2.0 * math.pi)
    size = len(times)
    log_det, first, second, third = (np.empty(size) for _ in range(4))
    identity = np.eye(len(nodes))
    for index, time in enumerate(times):
        lax = base.lax_data(time)
        kernel = kernel_matrix(nodes, p_rows[index], q_rows[index], lax)
        factors = lu_factor(
            identity + omega * root_weights[:, None] * kernel * root_weights[None, :]
        )
        log_det[index], _ = logdet_of_factors(factors)
        f_values = root_weights * p_rows[index]
        g_values = root_weights * q_rows[index]
        right_sides = np.column_stack([f_values, g_values, nodes * f_values])
        solved = lu_solve(factors, right_sides)
        ff = f_values @ solved[:, 0]
        gf = g_values @ solved[:, 0]
        gg = g_values @ solved[:, 1]
        fzf = f_values @ solved[:, 2]
        ff_prime = 2.0 * gf + scale * ff * ff
        gf_prime = fzf + (2.0 * lax.u + time) * ff + scale * ff * gf + gg
        first[index] = -scale * ff
        second[index] = -scale * ff_prime
        third[index] = -scale * (2.0 * gf_prime + 2.0 * scale * ff * ff_prime)
    logger.debug(
        "Hat kernel flow on (0, %.3g) with %d nodes over %d times",
        upper,
        len(nodes),
        size,
    )
    return HatFlow(
        t=times,
        log_det=log_det,
        first=first,
        second=second,
        third=third,
        upper=float(upper),
        omega=omega,
        m=len(nodes),
    )


def p34_rhs(t: float, state: np.ndarray) -> np.ndarray:
    """The regular system u' = v, v' = 2H + 6u^2 + 4tu, H' = -u."""
    u, slope, h = state
    return np.array([slope, 2.0 * h + 6.0 * u * u + 4.0 * t * u, -u])


# Identities


def check_p34_p2_relation(alpha: float, omega: float, t_grid: Sequence[float]) -> float:
    """
    Largest deviation from 2^(1/3) u(-2^(-1/3) t; 2 alpha, 0) = y' + y^2 + t/2.

    y is the Hastings-McLeod solution with parameter 2 alpha + 1/2.

    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter, must be 0
    :type omega: float
    :param t_grid: Points of the check
    :type t_grid: Sequence[float]
    :return: Maximum absolute residual
    :rtype: float
    :raises BadParameter: if omega is not 0
    """
    if real_omega(omega) != 0:
        raise BadParameter(
            "The P34-P2 relation holds for omega = 0, where the tronquee "
            "solution is Hastings-McLeod",
            omega=omega,
        )
    points = np.atleast_1d(np.asarray(t_grid, dtype=float))
    arguments = -points / CUBE_ROOT_2
    transcendent = p34_transcendent(float(alpha), 0.0, covering_length(arguments.min()))
    y, slope = hastings_mcleod(2.0 * alpha + 0.5).pair(points)
    residual = CUBE_ROOT_2 * transcendent.evaluate(arguments) - (
        slope + y**2 + points / 2.0
    )
    return float(np.max(np.abs(residual)))


def p34_backlund_residual(alpha: float, x_grid: Sequence[float]) -> float:
    """
    Largest deviation from u(x; 2a+1, 0) - u(x; 2a, 0) = -2^(2/3) y'(-2^(1/3) x).

    y is the Hastings-McLeod solution with parameter 2 alpha + 1/2.
    """
    points = np.atleast_1d(np.asarray(x_grid, dtype=float))
    length = covering_length(points.min())
    lower = p34_transcendent(float(alpha), 0.0, length)
    upper = p34_transcendent(float(alpha) + 0.5, 0.0, length)
    slope = hastings_mcleod(2.0 * alpha + 0.5).derivative(-CUBE_ROOT_2 * points)
    residual = (
        upper.evaluate(points) - lower.evaluate(points) + CUBE_ROOT_2**2 * slope
    )
    return float(np.max(np.abs(residual)))


def p2_backlund_residual(alpha: float, x_grid: Sequence[float]) -> float:
    """
    Largest deviation from y(2a+3/2) + y(2a+1/2) = (2a+1) / (y^2 - y' + x/2).

    :param alpha: Parameter a of the shift
    :type alpha: float
    :param x_grid: Points of the check
    :type x_grid: Sequence[float]
    :return: Maximum absolute residual
    :rtype: float
    """
    points = np.atleast_1d(np.asarray(x_grid, dtype=float))
    y, slope = hastings_mcleod(2.0 * alpha + 0.5).pair(points)
    shifted = hastings_mcleod(2.0 * alpha + 1.5).evaluate(points)
    residual = shifted + y - (2.0 * alpha + 1.0) / (y**2 - slope + points / 2.0)
    return float(np.max(np.abs(residual)))


def p34_sum_relation_residual(alpha: float, x_grid: Sequence[float]) -> float:
    """
    Largest deviation from the sum relation of the P34 transcendents.

    u(x; a+1/2, 0) + u(x; a-1/2, 0) = 2^(2/3) y^2(-2^(1/3) x; a) - x.
    """
    points = np.atleast_1d(np.asarray(x_grid, dtype=float))
    length = covering_length(points.min())
    lower = p34_transcendent((alpha - 0.5) / 2.0, 0.0, length)
    upper = p34_transcendent((alpha + 0.5) / 2.0, 0.0, length)
    y = hastings_mcleod(float(alpha)).evaluate(-CUBE_ROOT_2 * points)
    residual = (
        upper.evaluate(points) + lower.evaluate(points) - CUBE_ROOT_2**2 * y**2 + points
    )
    return float(np.max(np.abs(residual)))


def tw_log_cdf(s: float, L: float = DEFAULT_L) -> float:
    """
    ln F_TW(s) = -int_s^inf (x - s) y(x; 0)^2 dx.

    Beyond the grid y is Ai and the tail is integrated in closed form.

    :param s: Point
    :type s: float
    :param L: Half width of the Hastings-McLeod grid
    :type L: float
    :return: Logarithm of the Tracy-Widom distribution
    :rtype: float
    """
    solution = hastings_mcleod(0.0, float(L))
    end = max(float(s), float(solution.grid[-1]))
    body = integrate(lambda x: (x - s) * solution.evaluate(x) ** 2, (s, end))
    ai, ai_prime = airy_pair(end)
    tail = -(end**2 * ai**2 - end * ai_prime**2 + ai * ai_prime) / 3.0 - s * (
        ai_prime**2 - end * ai**2
    )
    return -(body + tail)


def tw_cdf(s: float) -> float:
    """Tracy-Widom distribution F_TW(s)."""
    return math.exp(tw_log_cdf(s))


# Internals


def _check_budgets(length: float, n_colloc: int):
    if length < MIN_L:
        raise BadParameter(
            f"Grid extent should be at least {MIN_L}, got {length}", length=length
        )
    if n_colloc < MIN_N_COLLOC:
        raise BadParameter(
            f"Need at least {MIN_N_COLLOC} collocation nodes, got {n_colloc}",
            n_colloc=n_colloc,
        )


def _evaluate_piecewise(
    x,
    grid: np.ndarray,
    splines: Sequence[BPoly],
    outside: Callable[[float], Sequence[float]],
):
    points = np.asarray(x, dtype=float)
    scalar = points.ndim == 0
    points = np.atleast_1d(points)
    values = [np.empty_like(points) for _ in splines]
    inside = (points >= grid[0]) & (points <= grid[-1])
    if np.any(inside):
        for column, spline in zip(values, splines):
            column[inside] = spline(points[inside])
    for index in np.flatnonzero(~inside):
        for column, value in zip(values, outside(float(points[index]))):
            column[index] = value
    if scalar:
        return tuple(float(column[0]) for column in values)
    return tuple(values)


def _truncated_power_sum(
    coefficients: Sequence[float], exponents: Sequence[float], variable: float
) -> Tuple[float, float]:
    """sum c_k v^e_k and its v-derivative, stopping before the first growing term."""
    values = []
    slopes = []
    previous = math.inf
    for coefficient, exponent in zip(coefficients, exponents):
        if coefficient == 0:
            continue
        term = coefficient * variable**exponent
        if abs(term) > previous:
            break
        previous = abs(term)
        values.append(term)
        slopes.append(term * exponent / variable)
    return math.fsum(values), math.fsum(slopes)


def _power_coefficient(coefficients: np.ndarray, power: int, index: int) -> float:
    """Coefficient of a given index in the power of a series."""
    product = np.asarray(coefficients, dtype=float)
    for _ in range(power - 1):
        product = np.convolve(product, coefficients)
    if index >= len(product):
        return 0.0
    return float(product[index])


@lru_cache(maxsize=64)
def _p2_plus_coefficients(alpha: float, n_terms: int) -> Tuple[float, ...]:
    coefficients = np.zeros(n_terms)
    coefficients[0] = alpha
    for n in range(1, n_terms):
        cube = _power_coefficient(coefficients[:n], 3, n - 1)
        coefficients[n] = (3 * n - 2) * (3 * n - 1) * coefficients[n - 1] - 2.0 * cube
    return tuple(coefficients)


@lru_cache(maxsize=64)
def _p2_minus_coefficients(alpha: float, n_terms: int) -> Tuple[float, ...]:
    coefficients = np.zeros(n_terms)
    coefficients[0] = 1.0 / math.sqrt(2.0)
    for n in range(1, n_terms):
        # coefficients[n] is still 0, so this is the cube without it
        remainder = _power_coefficient(coefficients[: n + 1], 3, n)
        source = alpha if n == 1 else 0.0
        if n >= 2:
            j = n - 2
            source += (9.0 * j * j - 1.0) / 4.0 * coefficients[j]
        coefficients[n] = source / 2.0 - remainder
    return tuple(coefficients)


@lru_cache(maxsize=64)
def _p34_minus_coefficients(alpha: float, n_terms: int) -> Tuple[float, ...]:
    """Coefficients a_k of u = sum a_k tau^(1-3k), tau = -t."""
    coefficients = np.zeros(n_terms)
    coefficients[0] = 0.5
    exponents = 1.0 - 3.0 * np.arange(n_terms)
    for n in range(1, n_terms):
        source = 4.0 * alpha * alpha if n == 1 else 0.0
        for i in range(n):
            j = n - 1 - i
            source += (
                coefficients[i]
                * coefficients[j]
                * exponents[j]
                * (2.0 * (exponents[j] - 1.0) - exponents[i])
            )
        head = coefficients[: n + 1]
        source += 4.0 * _power_coefficient(head, 2, n)
        source -= 8.0 * _power_coefficient(head, 3, n)
        coefficients[n] = source / 2.0
    return tuple(coefficients)


@lru_cache(maxsize=64)
def _p34_plus_coefficients(alpha: float, n_terms: int) -> Tuple[float, ...]:
    """Coefficients b_j of u = sum b_j t^(-j/2)."""
    coefficients = np.zeros(n_terms + 1)
    if alpha == 0:
        return tuple(coefficients)
    coefficients[1] = alpha
    for n in range(3, n_terms + 2):
        source = _p34_plus_source(coefficients, n)
        partial = sum(coefficients[i] * coefficients[n - i] for i in range(2, n - 1))
        coefficients[n - 1] = (source - 4.0 * partial) / (8.0 * alpha)
    return tuple(coefficients)


def _p34_plus_source(coefficients: np.ndarray, n: int) -> float:
    """Coefficient of s^n in 2 s^2 u u'' - s^2 u'^2 - 8 s^2 u^3, s = t^(-1/2)."""
    size = n + 1
    u = np.zeros(size)
    slope = np.zeros(size)
    second = np.zeros(size)
    for j in range(min(len(coefficients), size)):
        u[j] = coefficients[j]
        if j + 2 < size:
            slope[j + 2] = -j / 2.0 * coefficients[j]
        if j + 4 < size:
            second[j + 4] = j * (j + 2) / 4.0 * coefficients[j]
    index = n - 2
    return (
        2.0 * float(np.convolve(u, second)[index])
        - float(np.convolve(slope, slope)[index])
        - 8.0 * _power_coefficient(u, 3, index)
    )


def _hamiltonian_from_slope(t: float, alpha: float, u: float, slope: float) -> float:
    """H from u and u', through H + u^2 + t u = (u'^2 - 4 alpha^2) / (4 u)."""
    return (slope * slope - 4.0 * alpha * alpha) / (4.0 * u) - u * u - t * u


def _hm_right_data(x: float, alpha: float) -> Tuple[float, float]:
    if alpha == 0:
        return airy_pair(x)
    return p2_plus_infinity_series(x, alpha)


def _hm_guess(grid: np.ndarray, alpha: float) -> np.ndarray:
    """Left and right branches joined by a cubic Hermite on [-1, 1]."""

    def left(x):
        root = math.sqrt(-x / 2.0)
        return root - alpha / (2.0 * x), -1.0 / (4.0 * root) + alpha / (2.0 * x * x)

    def right(x):
        if alpha == 0:
            return airy_pair(x)
        return alpha / x, -alpha / (x * x)

    left_value, left_slope = left(-1.0)
    right_value, right_slope = right(1.0)
    bridge = CubicHermiteSpline(
        [-1.0, 1.0], [left_value, right_value], [left_slope, right_slope]
    )
    bridge_slope = bridge.derivative()
    guess = np.empty((2, len(grid)))
    for index, x in enumerate(grid):
        if x <= -1.0:
            guess[:, index] = left(x)
        elif x >= 1.0:
            guess[:, index] = right(x)
        else:
            guess[:, index] = bridge(x), bridge_slope(x)
    return guess


def _solve_p34_omega_zero(
    alpha: float, L: float, L_plus: float, n_colloc: int
) -> P34Transcendent:
    """Collocation of u' = 2uw + 2 alpha, w' = 2u + t - w^2 on [-L, L_plus]."""
    grid = np.linspace(-L, L_plus, n_colloc)
    left_u, _ = p34_minus_infinity_branch(-L, alpha)
    if alpha == 0:
        ai, ai_prime = airy_pair(L_plus)
        right_w = ai_prime / ai
    else:
        right_u, right_slope = p34_plus_infinity_series(L_plus, alpha)
        right_w = (right_slope - 2.0 * alpha) / (2.0 * right_u)

    def fun(t, y):
        u, w = y
        return np.vstack([2.0 * u * w + 2.0 * alpha, 2.0 * u + t - w * w])

    def fun_jac(t, y):
        u, w = y
        jacobian = np.empty((2, 2, t.size))
        jacobian[0, 0] = 2.0 * w
        jacobian[0, 1] = 2.0 * u
        jacobian[1, 0] = 2.0
        jacobian[1, 1] = -2.0 * w
        return jacobian

    def bc(ya, yb):
        return np.array([ya[0] - left_u, yb[1] - right_w])

    # 2^(1/3) u(t) = y' + y^2 + T/2 and w(t) = -2^(1/3) y(T), T = -2^(1/3) t
    hm = hastings_mcleod(2.0 * alpha + 0.5)
    argument = -CUBE_ROOT_2 * grid
    y, slope = hm.pair(argument)
    guess = np.vstack([(slope + y**2 + argument / 2.0) / CUBE_ROOT_2, -CUBE_ROOT_2 * y])
    result = _run_bvp(fun, bc, grid, guess, fun_jac, f"P34({alpha}, omega=0)")
    t = result.x
    u, w = result.y
    return P34Transcendent(
        alpha=alpha,
        omega=0.0,
        L=L,
        L_plus=L_plus,
        grid=t,
        u=u,
        u_prime=2.0 * u * w + 2.0 * alpha,
        h=u * w * w + 2.0 * alpha * w - u * u - t * u,
        w=w,
    )


def _dress(
    base: P34Transcendent, omega: float, L: float, L_plus: float
) -> P34Transcendent:
    t_high = min(L_plus, DRESSING_T_MAX)
    count = int(round((t_high - DRESSING_T_SWITCH) / DRESSING_STEP)) + 1
    t_grid = np.linspace(DRESSING_T_SWITCH, t_high, count)
    upper = soft_edge_cutoff(DRESSING_T_SWITCH, base.alpha, TRUNCATION_EPS)
    flow = hat_kernel_flow(base, omega, upper, t_grid)
    u0, slope0, h0 = base.state(t_grid)
    u = u0 - flow.second
    slope = slope0 - flow.third
    h = h0 + flow.first
    left_grid, left_states = _continue_left(t_grid[0], (u[0], slope[0], h[0]), L)
    tail = base.grid > t_high
    logger.debug(
        "Dressed P34(%s, omega=%s) on [%g, %g], continued to %g",
        base.alpha,
        omega,
        t_grid[0],
        t_high,
        -L,
    )
    return P34Transcendent(
        alpha=base.alpha,
        omega=omega,
        L=L,
        L_plus=L_plus,
        grid=np.concatenate([left_grid, t_grid, base.grid[tail]]),
        u=np.concatenate([left_states[0], u, base.u[tail]]),
        u_prime=np.concatenate([left_states[1], slope, base.u_prime[tail]]),
        h=np.concatenate([left_states[2], h, base.h[tail]]),
    )


def _continue_left(
    start: float, state: Sequence[float], L: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Integrate the regular system from start down to -L, ascending output."""
    count = int(round((start + L) / DRESSING_STEP))
    if count <= 0:
        return np.empty(0), np.empty((3, 0))
    t_eval = np.linspace(start, -L, count + 1)[1:]
    solution = solve_ivp(
        p34_rhs,
        (start, -L),
        np.asarray(state, dtype=float),
        method="DOP853",
        t_eval=t_eval,
        rtol=IVP_RTOL,
        atol=IVP_ATOL,
    )
    if solution.status != 0 or solution.y.shape[1] != len(t_eval):
        raise StepFailure(
            f"Continuation of u to the left failed: {solution.message}",
            last_x=float(solution.t[-1]) if len(solution.t) > 0 else None,
        )
    return t_eval[::-1], solution.y[:, ::-1]


def _run_bvp(fun, bc, grid, guess, fun_jac, label: str):
    result = solve_bvp(
        fun,
        bc,
        grid,
        guess,
        fun_jac=fun_jac,
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
    return result
