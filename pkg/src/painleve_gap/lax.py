"""
Numerical evaluation of the P34 Lax pair.

The zeta-equation is written for the real pair p = psi1, q = i psi2:

    p' = a p + (1 - u / zeta) q
    q' = (zeta + u + t + k / zeta) p - a q,      a = u_t / (2 zeta)

and the t-equation reads p_t = q, q_t = (zeta + 2 u + t) p. Solutions are
seeded at zeta = +Z or zeta = -Z from the formal expansion of the columns at
infinity and integrated towards the wanted points, never crossing zeta = 0.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from painleve_gap.consts import (
    DEFAULT_Z,
    FORMAL_SERIES_TERMS,
    IVP_ATOL,
    IVP_RTOL,
    MAX_SEED_ENLARGEMENTS,
    SEED_SENSITIVITY_TOL,
)
from painleve_gap.exceptions import BadParameter, StepFailure

logger = logging.getLogger(__name__)

_COLUMN_CONSTANT = {-1: 1.0 / math.sqrt(2.0), 1: 1j / math.sqrt(2.0)}
_REALITY_TOL = 1e-8


@dataclass(frozen=True)
class LaxData:
    """Coefficients of the zeta-equation at a fixed t."""

    t: float
    alpha: float
    u: float
    u_t: float
    k: float

    @classmethod
    def airy(cls, t: float) -> "LaxData":
        """The alpha = 0, omega = 1 case, where u vanishes identically."""
        return cls(t=t, alpha=0.0, u=0.0, u_t=0.0, k=0.0)

    @classmethod
    def from_hamiltonian(
        cls, t: float, alpha: float, u: float, u_t: float, hamiltonian: float
    ) -> "LaxData":
        """Build from the P34 Hamiltonian, k = H + u^2 + t u."""
        return cls(t=t, alpha=alpha, u=u, u_t=u_t, k=hamiltonian + u * u + t * u)

    def coefficients(self, zeta):
        """Entries (a, b, c) of the system p' = a p + b q, q' = c p - a q."""
        return (
            self.u_t / (2.0 * zeta),
            1.0 - self.u / zeta,
            zeta + self.u + self.t + self.k / zeta,
        )


@dataclass(frozen=True)
class ColumnValues:
    """The pair (p, q) and its zeta-derivatives at a set of points."""

    points: np.ndarray
    p: np.ndarray
    q: np.ndarray
    dp: np.ndarray
    dq: np.ndarray
    z_used: float


def formal_column(
    zeta: complex, lax: LaxData, sign: int, n_terms: int = FORMAL_SERIES_TERMS
) -> Tuple[complex, complex]:
    """
    Optimally truncated formal expansion of one column of the zeta-equation.

    Column 1 (sign -1) behaves like zeta^(-1/4) exp(-theta) / sqrt(2) and
    column 2 (sign +1) like i zeta^(-1/4) exp(theta) / sqrt(2), with
    theta = (2/3) zeta^(3/2) + t zeta^(1/2).

    :param zeta: Spectral point, complex for the negative axis
    :type zeta: complex
    :param lax: Coefficients of the zeta-equation
    :type lax: LaxData
    :param sign: -1 for column 1, +1 for column 2
    :type sign: int
    :param n_terms: Number of Riccati coefficients computed
    :type n_terms: int
    :return: psi1 and psi2 of the column
    :rtype: Tuple[complex, complex]
    """
    log_psi1, ratio = _formal_log_column(complex(zeta), lax, sign, n_terms)
    psi1 = cmath.exp(log_psi1)
    return psi1, psi1 * ratio


def seed(x: float, lax: LaxData, omega: float, z_seed: float) -> Tuple[float, float]:
    """Values (p, q) of the kernel functions at zeta = +Z or zeta = -Z."""
    log_scale, p_value, q_value = _scaled_seed(x, lax, omega, z_seed)
    scale = math.exp(log_scale)
    return p_value * scale, q_value * scale


def default_z(points: Sequence[float], t: float) -> float:
    """Seed distance used when none is given."""
    largest = float(np.max(np.abs(points))) if len(points) > 0 else 0.0
    return max(DEFAULT_Z, 1.5 * largest, 4.0 * abs(t))


def integrate_columns(
    points: Sequence[float],
    lax: LaxData,
    omega: float,
    z_seed: Optional[float] = None,
    verify: bool = False,
) -> ColumnValues:
    """
    Kernel functions p, q and their zeta-derivatives at nonzero points.

    Positive points are reached by one integration downward from +Z, negative
    points by one integration upward from -Z.

    :param points: Nonzero spectral points
    :type points: Sequence[float]
    :param lax: Coefficients of the zeta-equation
    :type lax: LaxData
    :param omega: Thinning parameter, real and nonnegative
    :type omega: float
    :param z_seed: Distance of the seed point. Defaults to ``default_z``
    :type z_seed: Optional[float]
    :param verify: Repeat with 1.25 Z until the values are insensitive to Z
    :type verify: bool
    :return: The values at the points, in the order given
    :rtype: ColumnValues
    :raises BadParameter: if a point is zero
    :raises StepFailure: if the adaptive integration stops
    """
    points_array = np.asarray(points, dtype=float)
    if np.any(points_array == 0):
        raise BadParameter("The Lax pair is singular at zeta = 0")
    if z_seed is None:
        z_seed = default_z(points_array, lax.t)
    values = _integrate_at(points_array, lax, omega, z_seed)
    if not verify:
        return values
    for _ in range(MAX_SEED_ENLARGEMENTS):
        z_seed *= 1.25
        refined = _integrate_at(points_array, lax, omega, z_seed)
        change = _relative_change(values, refined)
        values = refined
        if change <= SEED_SENSITIVITY_TOL:
            return values
        logger.debug("Seed at Z=%.3g changed values by %.3g", z_seed, change)
    logger.warning(
        "Lax pair values still depend on the seed point at Z=%.3g", z_seed
    )
    return values


def fundamental_determinant(
    x: float, lax: LaxData, z_seed: Optional[float] = None
) -> complex:
    """
    Determinant of [column 1, column 2] after integrating both columns to x.

    The zeta-equation is traceless, so the exact value is 1 everywhere.

    :param x: Nonzero end point
    :type x: float
    :param lax: Coefficients of the zeta-equation
    :type lax: LaxData
    :param z_seed: Distance of the seed point
    :type z_seed: Optional[float]
    :return: The determinant at x
    :rtype: complex
    """
    if x == 0:
        raise BadParameter("The Lax pair is singular at zeta = 0")
    if z_seed is None:
        z_seed = default_z([x], lax.t)
    start = z_seed if x > 0 else -z_seed
    zeta = complex(start, 0.0)
    initial = []
    log_scales = []
    for sign in (-1, 1):
        log_psi1, ratio = _formal_log_column(zeta, lax, sign, FORMAL_SERIES_TERMS)
        log_scales.append(log_psi1.real)
        psi1 = cmath.exp(log_psi1 - log_psi1.real)
        initial.extend([psi1, 1j * psi1 * ratio])
    solution = _solve(
        _column_pair_rhs(lax), start, x, np.asarray(initial, dtype=complex), [x]
    )
    p1, q1, p2, q2 = solution[:, 0]
    return -1j * (p1 * q2 - q1 * p2) * math.exp(sum(log_scales))


def evolve_in_t(
    points: np.ndarray,
    p_start: np.ndarray,
    q_start: np.ndarray,
    t_grid: np.ndarray,
    u_of_t: Callable[[float], float],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrate the t-equation for all points at once.

    :param points: Spectral points
    :type points: numpy.ndarray
    :param p_start: p at t_grid[0]
    :type p_start: numpy.ndarray
    :param q_start: q at t_grid[0]
    :type q_start: numpy.ndarray
    :param t_grid: Monotone grid of times, starting at the seed time
    :type t_grid: numpy.ndarray
    :param u_of_t: The P34 transcendent driving the t-equation
    :type u_of_t: Callable
    :return: p and q, one row per entry of t_grid
    :rtype: Tuple[numpy.ndarray, numpy.ndarray]
    :raises StepFailure: if the adaptive integration stops
    """
    n_points = len(points)

    def rhs(t, state):
        p_values, q_values = state[:n_points], state[n_points:]
        potential = points + 2.0 * u_of_t(t) + t
        return np.concatenate([q_values, potential * p_values])

    initial = np.concatenate([p_start, q_start])
    atol = IVP_ATOL * np.maximum(np.abs(initial), 1e-300)
    if len(t_grid) == 1:
        return p_start[None, :].copy(), q_start[None, :].copy()
    solution = solve_ivp(
        rhs,
        (float(t_grid[0]), float(t_grid[-1])),
        initial,
        method="DOP853",
        t_eval=t_grid,
        rtol=IVP_RTOL,
        atol=atol,
    )
    if solution.status != 0:
        raise StepFailure(
            f"t-evolution of the Lax pair failed: {solution.message}",
            last_x=float(solution.t[-1]) if len(solution.t) > 0 else None,
        )
    return solution.y[:n_points].T, solution.y[n_points:].T


def _riccati_coefficients(lax: LaxData, sign: int, n_terms: int) -> Dict[int, complex]:
    """Coefficients r_k of rho = psi1'/psi1 = sum r_k eps^k, eps = zeta^(-1/2)."""
    u, u_t, k, t = lax.u, lax.u_t, lax.k, lax.t
    beta0: Dict[int, float] = {
        -2: 1.0,
        0: t,
        2: k - u * u - u * t,
        4: -u_t / 2.0 + u_t * u_t / 4.0 - u * k,
    }
    beta1: Dict[int, float] = {}
    for j in range(n_terms):
        power = u ** (j + 1)
        beta0[6 + 2 * j] = beta0.get(6 + 2 * j, 0.0) - u_t / 2.0 * power
        beta1[4 + 2 * j] = power
    r: Dict[int, complex] = {-1: float(sign), 0: 0.0}
    for n in range(0, n_terms):
        total = beta0.get(n, 0.0) + (n - 2) / 2.0 * r.get(n - 2, 0.0)
        total += sum(beta1.get(i, 0.0) * r[n - i] for i in range(4, n + 2))
        total -= sum(r[i] * r[n - i] for i in range(0, n + 1))
        r[n + 1] = total / (2.0 * sign)
    return r


def _formal_log_column(
    zeta: complex, lax: LaxData, sign: int, n_terms: int
) -> Tuple[complex, complex]:
    """ln psi1 and psi2 / psi1 of a formal column."""
    r = _riccati_coefficients(lax, sign, n_terms)
    eps = 1.0 / cmath.sqrt(zeta)
    log_psi1 = cmath.log(_COLUMN_CONSTANT[sign]) + r[2] * cmath.log(zeta)
    rho = r[2] * eps**2
    for k in (-1, 0, 1):
        log_psi1 += r[k] * zeta * eps**k / (1.0 - k / 2.0)
        rho += r[k] * eps**k
    # Terms come in blocks of three powers of eps (one power of zeta^(-3/2)).
    # Whole blocks are summed until their size grows; empty blocks are skipped.
    previous = math.inf
    for start in range(3, n_terms + 1, 3):
        block = range(start, min(start + 3, n_terms + 1))
        terms = [r[k] * zeta * eps**k / (1.0 - k / 2.0) for k in block]
        size = sum(abs(term) for term in terms)
        if size == 0:
            continue
        if size > previous:
            break
        previous = size
        log_psi1 += sum(terms)
        rho += sum(r[k] * eps**k for k in block)
    a_value, b_value, _ = lax.coefficients(zeta)
    return log_psi1, (rho - a_value) / (1j * b_value)


def _scaled_seed(
    x: float, lax: LaxData, omega: float, z_seed: float
) -> Tuple[float, float, float]:
    """Seed (p, q) divided by exp(log_scale), with log_scale."""
    if x > 0:
        log_psi1, ratio = _formal_log_column(
            complex(z_seed), lax, -1, FORMAL_SERIES_TERMS
        )
        root_omega = math.sqrt(omega)
        return log_psi1.real, root_omega, root_omega * (1j * ratio).real
    zeta = complex(-z_seed, 0.0)
    log1, ratio1 = _formal_log_column(zeta, lax, -1, FORMAL_SERIES_TERMS)
    log2, ratio2 = _formal_log_column(zeta, lax, 1, FORMAL_SERIES_TERMS)
    log_scale = log1.real
    phase = math.pi * lax.alpha
    first = cmath.exp(log1 - log_scale - 1j * phase)
    second = cmath.exp(log2 - log_scale + 1j * phase)
    psi1 = first + second
    psi2 = first * ratio1 + second * ratio2
    q_value = 1j * psi2
    size = abs(psi1) + abs(q_value)
    if abs(psi1.imag) + abs(q_value.imag) > _REALITY_TOL * size:
        logger.warning(
            "Seed at zeta=-%.3g is not real: %.3g", z_seed, abs(psi1.imag) / size
        )
    return log_scale, psi1.real, q_value.real


def _integrate_at(
    points: np.ndarray, lax: LaxData, omega: float, z_seed: float
) -> ColumnValues:
    p_values = np.zeros_like(points)
    q_values = np.zeros_like(points)
    for side in (1.0, -1.0):
        mask = points * side > 0
        if not np.any(mask):
            continue
        if side > 0 and omega == 0:
            continue
        start = side * z_seed
        log_scale, p_seed, q_seed = _scaled_seed(start, lax, omega, z_seed)
        targets = points[mask]
        order = np.argsort(-side * targets)
        solution = _solve(
            _column_rhs(lax), start, targets[order], np.array([p_seed, q_seed]), None
        )
        scale = math.exp(log_scale)
        p_side = np.empty_like(targets)
        q_side = np.empty_like(targets)
        p_side[order] = solution[0] * scale
        q_side[order] = solution[1] * scale
        p_values[mask] = p_side
        q_values[mask] = q_side
    a_value, b_value, c_value = lax.coefficients(points)
    return ColumnValues(
        points=points,
        p=p_values,
        q=q_values,
        dp=a_value * p_values + b_value * q_values,
        dq=c_value * p_values - a_value * q_values,
        z_used=z_seed,
    )


def _column_rhs(lax: LaxData):
    def rhs(zeta, state):
        a_value, b_value, c_value = lax.coefficients(zeta)
        return [
            a_value * state[0] + b_value * state[1],
            c_value * state[0] - a_value * state[1],
        ]

    return rhs


def _column_pair_rhs(lax: LaxData):
    single = _column_rhs(lax)

    def rhs(zeta, state):
        return np.concatenate([single(zeta, state[:2]), single(zeta, state[2:])])

    return rhs


def _solve(rhs, start: float, targets, initial: np.ndarray, t_eval) -> np.ndarray:
    """Run DOP853 from start through the targets (ordered away from start)."""
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    end = float(targets[-1])
    if t_eval is None:
        t_eval = targets
    if end == start:
        return np.repeat(initial[:, None], len(targets), axis=1)
    solution = solve_ivp(
        rhs,
        (start, end),
        initial,
        method="DOP853",
        t_eval=np.asarray(t_eval, dtype=float),
        rtol=IVP_RTOL,
        atol=IVP_ATOL,
    )
    if solution.status != 0 or solution.y.shape[1] != len(t_eval):
        raise StepFailure(
            f"Lax pair integration failed: {solution.message}",
            last_x=float(solution.t[-1]) if len(solution.t) > 0 else None,
        )
    return solution.y


def _relative_change(first: ColumnValues, second: ColumnValues) -> float:
    size = np.maximum(np.abs(second.p) + np.abs(second.q), 1e-300)
    change = (np.abs(first.p - second.p) + np.abs(first.q - second.q)) / size
    return float(np.max(change))


def kernel_matrix(
    points: np.ndarray, p: np.ndarray, q: np.ndarray, lax: LaxData
) -> np.ndarray:
    """
    Integrable kernel (p(x) q(y) - q(x) p(y)) / (2 pi (x - y)) on all pairs.

    The diagonal is the limit y -> x, written with the zeta-equation.

    :param points: Distinct spectral points
    :type points: numpy.ndarray
    :param p: p at the points
    :type p: numpy.ndarray
    :param q: q at the points
    :type q: numpy.ndarray
    :param lax: Coefficients of the zeta-equation
    :type lax: LaxData
    :return: Kernel matrix
    :rtype: numpy.ndarray
    """
    x_values, y_values = np.meshgrid(points, points, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        values = (np.outer(p, q) - np.outer(q, p)) / (
            2.0 * math.pi * (x_values - y_values)
        )
    np.fill_diagonal(values, kernel_diagonal(points, p, q, lax))
    return values


def kernel_diagonal(
    points: np.ndarray, p: np.ndarray, q: np.ndarray, lax: LaxData
) -> np.ndarray:
    """(p' q - q' p) / (2 pi) at the points."""
    a_value, b_value, c_value = lax.coefficients(points)
    return (2.0 * a_value * p * q + b_value * q * q - c_value * p * p) / (2.0 * math.pi)
