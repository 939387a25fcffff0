"""
Airy, P34 and P2 correlation kernels.

The P34 kernel is the integrable kernel of the Lax pair functions:

    K(x, y) = (p(x) q(y) - q(x) p(y)) / (2 pi (x - y)),

with p = psi1 and q = i psi2 computed by ``painleve_gap.lax``. The P2 kernel is
assembled from two omega = 0 P34 kernels at negative arguments.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor

from painleve_gap.consts import DEFAULT_M, TRUNCATION_EPS, KernelKind, Method
from painleve_gap.exceptions import BadParameter, DomainError, MissingTranscendent
from painleve_gap.fredholm import (
    LogDetResult,
    PointwiseKernel,
    Quadrature,
    composite_legendre_at,
    logdet_of_factors,
    singular_point_quadrature,
    soft_edge_cutoff,
    truncation_point,
)
from painleve_gap.lax import (
    LaxData,
    integrate_columns,
    kernel_diagonal,
    kernel_matrix,
)
from painleve_gap.painleve import (
    CUBE_ROOT_2,
    covering_length,
    p34_transcendent,
    real_omega,
)
from painleve_gap.specfun import airy_pair

__all__ = [
    "AiryKernel",
    "KernelSpec",
    "P2Kernel",
    "P34Kernel",
    "PointwiseKernel",
    "PsiPair",
    "hat_kernel_logdet",
    "kernel_airy",
    "kernel_p2",
    "kernel_p34",
    "kernel_p34_diag",
    "lax_data_for",
    "psi_pair",
]

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


@dataclass(frozen=True)
class PsiPair:
    """psi1, psi2 and their zeta-derivatives at a spectral point."""

    x: float
    psi1: complex
    psi2: complex
    dpsi1: complex
    dpsi2: complex
    t: float
    alpha: float
    omega: float


@dataclass(frozen=True)
class KernelSpec:
    """
    A kernel and the interval its determinant is taken over.

    Soft-edge kernels (Airy, P34) act on (s, inf), the P2 kernel on (-s, s).
    """

    kind: KernelKind
    alpha: float = 0.0
    omega: float = 1.0
    t: float = 0.0
    interval: Interval = (0.0, math.inf)

    def __post_init__(self):
        """Validate the interval."""
        start, end = self.interval
        if self.kind == KernelKind.P2:
            if not (end > 0 and start == -end):
                raise BadParameter(
                    f"The P2 kernel acts on (-s, s), got {self.interval}",
                    interval=str(self.interval),
                )
        elif not start < end:
            raise BadParameter(
                f"Empty interval {self.interval}", interval=str(self.interval)
            )
        real_omega(self.omega)

    def truncated_interval(self, eps: float = TRUNCATION_EPS) -> Interval:
        """
        Finite interval carrying the determinant up to eps.

        For omega = 0 the P34 kernel vanishes on x > 0, so the interval ends
        at 0. The result is empty (end <= start) when nothing is left.

        :param eps: Truncation tolerance
        :type eps: float
        :return: The interval
        :rtype: Tuple[float, float]
        """
        if self.kind == KernelKind.P2:
            return self.interval
        end = min(self.interval[1], truncation_point(self, eps))
        if self.kind == KernelKind.P34 and self.omega == 0:
            end = min(end, 0.0)
        return self.interval[0], end

    def kernel(self):
        """The kernel object used by the Nystrom discretization."""
        if self.kind == KernelKind.AIRY:
            return AiryKernel(self.t)
        if self.kind == KernelKind.P34:
            return P34Kernel(self.t, self.alpha, self.omega)
        return P2Kernel(self.t, self.alpha)

    def as_dict(self) -> dict:
        """Plain representation for tables and JSON."""
        return {
            "kernel": self.kind.label,
            "alpha": self.alpha,
            "omega": self.omega,
            "t": self.t,
            "s": self.interval[0] if self.kind.is_soft_edge() else self.interval[1],
        }


def lax_data_for(t: float, alpha: float, omega: float) -> LaxData:
    """
    Coefficients of the zeta-equation at t for the P34 kernel.

    :raises MissingTranscendent: if u cannot be evaluated at t
    """
    omega = real_omega(omega)
    if alpha == 0 and omega == 1:
        return LaxData.airy(t)
    try:
        transcendent = p34_transcendent(float(alpha), omega, covering_length(t))
        return transcendent.lax_data(t)
    except DomainError as exc:
        raise MissingTranscendent(
            f"u(t; {2 * alpha}, {omega}) is not available at t={t}", t=t
        ) from exc


def psi_pair(
    x: float,
    t: float,
    alpha: float,
    omega: float,
    Z: Optional[float] = None,
) -> PsiPair:
    """
    Evaluate (psi1, psi2) and their zeta-derivatives at a real point.

    For x > 0 the columns are integrated down from zeta = Z, for x < 0 up from
    zeta = -Z. Z grows until the values stop depending on it.

    :param x: Nonzero spectral point
    :type x: float
    :param t: Parameter of the P34 kernel
    :type t: float
    :param alpha: Parameter of the P34 kernel
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: float
    :param Z: Initial seed distance
    :type Z: Optional[float]
    :return: The pair at x
    :rtype: PsiPair
    :raises MissingTranscendent: if u is not available at t
    :raises StepFailure: if the integration stops
    """
    lax = lax_data_for(t, alpha, omega)
    values = integrate_columns([x], lax, real_omega(omega), z_seed=Z, verify=True)
    return PsiPair(
        x=float(x),
        psi1=complex(values.p[0]),
        psi2=complex(-1j * values.q[0]),
        dpsi1=complex(values.dp[0]),
        dpsi2=complex(-1j * values.dq[0]),
        t=float(t),
        alpha=float(alpha),
        omega=real_omega(omega),
    )


def kernel_airy(x, y, t: float = 0.0):
    """
    Shifted Airy kernel.

    :param x: First argument, scalar or array
    :param y: Second argument, scalar or array
    :param t: Shift
    :type t: float
    :return: (Ai(x+t) Ai'(y+t) - Ai'(x+t) Ai(y+t)) / (x - y), with the limit
        Ai'(x+t)^2 - (x+t) Ai(x+t)^2 on the diagonal
    """
    x_values, y_values = np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    )
    ai_x, aip_x = airy_pair(x_values + t)
    ai_y, aip_y = airy_pair(y_values + t)
    with np.errstate(divide="ignore", invalid="ignore"):
        off_diagonal = (ai_x * aip_y - aip_x * ai_y) / (x_values - y_values)
    diagonal = aip_x * aip_x - (x_values + t) * ai_x * ai_x
    values = np.where(x_values == y_values, diagonal, off_diagonal)
    if values.ndim == 0:
        return float(values)
    return values


def kernel_p34(x: float, y: float, t: float, alpha: float, omega: float) -> float:
    """
    P34 kernel (psi2(x) psi1(y) - psi1(x) psi2(y)) / (2 pi i (x - y)).

    :param x: First argument, nonzero
    :type x: float
    :param y: Second argument, nonzero
    :type y: float
    :param t: Parameter t
    :type t: float
    :param alpha: Parameter alpha
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: float
    :return: The kernel value
    :rtype: float
    """
    if x == y:
        return kernel_p34_diag(x, t, alpha, omega)
    lax = lax_data_for(t, alpha, omega)
    values = integrate_columns([x, y], lax, real_omega(omega))
    p_values, q_values = values.p, values.q
    return float(
        (p_values[0] * q_values[1] - q_values[0] * p_values[1])
        / (2.0 * math.pi * (x - y))
    )


def kernel_p34_diag(x: float, t: float, alpha: float, omega: float) -> float:
    """Diagonal (psi2' psi1 - psi1' psi2) / (2 pi i) of the P34 kernel."""
    lax = lax_data_for(t, alpha, omega)
    points = np.array([float(x)])
    values = integrate_columns(points, lax, real_omega(omega))
    return float(kernel_diagonal(points, values.p, values.q, lax)[0])


def kernel_p2(x: float, y: float, t: float, alpha: float) -> float:
    """
    P2 kernel from the two omega = 0 P34 kernels at X = -2^(2/3) x^2.

    K(x, y) = 2^(2/3) sqrt(|x y|) [K_-(X, Y) + sgn(x y) K_+(X, Y)], where K_-
    and K_+ have alpha / 2 - 1/4 and alpha / 2 + 1/4 and t' = -2^(-1/3) t.
    The kernel is even, K(-x, -y) = K(x, y).

    :param x: First argument, nonzero
    :type x: float
    :param y: Second argument, nonzero
    :type y: float
    :param t: Parameter t
    :type t: float
    :param alpha: Parameter alpha
    :type alpha: float
    :return: The kernel value
    :rtype: float
    """
    return float(P2Kernel(t, alpha).matrix(np.array([x, y]))[0, 1])


class AiryKernel:
    """Shifted Airy kernel on soft-edge intervals."""

    excluded_points: Tuple[float, ...] = ()

    def __init__(self, t: float = 0.0):
        """Constructor."""
        self.t = t

    def matrix(self, nodes: np.ndarray) -> np.ndarray:
        """Kernel values on all pairs of nodes."""
        ai, ai_prime = airy_pair(np.asarray(nodes, dtype=float) + self.t)
        x_values, y_values = np.meshgrid(nodes, nodes, indexing="ij")
        with np.errstate(divide="ignore", invalid="ignore"):
            values = (np.outer(ai, ai_prime) - np.outer(ai_prime, ai)) / (
                x_values - y_values
            )
        np.fill_diagonal(values, ai_prime**2 - (nodes + self.t) * ai**2)
        return values

    def quadrature(self, m: int, interval: Interval) -> Quadrature:
        """Gauss-Legendre rule on the interval."""
        return composite_legendre_at(m, [interval[0], interval[1]])


class P34Kernel:
    """
    P34 kernel through the Lax pair.

    Nodes next to 0 come from Gauss-Jacobi panels with the |x|^(2 alpha)
    behaviour of the kernel functions.
    """

    excluded_points = (0.0,)

    def __init__(self, t: float, alpha: float, omega: float):
        """Constructor."""
        self.t = t
        self.alpha = alpha
        self.omega = real_omega(omega)

    def matrix(self, nodes: np.ndarray) -> np.ndarray:
        """Kernel values on all pairs of nodes."""
        nodes = np.asarray(nodes, dtype=float)
        lax = lax_data_for(self.t, self.alpha, self.omega)
        values = integrate_columns(nodes, lax, self.omega)
        return kernel_matrix(nodes, values.p, values.q, lax)

    def quadrature(self, m: int, interval: Interval) -> Quadrature:
        """Gauss-Jacobi panels at 0, Gauss-Legendre elsewhere."""
        return singular_point_quadrature(m, interval, 2.0 * self.alpha)


class P2Kernel:
    """P2 kernel on symmetric intervals (-s, s)."""

    excluded_points = (0.0,)

    def __init__(self, t: float, alpha: float):
        """Constructor."""
        self.t = t
        self.alpha = alpha
        shifted_t = -t / CUBE_ROOT_2
        self.minus = P34Kernel(shifted_t, alpha / 2.0 - 0.25, 0.0)
        self.plus = P34Kernel(shifted_t, alpha / 2.0 + 0.25, 0.0)

    def matrix(self, nodes: np.ndarray) -> np.ndarray:
        """Kernel values on all pairs of nodes."""
        nodes = np.asarray(nodes, dtype=float)
        magnitudes, inverse = np.unique(np.abs(nodes), return_inverse=True)
        arguments = -(CUBE_ROOT_2**2) * magnitudes**2
        minus = self.minus.matrix(arguments)[np.ix_(inverse, inverse)]
        plus = self.plus.matrix(arguments)[np.ix_(inverse, inverse)]
        signs = np.sign(np.outer(nodes, nodes))
        root = np.sqrt(np.outer(np.abs(nodes), np.abs(nodes)))
        return CUBE_ROOT_2**2 * root * (minus + signs * plus)

    def quadrature(self, m: int, interval: Interval) -> Quadrature:
        """Rule mirrored about 0, so that x and -x share their P34 values."""
        start, end = interval
        if start != -end:
            return singular_point_quadrature(m, interval, 2.0 * self.alpha)
        half = singular_point_quadrature(max(m // 2, 1), (0.0, end), 2.0 * self.alpha)
        return Quadrature(
            nodes=np.concatenate([-half.nodes[::-1], half.nodes]),
            weights=np.concatenate([half.weights[::-1], half.weights]),
            interval=(start, end),
        )


def hat_kernel_logdet(
    s: float, t: float, alpha: float, omega: float, m: int = DEFAULT_M
) -> LogDetResult:
    """
    ln det(I - K|(s, inf)) for s > 0 through the omega = 0 kernel K_hat.

    det(I - K|(s, inf)) = det(I + omega K_hat|(0, s)) / det(I + omega K_hat|(0, inf)),
    where K_hat is built from the recessive column of the omega = 0 Lax pair.
    Both logarithms are stored in ``extra``.

    :param s: Left end of the gap, positive
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Parameter alpha
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: float
    :param m: Number of quadrature nodes of each determinant
    :type m: int
    :return: The log-determinant
    :rtype: LogDetResult
    :raises BadParameter: if s is not positive
    """
    if s <= 0:
        raise BadParameter(f"The dressing ratio needs s > 0, got {s}", s=s)
    omega = real_omega(omega)
    lax = lax_data_for(t, alpha, 0.0)
    cutoff = soft_edge_cutoff(t, alpha, TRUNCATION_EPS)

    def dressed_logs(size: int) -> Tuple[float, float]:
        logs = []
        for upper in (min(s, cutoff), cutoff):
            rule = singular_point_quadrature(size, (0.0, upper), 2.0 * alpha)
            values = integrate_columns(rule.nodes, lax, 1.0)
            root_weights = np.sqrt(rule.weights)
            kernel = kernel_matrix(rule.nodes, values.p, values.q, lax)
            weighted = root_weights[:, None] * kernel * root_weights[None, :]
            matrix = np.eye(len(rule)) + omega * weighted
            logs.append(logdet_of_factors(lu_factor(matrix, check_finite=True))[0])
        return logs[0], logs[1]

    log_hat, log_hat_full = dressed_logs(m)
    coarse_hat, coarse_full = dressed_logs(max(m // 2, 1))
    log_value = log_hat - log_hat_full
    spec = KernelSpec(KernelKind.P34, alpha, omega, t, (s, math.inf))
    return LogDetResult(
        log_value=log_value,
        method=Method.NYSTROM,
        error_estimate=abs(log_value - (coarse_hat - coarse_full)),
        params=spec,
        extra={"log_hat": log_hat, "log_hat_full": log_hat_full},
    )
