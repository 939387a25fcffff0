"""Quadrature rules and Nystrom discretization of Fredholm determinants."""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import lu_factor
from scipy.optimize import brentq
from scipy.special import roots_jacobi

from painleve_gap.consts import (
    DEFAULT_M,
    INTEGRAL_PANEL_NODES,
    INTEGRAL_PANEL_WIDTH,
    JACOBI_PANEL_WIDTH,
    MIN_M,
    Method,
)
from painleve_gap.exceptions import BadParameter, DomainError, SingularMatrix

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


@dataclass(frozen=True)
class Quadrature:
    """Nodes and positive weights of a quadrature rule on an interval."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: Interval

    def __len__(self) -> int:
        """Number of nodes."""
        return len(self.nodes)

    def __add__(self, other: "Quadrature") -> "Quadrature":
        """Composite rule of two panels."""
        nodes = np.concatenate([self.nodes, other.nodes])
        weights = np.concatenate([self.weights, other.weights])
        order = np.argsort(nodes, kind="stable")
        return Quadrature(
            nodes=nodes[order],
            weights=weights[order],
            interval=(
                min(self.interval[0], other.interval[0]),
                max(self.interval[1], other.interval[1]),
            ),
        )

    def integrate(self, values: np.ndarray) -> float:
        """Apply the rule to function values at the nodes."""
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class LogDetResult:
    """Logarithm of a Fredholm determinant with its provenance."""

    log_value: float
    method: Method
    error_estimate: float
    params: Any = None
    sign: int = 1
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def value(self) -> float:
        """The determinant itself."""
        return self.sign * math.exp(self.log_value)

    def as_row(self) -> dict:
        """Flat representation for tables."""
        return {
            f"logdet_{self.method.tag}": self.log_value,
            f"error_{self.method.tag}": self.error_estimate,
        }


class PointwiseKernel:
    """
    Kernel given by a vectorized function of (x, y) and a diagonal rule.

    :param function: K(x, y) for x != y, broadcasting over arrays
    :param diagonal: K(x, x), broadcasting over arrays. When omitted the
        function itself is evaluated on the diagonal.
    :param excluded_points: points where the kernel is not defined
    """

    def __init__(
        self,
        function: Callable[[np.ndarray, np.ndarray], np.ndarray],
        diagonal: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        excluded_points: Sequence[float] = (),
    ):
        """Constructor."""
        self.function = function
        self.diagonal = diagonal
        self.excluded_points = tuple(excluded_points)

    def __call__(self, x: float, y: float) -> float:
        """Evaluate the kernel at a single pair of points."""
        if x == y and self.diagonal is not None:
            return float(self.diagonal(np.asarray([x]))[0])
        return float(self.function(np.asarray(x), np.asarray(y)))

    def matrix(self, nodes: np.ndarray) -> np.ndarray:
        """Kernel values on all pairs of nodes."""
        x_values, y_values = np.meshgrid(nodes, nodes, indexing="ij")
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.array(self.function(x_values, y_values), dtype=float)
        if self.diagonal is not None:
            np.fill_diagonal(values, self.diagonal(nodes))
        return values

    def quadrature(self, m: int, interval: Interval) -> Quadrature:
        """Quadrature used to discretize the kernel."""
        splits = [
            point for point in self.excluded_points if interval[0] < point < interval[1]
        ]
        return composite_legendre_at(m, [interval[0], *splits, interval[1]])


def gauss_legendre(m: int, interval: Interval = (-1.0, 1.0)) -> Quadrature:
    """
    Gauss-Legendre rule with m nodes on an interval.

    :param m: Number of nodes
    :type m: int
    :param interval: Integration interval (a, b)
    :type interval: Tuple[float, float]
    :return: The quadrature rule
    :rtype: Quadrature
    :raises BadParameter: if m < 1 or the interval is empty
    """
    start, end = _validate(m, interval)
    reference_nodes, reference_weights = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (end - start)
    return Quadrature(
        nodes=start + half * (reference_nodes + 1.0),
        weights=half * reference_weights,
        interval=(start, end),
    )


def gauss_jacobi(
    m: int, interval: Interval, exponent: float, singular_end: str = "left"
) -> Quadrature:
    """
    Gauss-Jacobi rule for integrands behaving like |x - c|^exponent.

    The returned weights are the Jacobi weights divided by the singular factor
    at each node, so the rule applies to plain function values and is exact
    for |x - c|^exponent times a polynomial of degree 2m - 1.

    :param m: Number of nodes
    :type m: int
    :param interval: Integration interval (a, b)
    :type interval: Tuple[float, float]
    :param exponent: Endpoint exponent, larger than -1
    :type exponent: float
    :param singular_end: Which endpoint c is singular, "left" or "right"
    :type singular_end: str
    :return: The quadrature rule
    :rtype: Quadrature
    :raises BadParameter: on invalid sizes, intervals or exponents
    """
    start, end = _validate(m, interval)
    if exponent <= -1:
        raise BadParameter(f"Jacobi exponent should be above -1, got {exponent}")
    if singular_end == "left":
        reference_nodes, reference_weights = roots_jacobi(m, 0.0, exponent)
        singular_factor = (1.0 + reference_nodes) ** exponent
    elif singular_end == "right":
        reference_nodes, reference_weights = roots_jacobi(m, exponent, 0.0)
        singular_factor = (1.0 - reference_nodes) ** exponent
    else:
        raise BadParameter(f'Unknown singular end "{singular_end}"')
    half = 0.5 * (end - start)
    return Quadrature(
        nodes=start + half * (reference_nodes + 1.0),
        weights=half * reference_weights / singular_factor,
        interval=(start, end),
    )


def composite_legendre_at(m: int, breakpoints: Sequence[float]) -> Quadrature:
    """Split m nodes over the panels between breakpoints, by panel length."""
    lengths = np.diff(breakpoints)
    if len(lengths) == 0 or np.any(lengths <= 0):
        raise BadParameter(f"Breakpoints should increase, got {list(breakpoints)}")
    counts = np.maximum(1, np.round(m * lengths / lengths.sum()).astype(int))
    rule: Optional[Quadrature] = None
    for start, end, count in zip(breakpoints[:-1], breakpoints[1:], counts):
        panel = gauss_legendre(int(count), (start, end))
        rule = panel if rule is None else rule + panel
    assert rule is not None  # nosec
    return rule


def singular_point_quadrature(
    m: int,
    interval: Interval,
    exponent: float,
    point: float = 0.0,
    panel_width: float = JACOBI_PANEL_WIDTH,
) -> Quadrature:
    """
    Rule for integrands behaving like |x - point|^exponent.

    Panels touching the point use Gauss-Jacobi nodes, the rest of the interval
    uses Gauss-Legendre panels. Nodes are shared out by panel length.

    :param m: Total number of nodes, roughly
    :type m: int
    :param interval: Integration interval (a, b)
    :type interval: Tuple[float, float]
    :param exponent: Exponent of the singularity
    :type exponent: float
    :param point: Location of the singularity
    :type point: float
    :param panel_width: Width of the Gauss-Jacobi panels
    :type panel_width: float
    :return: The quadrature rule
    :rtype: Quadrature
    """
    start, end = _validate(m, interval)
    if not start <= point <= end:
        return composite_legendre_at(m, [start, end])
    panels = []
    if start < point:
        inner = max(start, point - panel_width)
        if start < inner:
            panels.append((start, inner, None))
        panels.append((inner, point, "right"))
    if point < end:
        inner = min(end, point + panel_width)
        panels.append((point, inner, "left"))
        if inner < end:
            panels.append((inner, end, None))
    total = end - start
    rule: Optional[Quadrature] = None
    for panel_start, panel_end, singular_end in panels:
        count = max(MIN_M, round(m * (panel_end - panel_start) / total))
        if singular_end is None:
            panel = gauss_legendre(count, (panel_start, panel_end))
        else:
            panel = gauss_jacobi(
                count, (panel_start, panel_end), exponent, singular_end=singular_end
            )
        rule = panel if rule is None else rule + panel
    assert rule is not None  # nosec
    return rule


def composite_legendre(
    interval: Interval,
    panel_width: float = INTEGRAL_PANEL_WIDTH,
    nodes_per_panel: int = INTEGRAL_PANEL_NODES,
) -> Quadrature:
    """Composite Gauss-Legendre rule with panels of roughly equal width."""
    start, end = interval
    n_panels = max(1, math.ceil((end - start) / panel_width))
    breakpoints = np.linspace(start, end, n_panels + 1)
    return composite_legendre_at(nodes_per_panel * n_panels, breakpoints)


def integrate(
    function: Callable[[np.ndarray], np.ndarray],
    interval: Interval,
    panel_width: float = INTEGRAL_PANEL_WIDTH,
    nodes_per_panel: int = INTEGRAL_PANEL_NODES,
) -> float:
    """Integrate a vectorized function over a finite interval."""
    if interval[1] == interval[0]:
        return 0.0
    if interval[1] < interval[0]:
        return -integrate(function, (interval[1], interval[0]))
    rule = composite_legendre(interval, panel_width, nodes_per_panel)
    return rule.integrate(function(rule.nodes))


def truncation_point(spec: Any, eps: float) -> float:
    """
    Right end T of a soft-edge interval (s, inf) for a given truncation error.

    T solves (4/3) (T + t)^(3/2) - 2 alpha ln|T| = ln(1 / eps), the decay
    rate of the kernel diagonal, and is never smaller than s.

    :param spec: Kernel specification with fields t, alpha and interval
    :type spec: KernelSpec
    :param eps: Truncation tolerance
    :type eps: float
    :return: Truncation point
    :rtype: float
    :raises BadParameter: if eps is not positive
    """
    root = soft_edge_cutoff(
        float(getattr(spec, "t", 0.0)), float(getattr(spec, "alpha", 0.0)), eps
    )
    return max(float(spec.interval[0]), root)


def soft_edge_cutoff(shift: float, alpha: float, eps: float) -> float:
    """
    Point beyond which a soft-edge kernel diagonal drops below eps.

    :param shift: The parameter t of the kernel
    :type shift: float
    :param alpha: The parameter alpha of the kernel
    :type alpha: float
    :param eps: Truncation tolerance
    :type eps: float
    :return: The cutoff, at least max(-t, 1)
    :rtype: float
    :raises BadParameter: if eps is not positive
    """
    if eps <= 0:
        raise BadParameter(f"Truncation tolerance should be positive, got {eps}")
    target = math.log(1.0 / eps)

    def excess(point: float) -> float:
        decay = 4.0 / 3.0 * max(point + shift, 0.0) ** 1.5
        return decay - 2.0 * alpha * math.log(max(abs(point), 1.0)) - target

    lower = max(-shift, 1.0)
    if excess(lower) >= 0:
        root = lower
    else:
        upper = 2.0 * lower + 1.0
        while excess(upper) < 0:
            upper *= 2.0
        root = brentq(excess, lower, upper, xtol=1e-12)
    return float(root)


def lu_logdet(matrix: np.ndarray) -> Tuple[float, int]:
    """
    Log of the absolute determinant and its sign, from a pivoted LU.

    :param matrix: Square matrix
    :type matrix: numpy.ndarray
    :return: ln|det| and the sign of det
    :rtype: Tuple[float, int]
    :raises SingularMatrix: when a pivot vanishes
    """
    return logdet_of_factors(lu_factor(matrix, check_finite=True))


def logdet_of_factors(factors: Tuple[np.ndarray, np.ndarray]) -> Tuple[float, int]:
    """ln|det| and sign from the output of ``scipy.linalg.lu_factor``."""
    lu, pivots = factors
    diagonal = np.diag(lu)
    if np.any(diagonal == 0):
        raise SingularMatrix("Zero pivot in LU factorization", size=lu.shape[0])
    swaps = int(np.count_nonzero(pivots != np.arange(len(pivots))))
    sign = (-1) ** swaps * int(np.prod(np.sign(diagonal)))
    return float(np.sum(np.log(np.abs(diagonal)))), sign


def nystrom_matrix(kernel: Any, rule: Quadrature) -> np.ndarray:
    """The matrix I - W^(1/2) K W^(1/2) on the nodes of a rule."""
    for point in getattr(kernel, "excluded_points", ()):
        if np.any(rule.nodes == point):
            raise DomainError(
                f"Quadrature node coincides with excluded point {point}", point=point
            )
    root_weights = np.sqrt(rule.weights)
    values = kernel.matrix(rule.nodes)
    return np.eye(len(rule)) - root_weights[:, None] * values * root_weights[None, :]


def nystrom_logdet(
    kernel: Any,
    interval: Interval,
    m: int = DEFAULT_M,
    params: Any = None,
) -> LogDetResult:
    """
    Nystrom approximation of ln det(I - K) on an interval.

    The kernel is either a vectorized callable K(x, y) or an object with the
    methods ``matrix(nodes)`` and ``quadrature(m, interval)``. The error
    estimate is the change from m/2 to m nodes.

    :param kernel: The kernel
    :param interval: Interval (a, b)
    :type interval: Tuple[float, float]
    :param m: Number of quadrature nodes
    :type m: int
    :param params: Kernel specification stored in the result
    :return: The log-determinant
    :rtype: LogDetResult
    :raises BadParameter: if m is too small
    """
    if m < MIN_M:
        raise BadParameter(f"Nystrom needs at least {MIN_M} nodes, got {m}")
    if not hasattr(kernel, "matrix"):
        kernel = PointwiseKernel(kernel)
    log_values = []
    signs = []
    for size in (m, max(m // 2, 1)):
        rule = kernel.quadrature(size, interval)
        log_value, sign = lu_logdet(nystrom_matrix(kernel, rule))
        log_values.append(log_value)
        signs.append(sign)
    logger.debug(
        "Nystrom log-det on %s with %d nodes: %.17g", interval, m, log_values[0]
    )
    if signs[0] < 0:
        logger.warning("Negative Fredholm determinant on %s", interval)
    return LogDetResult(
        log_value=log_values[0],
        method=Method.NYSTROM,
        error_estimate=abs(log_values[0] - log_values[1]),
        params=params,
        sign=signs[0],
    )


def _validate(m: int, interval: Iterable[float]) -> Interval:
    start, end = (float(value) for value in interval)
    if m < 1:
        raise BadParameter(f"Quadrature needs at least one node, got {m}")
    if not start < end:
        raise BadParameter(f"Empty interval ({start}, {end})")
    return start, end
