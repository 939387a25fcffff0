"""
Log-determinants of the P34 and P2 kernels and their checks.

Every log-determinant is available by Nystrom discretization and by an
integral of Painleve data. The integral routes truncate their improper
integrals where the integrands are exponentially small. The large gap
expansions subtract algebraic counterterms and add their integrals in closed
form, with the asymptotic series of the transcendent beyond the truncation
point.
"""
import logging
import math
from typing import Callable, Iterable

import numpy as np

from painleve_gap.consts import (
    DEFAULT_M,
    TAIL_TOL,
    X_MAX_OFFSET,
    X_MIN,
    KernelKind,
    Method,
)
from painleve_gap.coupled_p2 import covering_trajectory
from painleve_gap.exceptions import BadParameter, DomainError, TailTooLarge
from painleve_gap.fredholm import LogDetResult, integrate, nystrom_logdet
from painleve_gap.kernels import KernelSpec
from painleve_gap.painleve import (
    CUBE_ROOT_2,
    covering_length,
    hastings_mcleod,
    p2_minus_infinity_coefficients,
    p34_plus_infinity_coefficients,
    p34_transcendent,
    real_omega,
    tw_log_cdf,
)
from painleve_gap.specfun import constants

logger = logging.getLogger(__name__)

_P2_TAIL_MARGIN = 5.0


# Nystrom routes


def logdet_airy_nystrom(s: float, m: int = DEFAULT_M, t: float = 0.0) -> LogDetResult:
    """ln det(I - K_Ai) on (s, inf), with the Airy kernel shifted by t."""
    spec = KernelSpec(KernelKind.AIRY, t=t, interval=(float(s), math.inf))
    return _soft_edge_nystrom(spec, m)


def logdet_p34_nystrom(
    s: float, t: float, alpha: float, omega: complex, m: int = DEFAULT_M
) -> LogDetResult:
    """
    ln det(I - K_P34) on (s, inf) by Nystrom discretization.

    :param s: Left end of the gap
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :param m: Number of quadrature nodes
    :type m: int
    :return: The log-determinant
    :rtype: LogDetResult
    """
    spec = KernelSpec(
        KernelKind.P34, float(alpha), real_omega(omega), float(t), (float(s), math.inf)
    )
    return _soft_edge_nystrom(spec, m)


def logdet_p2_nystrom(
    s: float, t: float, alpha: float, m: int = DEFAULT_M
) -> LogDetResult:
    """
    ln det(I - K_P2) on (-s, s) by Nystrom discretization.

    :param s: Half width of the gap, nonnegative
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param m: Number of quadrature nodes
    :type m: int
    :return: The log-determinant, 0 for s = 0
    :rtype: LogDetResult
    :raises BadParameter: if s is negative
    """
    if s < 0:
        raise BadParameter(f"The P2 gap (-s, s) needs s >= 0, got {s}", s=s)
    if s == 0:
        return LogDetResult(log_value=0.0, method=Method.NYSTROM, error_estimate=0.0)
    spec = _p2_spec(s, t, alpha)
    return nystrom_logdet(spec.kernel(), spec.interval, m, params=spec)


def logdet_tw(s: float) -> LogDetResult:
    """ln F_TW(s) = -int_s^inf (x - s) y(x; 0)^2 dx."""
    spec = KernelSpec(KernelKind.AIRY, interval=(float(s), math.inf))
    return LogDetResult(
        log_value=tw_log_cdf(float(s)),
        method=Method.ODE,
        error_estimate=0.0,
        params=spec,
    )


# Integral routes


def logdet_p34_ode(s: float, t: float, alpha: float, omega: complex) -> LogDetResult:
    """
    ln det(I - K_P34) on (s, inf) from the coupled P2 potential.

    The value is -int_t^inf (V(x + s) - u(x)) (x - t) dx, with V = v1 + v2 and
    u = u(x; 2 alpha, omega). The integral is truncated at max(t, 0) + 14.

    :param s: Left end of the gap
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :return: The log-determinant, with the tail estimate as error
    :rtype: LogDetResult
    :raises TailTooLarge: if the neglected tail exceeds its tolerance
    """
    omega_value = real_omega(omega)
    upper = max(t, 0.0) + X_MAX_OFFSET
    trajectory = covering_trajectory(s, alpha, omega_value, t + s, upper + s)
    transcendent = p34_transcendent(float(alpha), omega_value, covering_length(t))

    def integrand(x):
        return (trajectory.potential(x + s) - transcendent.evaluate(x)) * (x - t)

    body = integrate(integrand, (t, upper))
    tail = _exponential_tail(integrand, upper)
    logger.debug("P34 ODE route at s=%g, t=%g: tail %.3g", s, t, tail)
    return LogDetResult(
        log_value=-body,
        method=Method.ODE,
        error_estimate=tail,
        params=_p34_spec(s, t, alpha, omega_value),
    )


def logdet_p34_hamiltonian(
    s: float, t: float, alpha: float, omega: complex
) -> LogDetResult:
    """
    ln det(I - K_P34) on (s, inf) from the Hamiltonian of the coupled system.

    Since H' = -V, integrating by parts on [t, X] gives
    int_t^X u (x - t) dx + H(X + s) (X - t) - int_t^X H(x + s) dx, and the
    remainder int_X^inf (u + H') (x - t) dx is exponentially small.

    :param s: Left end of the gap
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :return: The log-determinant, with the tail estimate as error
    :rtype: LogDetResult
    :raises TailTooLarge: if the neglected tail exceeds its tolerance
    """
    omega_value = real_omega(omega)
    upper = max(t, 0.0) + X_MAX_OFFSET
    trajectory = covering_trajectory(s, alpha, omega_value, t + s, upper + s)
    transcendent = p34_transcendent(float(alpha), omega_value, covering_length(t))

    def hamiltonian(x):
        return trajectory.evaluate(x + s)[4]

    def remainder(x):
        return (trajectory.potential(x + s) - transcendent.evaluate(x)) * (x - t)

    value = (
        integrate(lambda x: transcendent.evaluate(x) * (x - t), (t, upper))
        + hamiltonian(upper) * (upper - t)
        - integrate(hamiltonian, (t, upper))
    )
    tail = _exponential_tail(remainder, upper)
    return LogDetResult(
        log_value=float(value),
        method=Method.HAMILTONIAN,
        error_estimate=tail,
        params=_p34_spec(s, t, alpha, omega_value),
    )


def logdet_p2_ode(s: float, t: float, alpha: float) -> LogDetResult:
    """
    ln det(I - K_P2) on (-s, s) from Painleve data.

    The value is -int_-inf^t (y^2(x; alpha) - 2^(-2/3) w2^2(X(x))) (x - t) dx
    with X(x) = -2^(-1/3) x + s', s' = -2^(2/3) s^2, y the Hastings-McLeod
    solution with parameter alpha and w2 the coupled trajectory at jump s',
    kernel parameter alpha/2 - 1/4 and omega = 0. The integrand is
    exponentially small at -inf.

    :param s: Half width of the gap, nonnegative
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :return: The log-determinant, with the tail estimate as error
    :rtype: LogDetResult
    :raises BadParameter: if s is negative
    :raises TailTooLarge: if the neglected tail exceeds its tolerance
    """
    if s < 0:
        raise BadParameter(f"The P2 gap (-s, s) needs s >= 0, got {s}", s=s)
    jump = -(CUBE_ROOT_2**2) * s * s
    lower = min(X_MIN, t - _P2_TAIL_MARGIN)
    trajectory = covering_trajectory(
        jump,
        alpha / 2.0 - 0.25,
        0.0,
        jump - t / CUBE_ROOT_2,
        jump - lower / CUBE_ROOT_2,
    )
    solution = hastings_mcleod(float(alpha))

    def integrand(x):
        w2 = trajectory.evaluate(jump - x / CUBE_ROOT_2)[3]
        return (solution.evaluate(x) ** 2 - w2 * w2 / CUBE_ROOT_2**2) * (x - t)

    body = integrate(integrand, (lower, t))
    tail = _exponential_tail(integrand, lower)
    spec = _p2_spec(s, t, alpha) if s > 0 else None
    return LogDetResult(
        log_value=-body, method=Method.ODE, error_estimate=tail, params=spec
    )


# Large gap expansions


def asym_p34(s: float, t: float, alpha: float, omega: complex) -> float:
    """
    Large gap expansion of ln det(I - K_P34) on (s, inf) as s -> -inf.

    -|s+t|^3/12 + (2/3) alpha |s|^(3/2) - 2 alpha |s|^(1/2) t
    - (alpha^2 + 1/8) ln|s+t| + (4/3) alpha sgn(t) |t|^(3/2) + alpha^2 ln|t|
    + int_t^inf (x - t) (u - alpha |x|^(-1/2) + alpha^2 x^-2) dx + c0.

    :param s: Left end of the gap
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :return: The expansion without its o(1) remainder
    :rtype: float
    :raises DomainError: unless s + t < 0, and for alpha != 0 unless t > 0
    """
    if s + t >= 0:
        raise DomainError(f"Expansion needs s + t < 0, got s={s}, t={t}", s=s, t=t)
    if alpha != 0 and t <= 0:
        raise DomainError(
            "The counterterms alpha |x|^(-1/2) and alpha^2 x^(-2) are not "
            f"integrable through x = 0, got t={t}",
            t=t,
            alpha=alpha,
        )
    gap = abs(s + t)
    value = (
        -(gap**3) / 12.0
        + 2.0 / 3.0 * alpha * abs(s) ** 1.5
        - 2.0 * alpha * math.sqrt(abs(s)) * t
        - (alpha**2 + 0.125) * math.log(gap)
        + _p34_regularized_integral(t, float(alpha), real_omega(omega))
        + constants().c0
    )
    if alpha != 0:
        value += 4.0 / 3.0 * alpha * t**1.5 + alpha**2 * math.log(t)
    return value


def asym_p2(s: float, t: float, alpha: float) -> float:
    """
    Large gap expansion of ln det(I - K_P2) on (-s, s) as s -> +inf.

    -(2/3)(s^2 + t/2)^3 + (4/3) alpha s^3 + 2 alpha s t - (alpha^2 + 3/4) ln s
    + (2 sqrt2 / 3) alpha sgn(t) |t|^(3/2) + (alpha^2/2 + 1/8) ln|t|
    - int_-inf^t (x - t) (y^2 + x/2 - alpha / sqrt|2x| + (alpha^2/2 + 1/8) x^-2) dx
    + c1(alpha).

    The x^-2 counterterm is taken as a Hadamard finite part when the
    integration passes through 0, which is only done for alpha = 0.

    :param s: Half width of the gap, positive
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :return: The expansion without its o(1) remainder
    :rtype: float
    :raises DomainError: if s <= 0, t = 0, or t > 0 with alpha != 0
    """
    if s <= 0:
        raise DomainError(f"Expansion needs s > 0, got {s}", s=s)
    weight = alpha**2 / 2.0 + 0.125
    value = (
        -2.0 / 3.0 * (s * s + t / 2.0) ** 3
        + 4.0 / 3.0 * alpha * s**3
        + 2.0 * alpha * s * t
        - (alpha**2 + 0.75) * math.log(s)
        + 2.0 * math.sqrt(2.0) / 3.0 * alpha * math.copysign(abs(t) ** 1.5, t)
        + weight * _log_abs(t)
        - _p2_regularized_integral(t, float(alpha))
        + constants().c1(alpha)
    )
    return value


def asym_p2_alpha0(s: float, t: float) -> float:
    """
    The alpha = 0 expansion in its reduced form.

    -(2/3) s^6 - s^4 t - (s t)^2 / 2 - (3/4) ln s
    + int_t^inf (x - t) y^2(x; 0) dx + c2.
    """
    return _reduced_alpha0(s, t, -tw_log_cdf(float(t)))


def asym_p2_reduction_residual(s: float, t: float) -> float:
    """
    |asym_p2(s, t, 0) - asym_p2_alpha0(s, t)| with shared integrals.

    The integral over (t, inf) of the reduced form is rewritten through the
    total integral identity, so that both sides use the same integral over
    (-inf, t) and the residual measures the algebra and the constants only.
    """
    upper = (
        -_p2_regularized_integral(float(t), 0.0)
        - t**3 / 12.0
        + _log_abs(t) / 8.0
        - constants().c0
    )
    return abs(asym_p2(s, t, 0.0) - _reduced_alpha0(s, t, upper))


# Identity checks


def total_integral_residual(t: float) -> float:
    """
    Residual of the total integral identity of the Hastings-McLeod solution.

    int_t^inf (x - t) y^2 dx + int_-inf^t (x - t) (y^2 + x/2 + 1/(8 x^2)) dx
    = -t^3/12 + (1/8) ln|t| - c0, with y = y(x; 0).

    :param t: Point, not 0
    :type t: float
    :return: Absolute residual
    :rtype: float
    :raises DomainError: at t = 0
    """
    if t == 0:
        raise DomainError("ln|t| is singular at t = 0", t=t)
    left = -tw_log_cdf(float(t)) + _p2_regularized_integral(float(t), 0.0)
    right = -(t**3) / 12.0 + 0.125 * math.log(abs(t)) - constants().c0
    return abs(left - right)


def factorization_residual(
    s: float, t: float, alpha: float, m: int = DEFAULT_M
) -> float:
    """
    Residual of det(I - K_P2) = det(I - K_P34(a+)) det(I - K_P34(a-)).

    a+- = alpha/2 +- 1/4 with omega = 0, on (s', inf) with s' = -2^(2/3) s^2
    and t' = -2^(-1/3) t. All three determinants are Nystrom approximations.

    :param s: Half width of the P2 gap
    :type s: float
    :param t: Parameter t of the P2 kernel
    :type t: float
    :param alpha: P2 kernel parameter
    :type alpha: float
    :param m: Number of quadrature nodes of each determinant
    :type m: int
    :return: Absolute residual of the logarithms
    :rtype: float
    """
    jump = -(CUBE_ROOT_2**2) * s * s
    shift = -t / CUBE_ROOT_2
    p2 = logdet_p2_nystrom(s, t, alpha, m).log_value
    plus = logdet_p34_nystrom(jump, shift, alpha / 2.0 + 0.25, 0.0, m).log_value
    minus = logdet_p34_nystrom(jump, shift, alpha / 2.0 - 0.25, 0.0, m).log_value
    return abs(p2 - plus - minus)


def diffid_residual(
    s: float, t: float, alpha: float, omega: complex, h: float = 0.02
) -> float:
    """
    Residual of d^2/dt^2 ln det(I - K_P34) = u(t) - V(s + t).

    The second derivative is a central difference of Nystrom log-determinants.

    :param s: Left end of the gap
    :type s: float
    :param t: Parameter t
    :type t: float
    :param alpha: Kernel parameter
    :type alpha: float
    :param omega: Thinning parameter
    :type omega: complex
    :param h: Step of the difference, in [1e-3, 1e-1]
    :type h: float
    :return: Absolute residual
    :rtype: float
    :raises BadParameter: if h is out of range
    """
    if not 1e-3 <= h <= 1e-1:
        raise BadParameter(f"Difference step should be in [1e-3, 1e-1], got {h}", h=h)
    omega_value = real_omega(omega)
    values = [
        logdet_p34_nystrom(s, t + shift, alpha, omega_value).log_value
        for shift in (-h, 0.0, h)
    ]
    second = (values[0] - 2.0 * values[1] + values[2]) / (h * h)
    trajectory = covering_trajectory(s, alpha, omega_value, s + t, s + t)
    transcendent = p34_transcendent(float(alpha), omega_value, covering_length(t))
    return abs(second - (transcendent.evaluate(t) - trajectory.potential(s + t)))


# Internals


def _soft_edge_nystrom(spec: KernelSpec, m: int) -> LogDetResult:
    interval = spec.truncated_interval()
    if interval[1] <= interval[0]:
        return LogDetResult(
            log_value=0.0, method=Method.NYSTROM, error_estimate=0.0, params=spec
        )
    return nystrom_logdet(spec.kernel(), interval, m, params=spec)


def _p34_spec(s: float, t: float, alpha: float, omega: float) -> KernelSpec:
    interval = (float(s), math.inf)
    return KernelSpec(KernelKind.P34, float(alpha), omega, float(t), interval)


def _p2_spec(s: float, t: float, alpha: float) -> KernelSpec:
    interval = (-float(s), float(s))
    return KernelSpec(KernelKind.P2, float(alpha), 0.0, float(t), interval)


def _exponential_tail(integrand: Callable, point: float) -> float:
    """Tail of an integrand decaying like exp(-(4/3)|x|^(3/2)) beyond a point."""
    tail = abs(float(integrand(np.array([point]))[0])) / (2.0 * math.sqrt(abs(point)))
    if tail > TAIL_TOL:
        raise TailTooLarge(
            f"Neglected tail {tail:.3g} beyond x={point} exceeds {TAIL_TOL}",
            tail=tail,
            point=point,
        )
    return tail


def _log_abs(t: float) -> float:
    if t == 0:
        raise DomainError("ln|t| is singular at t = 0", t=t)
    return math.log(abs(t))


def _truncated_series(terms: Iterable[float]) -> float:
    """Sum of asymptotic terms up to the smallest one."""
    kept = []
    previous = math.inf
    for term in terms:
        if term == 0:
            continue
        if abs(term) > previous:
            break
        kept.append(term)
        previous = abs(term)
    return math.fsum(kept)


def _p34_regularized_integral(t: float, alpha: float, omega: float) -> float:
    """int_t^inf (x - t) (u - alpha x^(-1/2) + alpha^2 x^(-2)) dx for t > 0."""
    upper = max(t, 0.0) + X_MAX_OFFSET
    transcendent = p34_transcendent(alpha, omega, covering_length(t))
    body = integrate(lambda x: transcendent.evaluate(x) * (x - t), (t, upper))
    if alpha == 0:
        return body

    def counterterms(x: float) -> float:
        return -alpha * (2.0 / 3.0 * x**1.5 - 2.0 * t * math.sqrt(x)) + alpha**2 * (
            math.log(x) + t / x
        )

    coefficients = p34_plus_infinity_coefficients(alpha)
    coefficients[1] -= alpha
    coefficients[4] += alpha**2
    tail = _truncated_series(
        coefficient
        * (
            upper ** (2.0 - j / 2.0) / (j / 2.0 - 2.0)
            - t * upper ** (1.0 - j / 2.0) / (j / 2.0 - 1.0)
        )
        for j, coefficient in enumerate(coefficients)
        if j > 4
    )
    return body + counterterms(upper) - counterterms(t) + tail


def _p2_regularized_integral(t: float, alpha: float) -> float:
    """
    int_-inf^t (x - t) (y^2 + x/2 - alpha/sqrt|2x| + c x^-2) dx, c = alpha^2/2 + 1/8.

    Below the truncation point the integrand is summed from the -inf series
    of y. For t > 0 the x^-2 counterterm is a Hadamard finite part.
    """
    if t == 0:
        raise DomainError("The counterterm x^-2 is not integrable up to t = 0", t=t)
    if t > 0 and alpha != 0:
        raise DomainError(
            "The counterterm alpha / sqrt|2x| is only used for t < 0 when alpha != 0",
            t=t,
            alpha=alpha,
        )
    weight = alpha**2 / 2.0 + 0.125
    lower = min(X_MIN, t - _P2_TAIL_MARGIN)
    solution = hastings_mcleod(alpha)
    body = integrate(lambda x: solution.evaluate(x) ** 2 * (x - t), (lower, t))

    def counterterms(x: float) -> float:
        distance = abs(x)
        value = x**3 / 6.0 - t * x * x / 4.0 + weight * (math.log(distance) + t / x)
        if alpha != 0:
            value -= (
                alpha
                / math.sqrt(2.0)
                * (2.0 / 3.0 * distance**1.5 + 2.0 * t * math.sqrt(distance))
            )
        return value

    return body + counterterms(t) - counterterms(lower) + _p2_tail(t, alpha, lower)


def _p2_tail(t: float, alpha: float, lower: float) -> float:
    """int_-inf^lower of the regularized integrand, from the series of y^2."""
    coefficients = p2_minus_infinity_coefficients(alpha)
    squares = np.convolve(coefficients, coefficients)[: len(coefficients)]
    squares[0] -= 0.5
    squares[1] -= alpha / math.sqrt(2.0)
    squares[2] += alpha**2 / 2.0 + 0.125
    distance = -lower
    terms = []
    for n, coefficient in enumerate(squares):
        if n < 3:
            continue
        power = 1.0 - 1.5 * n
        terms.append(
            coefficient
            * (
                distance ** (power + 2.0) / (power + 2.0)
                + t * distance ** (power + 1.0) / (power + 1.0)
            )
        )
    return _truncated_series(terms)


def _reduced_alpha0(s: float, t: float, upper_integral: float) -> float:
    if s <= 0:
        raise DomainError(f"Expansion needs s > 0, got {s}", s=s)
    return (
        -2.0 / 3.0 * s**6
        - s**4 * t
        - 0.5 * (s * t) ** 2
        - 0.75 * math.log(s)
        + upper_integral
        + constants().c2_alpha0
    )
