"""
Special functions and constants used by every other module.

Ai and Ai' are evaluated by three schemes: the Maclaurin series near the
origin, the large-argument asymptotic expansions, and Taylor steps of the Airy
equation in between. Each scheme is only used where it keeps close to full
double precision.
"""
import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple, Union

import numpy as np

from painleve_gap.consts import (
    AIRY_ASYMPTOTIC,
    AIRY_SERIES_MAX,
    AIRY_SERIES_MIN,
    AIRY_TAYLOR_STEP,
    AIRY_UNDERFLOW,
)
from painleve_gap.exceptions import DomainError

ArrayOrFloat = Union[float, np.ndarray]

AI_ZERO = 0.355028053887817239  # Ai(0) = 3^(-2/3) / Gamma(2/3)
AI_PRIME_ZERO = 0.258819403792806798  # -Ai'(0) = 3^(-1/3) / Gamma(1/3)
GLAISHER_LOG = 0.24875447703378426

_SERIES_EPS = 1e-18
_MAX_SERIES_TERMS = 200
_STIRLING_SHIFT = 7.0
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)


@dataclass(frozen=True)
class Constants:
    """Constants appearing in the large-gap expansions."""

    glaisher_log: float
    zeta_prime_minus1: float
    c0: float
    c2_alpha0: float

    def c1(self, alpha: float) -> float:
        """Constant of the P2 large-gap expansion."""
        return -(alpha**2 + 5.0 / 24.0) * math.log(2.0) + 2.0 * self.zeta_prime_minus1


@lru_cache(maxsize=1)
def constants() -> Constants:
    """Build the constants from ln A, with zeta'(-1) = 1/12 - ln A."""
    zeta_prime = 1.0 / 12.0 - GLAISHER_LOG
    return Constants(
        glaisher_log=GLAISHER_LOG,
        zeta_prime_minus1=zeta_prime,
        c0=math.log(2.0) / 24.0 + zeta_prime,
        c2_alpha0=-math.log(2.0) / 6.0 + 3.0 * zeta_prime,
    )


def airy_ai(x: ArrayOrFloat) -> ArrayOrFloat:
    """Airy function Ai."""
    return airy_pair(x)[0]


def airy_ai_prime(x: ArrayOrFloat) -> ArrayOrFloat:
    """Derivative of the Airy function Ai."""
    return airy_pair(x)[1]


def airy_pair(x: ArrayOrFloat) -> Tuple[ArrayOrFloat, ArrayOrFloat]:
    """
    Evaluate Ai and Ai' together.

    :param x: Point or array of points
    :type x: float or numpy.ndarray
    :return: Ai(x) and Ai'(x), with the shape of the input
    :rtype: Tuple
    """
    if np.ndim(x) == 0:
        return _airy_scalar(float(x))
    values = np.asarray(x, dtype=float)
    ai = np.empty_like(values)
    aip = np.empty_like(values)
    for index, point in np.ndenumerate(values):
        ai[index], aip[index] = _airy_scalar(float(point))
    return ai, aip


def log_gamma(z: complex) -> complex:
    """
    Logarithm of the gamma function, continued analytically off the real axis.

    Arguments with a small real part are shifted with the recurrence
    Gamma(z + 1) = z Gamma(z) until the Stirling series is accurate.

    :param z: Complex argument
    :type z: complex
    :return: ln Gamma(z)
    :rtype: complex
    :raises DomainError: at the poles z = 0, -1, -2, ...
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma function has a pole at {z.real}", z=z.real)
    shift_logs: List[complex] = []
    while z.real < _STIRLING_SHIFT:
        shift_logs.append(cmath.log(z))
        z += 1.0
    log_z = cmath.log(z)
    terms = [(z - 0.5) * log_z, -z, complex(0.5 * math.log(2.0 * math.pi))]
    z_power = z
    z_squared = z * z
    for k, bernoulli in enumerate(_BERNOULLI, start=1):
        terms.append(bernoulli / (2.0 * k * (2.0 * k - 1.0) * z_power))
        z_power *= z_squared
    terms.extend(-log for log in shift_logs)
    return complex(
        math.fsum(term.real for term in terms), math.fsum(term.imag for term in terms)
    )


def gamma_ratio(numerator: complex, denominator: complex) -> complex:
    """Gamma(numerator) / Gamma(denominator), zero at poles of the denominator."""
    denominator = complex(denominator)
    if (
        denominator.imag == 0
        and denominator.real <= 0
        and denominator.real == math.floor(denominator.real)
    ):
        return 0j
    return cmath.exp(log_gamma(numerator) - log_gamma(denominator))


def _airy_scalar(x: float) -> Tuple[float, float]:
    if math.isnan(x):
        return math.nan, math.nan
    if x > AIRY_UNDERFLOW:
        return 0.0, -0.0
    if AIRY_SERIES_MIN <= x <= AIRY_SERIES_MAX:
        return _airy_maclaurin(x)
    if x >= AIRY_ASYMPTOTIC:
        return _airy_asymptotic_positive(x)
    if x <= -AIRY_ASYMPTOTIC:
        return _airy_asymptotic_negative(-x)
    anchor = AIRY_ASYMPTOTIC if x > 0 else -AIRY_ASYMPTOTIC
    ai, aip = _airy_anchor(anchor)
    n_steps = math.ceil(abs(x - anchor) / AIRY_TAYLOR_STEP)
    step = (x - anchor) / n_steps
    position = anchor
    for _ in range(n_steps):
        ai, aip = _taylor_step(position, ai, aip, step)
        position += step
    return ai, aip


@lru_cache(maxsize=2)
def _airy_anchor(x: float) -> Tuple[float, float]:
    if x > 0:
        return _airy_asymptotic_positive(x)
    return _airy_asymptotic_negative(-x)


def _airy_maclaurin(x: float) -> Tuple[float, float]:
    cube = x**3
    f_terms, g_terms, fp_terms, gp_terms = [1.0], [x], [], [1.0]
    f_term, g_term, fp_term, gp_term = 1.0, x, x * x / 2.0, 1.0
    fp_terms.append(fp_term)
    for k in range(_MAX_SERIES_TERMS):
        f_term *= cube / ((3 * k + 2) * (3 * k + 3))
        g_term *= cube / ((3 * k + 3) * (3 * k + 4))
        gp_term *= cube / ((3 * k + 1) * (3 * k + 3))
        if k > 0:
            fp_term *= cube / (3 * k * (3 * k + 2))
            fp_terms.append(fp_term)
        f_terms.append(f_term)
        g_terms.append(g_term)
        gp_terms.append(gp_term)
        largest = max(abs(f_term), abs(g_term), abs(fp_term), abs(gp_term))
        if largest < _SERIES_EPS:
            break
    f_value, g_value = math.fsum(f_terms), math.fsum(g_terms)
    fp_value, gp_value = math.fsum(fp_terms), math.fsum(gp_terms)
    return (
        AI_ZERO * f_value - AI_PRIME_ZERO * g_value,
        AI_ZERO * fp_value - AI_PRIME_ZERO * gp_value,
    )


def _asymptotic_coefficients(n_terms: int) -> Tuple[List[float], List[float]]:
    u_coefficients, v_coefficients = [1.0], [1.0]
    for k in range(1, n_terms):
        u_k = (
            (6 * k - 5)
            * (6 * k - 3)
            * (6 * k - 1)
            / ((2 * k - 1) * 216.0 * k)
            * u_coefficients[-1]
        )
        u_coefficients.append(u_k)
        v_coefficients.append(-(6 * k + 1) / (6 * k - 1) * u_k)
    return u_coefficients, v_coefficients


_U_COEFFICIENTS, _V_COEFFICIENTS = _asymptotic_coefficients(40)


def _truncated_sum(coefficients: List[float], inverse: float, step: int) -> float:
    """Sum sign-alternating terms c_k inverse^k, stopping at the smallest."""
    terms: List[float] = []
    previous = math.inf
    power = 1.0
    for index, coefficient in enumerate(coefficients):
        if index % step != 0:
            power *= inverse
            continue
        term = coefficient * power * (-1) ** (index // step)
        if abs(term) > previous:
            break
        terms.append(term)
        previous = abs(term)
        if previous < _SERIES_EPS * abs(terms[0]):
            break
        power *= inverse
    return math.fsum(terms)


def _airy_asymptotic_positive(x: float) -> Tuple[float, float]:
    zeta = 2.0 / 3.0 * x**1.5
    inverse = 1.0 / zeta
    ai_sum = _truncated_sum(_U_COEFFICIENTS, inverse, step=1)
    aip_sum = _truncated_sum(_V_COEFFICIENTS, inverse, step=1)
    prefactor = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    quarter = x**0.25
    return prefactor / quarter * ai_sum, -prefactor * quarter * aip_sum


def _airy_asymptotic_negative(z: float) -> Tuple[float, float]:
    """Ai(-z) and Ai'(-z) for large positive z."""
    zeta = 2.0 / 3.0 * z**1.5
    inverse = 1.0 / zeta
    u_even = _truncated_sum(_U_COEFFICIENTS, inverse, step=2)
    u_odd = inverse * _truncated_sum(_U_COEFFICIENTS[1:], inverse, step=2)
    v_even = _truncated_sum(_V_COEFFICIENTS, inverse, step=2)
    v_odd = inverse * _truncated_sum(_V_COEFFICIENTS[1:], inverse, step=2)
    phase = zeta - math.pi / 4.0
    cos_phase, sin_phase = math.cos(phase), math.sin(phase)
    quarter = z**0.25
    root_pi = math.sqrt(math.pi)
    ai = (cos_phase * u_even + sin_phase * u_odd) / (root_pi * quarter)
    aip = quarter * (sin_phase * v_even - cos_phase * v_odd) / root_pi
    return ai, aip


def _taylor_step(
    x0: float, value: float, derivative: float, step: float
) -> Tuple[float, float]:
    """Advance the Airy equation y'' = x y from x0 to x0 + step."""
    coefficients = [value, derivative, x0 * value / 2.0]
    value_terms = [value, derivative * step, coefficients[2] * step**2]
    derivative_terms = [derivative, 2.0 * coefficients[2] * step]
    scale = abs(value) + abs(derivative)
    small_in_a_row = 0
    for n in range(1, _MAX_SERIES_TERMS):
        coefficient = x0 * coefficients[n] + coefficients[n - 1]
        coefficient /= (n + 1) * (n + 2)
        coefficients.append(coefficient)
        value_term = coefficient * step ** (n + 2)
        value_terms.append(value_term)
        derivative_terms.append((n + 2) * coefficient * step ** (n + 1))
        if abs(value_term) < _SERIES_EPS * scale:
            small_in_a_row += 1
        else:
            small_in_a_row = 0
        if small_in_a_row >= 3:
            break
    return math.fsum(value_terms), math.fsum(derivative_terms)
