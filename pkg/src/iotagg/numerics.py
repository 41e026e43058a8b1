"""Numerical building blocks: the lower incomplete gamma function and the
adaptive quadrature used for expectations over distance densities.

The incomplete gamma uses the series expansion below x = s + 1 and a
Lentz continued fraction for the upper tail above it (Numerical Recipes,
ch. 6.2).
"""

import math
import sys

from scipy import integrate

_EPS = sys.float_info.epsilon
_TINY = 1e-300
_MAX_ITER = 10_000


QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8
QUAD_MAX_SUBDIVISIONS = 10_000


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its tolerance."""

    def __init__(self, message: str, achieved: float = math.nan):
        super().__init__(message)
        self.achieved = achieved


def _series(s: float, x: float) -> float:
    """Regularized P(s, x) by the power series."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise NumericalError(f"gamma series did not converge for s={s}, x={x}")


def _continued_fraction(s: float, x: float) -> float:
    """Regularized Q(s, x) by the modified Lentz continued fraction."""
    log_prefactor = -x + s * math.log(x) - math.lgamma(s)
    if log_prefactor < -750.0:
        return 0.0  # below the smallest subnormal
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(log_prefactor) * h
    raise NumericalError(f"gamma continued fraction did not converge for s={s}, x={x}")


def regularized_lower_gamma(s: float, x: float) -> float:
    """P(s, x) = gamma(s, x) / Gamma(s)."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    if not x >= 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return _series(s, x)
    return 1.0 - _continued_fraction(s, x)


def lower_incomplete_gamma(s: float, x: float) -> float:
    """gamma(s, x) = integral_0^x t**(s-1) exp(-t) dt (not regularized)."""
    return math.gamma(s) * regularized_lower_gamma(s, x)


def quad(func, a: float, b: float, points=None) -> float:
    """Adaptive Gauss-Kronrod integral of ``func`` over [a, b].

    Raises NumericalError, carrying the achieved error estimate, when the
    refinement does not converge.
    """
    if a == b:
        return 0.0
    value, abserr, info, *rest = integrate.quad(
        func,
        a,
        b,
        epsabs=QUAD_ABS_TOL,
        epsrel=QUAD_REL_TOL,
        limit=QUAD_MAX_SUBDIVISIONS,
        points=points,
        full_output=1,
    )
    if rest and abserr > max(QUAD_ABS_TOL, QUAD_REL_TOL * abs(value)):
        raise NumericalError(f"quadrature over [{a}, {b}] did not converge: {rest[0]}", abserr)
    return value
