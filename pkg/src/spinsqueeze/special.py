"""Scalar special functions used by the overlap formulas.

The Gaussian mode overlap needs the error function and its inverse.
Both are implemented here from scratch so the numerical core of the
package does not silently depend on platform libm behaviour: ``erf``
uses the Maclaurin series at small argument and a continued fraction
for the complementary function at large argument, and ``erf_inverse``
is a safeguarded Newton iteration on ``erf``.  Accuracy is a few ulp,
comfortably better than the 1e-12 the callers require.
"""

from __future__ import annotations

import math

from .exceptions import DomainError

_SQRT_PI = math.sqrt(math.pi)
_SERIES_CUTOFF = 2.5
_TINY = 1e-300


def _erf_series(x: float) -> float:
    # erf(x) = (2/sqrt(pi)) * sum_k (-1)^k x^(2k+1) / (k! (2k+1))
    x2 = x * x
    term = x
    total = x
    k = 0
    while True:
        k += 1
        term *= -x2 / k
        contrib = term / (2 * k + 1)
        total += contrib
        if abs(contrib) <= 1e-18 * abs(total):
            return (2.0 / _SQRT_PI) * total
        if k > 200:
            raise ArithmeticError("erf series failed to converge")


def _erfc_cf(x: float) -> float:
    # Continued fraction for sqrt(pi) exp(x^2) erfc(x), valid for x > 0:
    #   1/(x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...)))))
    # i.e. partial numerators 1, 1/2, 1, 3/2, 2, ... over a constant
    # partial denominator x, evaluated with the modified Lentz scheme.
    f = _TINY
    c = f
    d = 0.0
    for n in range(1, 300):
        a = 1.0 if n == 1 else (n - 1) / 2.0
        d = x + a * d
        if d == 0.0:
            d = _TINY
        c = x + a / c
        if c == 0.0:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            return f * math.exp(-x * x) / _SQRT_PI
    raise ArithmeticError("erfc continued fraction failed to converge")


def erf(x: float) -> float:
    """Error function of a real argument."""
    if x != x:
        return x
    ax = abs(x)
    if ax <= _SERIES_CUTOFF:
        return _erf_series(x)
    val = 1.0 - _erfc_cf(ax)
    return val if x > 0 else -val


def erfc(x: float) -> float:
    """Complementary error function, accurate in the far tail.

    The continued fraction takes over already at ``|x| > 1`` because the
    complement ``1 - erf(x)`` starts losing digits to cancellation well
    before the series itself degrades.
    """
    if x != x:
        return x
    if x > 1.0:
        return _erfc_cf(x)
    if x < -1.0:
        return 2.0 - _erfc_cf(-x)
    return 1.0 - _erf_series(x)


def erf_inverse(p: float) -> float:
    """Inverse of :func:`erf` on (-1, 1).

    Newton iteration with a bisection safeguard.  The derivative of erf
    is (2/sqrt(pi)) exp(-x^2), so each step is cheap and convergence is
    quadratic once bracketed.
    """
    if not -1.0 < p < 1.0:
        raise DomainError(f"erf_inverse argument must lie in (-1, 1), got {p}")
    if p == 0.0:
        return 0.0
    if p < 0.0:
        return -erf_inverse(-p)

    lo, hi = 0.0, 1.0
    while erf(hi) < p:
        lo = hi
        hi *= 2.0
    x = 0.5 * (lo + hi)
    for _ in range(100):
        fx = erf(x) - p
        if fx > 0.0:
            hi = x
        else:
            lo = x
        dfx = (2.0 / _SQRT_PI) * math.exp(-x * x)
        step = fx / dfx
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-16 * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x
