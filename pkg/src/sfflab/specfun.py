"""Scalar special-function kernel backing the analytic spacing transforms.

Provides log-Gamma, the Pochhammer symbol, the confluent hypergeometric
series 1F1, and the generalized Laguerre *function* of possibly
non-integer degree evaluated through its power series.  The degree of
the Laguerre function grows quadratically with the neighbor index, so a
high-degree oscillatory approximation is provided as well.

Series evaluation uses compensated (Kahan) summation and flags
catastrophic cancellation instead of silently losing digits.
"""

import math
import warnings
from dataclasses import dataclass

from scipy.special import gammaln as _gammaln


class SeriesConvergenceError(RuntimeError):
    """Raised when a series does not meet tolerance within max_terms."""


class PrecisionLossWarning(RuntimeWarning):
    """Emitted when alternating-series cancellation eats the result."""


# Largest term may exceed the sum by this factor before we warn; with
# 64-bit floats this corresponds to roughly 1e-3 relative accuracy left.
_CANCELLATION_RATIO = 1e12


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite series in this module.

    A term ends the summation once ``|term| < abs_tol * max(1, |sum|)``
    or ``|term| < rel_tol * |sum|``; at least one tolerance must be
    strictly positive.
    """

    max_terms: int = 10_000
    abs_tol: float = 1e-15
    rel_tol: float = 0.0

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be > 0")


DEFAULT_SERIES = SeriesControl()


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return float(_gammaln(x))


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1."""
    if n < 0 or n != int(n):
        raise ValueError(f"pochhammer requires a non-negative integer n, got {n}")
    out = 1.0
    for i in range(int(n)):
        out *= a + i
    return out


def _kahan_add(total, comp, term):
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def _converged(term, total, ctrl):
    a = abs(term)
    if ctrl.abs_tol > 0 and a < ctrl.abs_tol * max(1.0, abs(total)):
        return True
    if ctrl.rel_tol > 0 and a < ctrl.rel_tol * abs(total):
        return True
    return False


def hyp1f1(a: float, b: float, z: float, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """Confluent hypergeometric function 1F1(a; b; z).

    Direct term-recurrence series for z >= 0.  For z < 0 the Kummer
    transformation ``1F1(a;b;z) = e^z 1F1(b-a; b; -z)`` is applied first
    so that the summed series has no sign alternation from z.
    """
    if b <= 0 and b == round(b):
        raise ValueError(f"hyp1f1 pole: b={b} is a non-positive integer")
    if z < 0:
        return math.exp(z) * hyp1f1(b - a, b, -z, ctrl)
    total, comp = 0.0, 0.0
    term = 1.0
    for n in range(ctrl.max_terms):
        total, comp = _kahan_add(total, comp, term)
        term *= (a + n) / (b + n) * z / (n + 1)
        if term == 0.0 or _converged(term, total, ctrl):
            return total
    raise SeriesConvergenceError(
        f"hyp1f1({a}, {b}, {z}) did not converge in {ctrl.max_terms} terms"
    )


def laguerre_fn(mu: float, a: float, z: float, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """Generalized Laguerre function L_mu^a(z) of real degree mu >= 0.

    Evaluated by its binomial power series; the leading coefficient
    Gamma(mu+a+1) / (Gamma(mu+1) Gamma(a+1)) is formed in log space and
    the rest follows by term recurrence.  When 2*mu is an even integer
    the recurrence terminates and the result is exactly the Laguerre
    polynomial of degree mu.  Warns via PrecisionLossWarning when the
    alternating series cancels more than ~12 decimal digits (large z).
    """
    if mu < 0:
        raise ValueError(f"laguerre_fn requires degree mu >= 0, got {mu}")
    if a <= -1:
        raise ValueError(f"laguerre_fn requires a > -1, got {a}")
    if z < 0:
        raise ValueError(f"laguerre_fn requires z >= 0, got {z}")
    term = math.exp(log_gamma(mu + a + 1) - log_gamma(mu + 1) - log_gamma(a + 1))
    total, comp = 0.0, 0.0
    largest = abs(term)
    for j in range(ctrl.max_terms):
        total, comp = _kahan_add(total, comp, term)
        term *= (j - mu) / (a + 1 + j) * z / (j + 1)
        largest = max(largest, abs(term))
        if term == 0.0 or _converged(term, total, ctrl):
            if total != 0.0 and largest > _CANCELLATION_RATIO * abs(total):
                warnings.warn(
                    f"laguerre_fn(mu={mu}, a={a}, z={z}): cancellation ratio "
                    f"{largest / abs(total):.2e}, result has lost precision",
                    PrecisionLossWarning,
                    stacklevel=2,
                )
            return total
    raise SeriesConvergenceError(
        f"laguerre_fn({mu}, {a}, {z}) did not converge in {ctrl.max_terms} terms"
    )


def laguerre_bias(a: float, x: float) -> float:
    """Sine-term coefficient b_a(x) of the high-degree Laguerre form."""
    if x <= 0:
        raise ValueError(f"laguerre_bias requires x > 0, got {x}")
    return (4 * x * x - 12 * a * a - 24 * a * x - 24 * x + 3) / (48 * math.sqrt(x))


def laguerre_phase(n: float, a: float, x: float) -> float:
    """Oscillation phase 2 sqrt(n x) - a pi/2 - pi/4 of the same form."""
    if x <= 0:
        raise ValueError(f"laguerre_phase requires x > 0, got {x}")
    return 2 * math.sqrt(n * x) - a * math.pi / 2 - math.pi / 4


def laguerre_asymptotic(n: float, a: float, x: float) -> float:
    """Two-term oscillatory approximation of L_n^a(x) for high degree n.

    Accurate to relative O(1/n); intended for n >= 5 and x > 0.
    """
    if x <= 0:
        raise ValueError(f"laguerre_asymptotic requires x > 0, got {x}")
    if n < 5:
        raise ValueError(f"laguerre_asymptotic requires degree n >= 5, got {n}")
    theta = laguerre_phase(n, a, x)
    amp = n ** (a / 2 - 0.25) / (math.sqrt(math.pi) * x ** (a / 2 + 0.25))
    return amp * math.exp(x / 2) * (
        math.cos(theta) + laguerre_bias(a, x) / math.sqrt(n) * math.sin(theta)
    )
