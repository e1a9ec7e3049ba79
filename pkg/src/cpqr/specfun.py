"""Confluent hypergeometric machinery for the near-wall wave solution.

Double-precision Kummer functions M(a, b, t) and U(a, b, t) tuned for the
neighbourhood the wall matching actually uses: a near 3/2, integer b near 4,
and t on or near the imaginary axis with |t| from ~1 to a few hundred.  Three
branches per function:

* power series (M) / logarithmic limit form for integer b (U) while the
  largest series term stays small enough that cancellation is harmless;
* well-conditioned integral representations in the awkward middle zone,
  where the series loses ~|t|*log10(e) digits on the imaginary axis but the
  asymptotic expansion has not yet converged;
* asymptotic expansions in inverse powers of t beyond ASYMPTOTIC_RADIUS,
  where the smallest term sits far below the accuracy targets.

Branch cut along the negative real axis (principal branch everywhere).
Every branch returns an internal error estimate; a result whose estimate
exceeds the requested tolerance raises AccuracyError instead of being
silently returned.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np
from scipy.special import digamma, j1, roots_genlaguerre, roots_legendre, y1

from .errors import AccuracyError, DomainError

__all__ = ["kummer_m", "kummer_u", "hankel1_order1", "SERIES_RADIUS", "ASYMPTOTIC_RADIUS"]

# |t| below which plain summation keeps full precision (max term ~ e^8).
SERIES_RADIUS = 8.0
# |t| beyond which the asymptotic series bottoms out below ~1e-20 relative.
ASYMPTOTIC_RADIUS = 60.0

_EPS = np.finfo(float).eps
_MAX_TERMS = 600


def _kahan_sum(terms):
    """Compensated complex summation; returns (sum, largest |term|)."""
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    biggest = 0.0
    for term in terms:
        biggest = max(biggest, abs(term))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, biggest


# ---------------------------------------------------------------------------
# M(a, b, t)
# ---------------------------------------------------------------------------


def _m_series(a: float, b: float, t: complex):
    """Taylor series sum_k (a)_k t^k / ((b)_k k!). Returns (value, error est)."""
    terms = [1.0 + 0.0j]
    term = 1.0 + 0.0j
    for k in range(_MAX_TERMS):
        term = term * (a + k) / ((b + k) * (k + 1)) * t
        terms.append(term)
        if abs(term) < _EPS * 1e-3:
            break
    total, biggest = _kahan_sum(terms)
    scale = max(abs(total), 1e-300)
    # rounding of the largest term dominates after cancellation
    achieved = max(abs(term) / scale, biggest * _EPS / scale)
    return total, achieved


@lru_cache(maxsize=8)
def _gl_nodes(n: int):
    nodes, weights = roots_legendre(n)
    return nodes, weights


def _m_integral(a: float, b: float, t: complex, n: int = 256):
    """Euler integral M = G(b)/(G(a)G(b-a)) * int_0^1 e^(t u) u^(a-1)(1-u)^(b-a-1) du.

    The substitution u = sin(theta)^2 removes both endpoint branch points, so
    Gauss-Legendre converges spectrally; |e^(t u)| <= e^max(Re t, 0) keeps the
    integrand well scaled for the |t| <= ASYMPTOTIC_RADIUS calls we make.
    """
    if not (b > a > 0):
        raise DomainError(f"M integral branch needs b > a > 0, got a={a}, b={b}")
    pref = math.gamma(b) / (math.gamma(a) * math.gamma(b - a))

    def quad(m):
        x, w = _gl_nodes(m)
        theta = 0.25 * math.pi * (x + 1.0)
        s2 = np.sin(theta) ** 2
        f = (
            np.exp(t * s2)
            * np.sin(theta) ** (2 * a - 1)
            * np.cos(theta) ** (2 * (b - a) - 1)
        )
        return 0.25 * math.pi * np.sum(w * 2.0 * f)

    hi = quad(n)
    lo = quad(n // 2)
    value = pref * hi
    achieved = abs(hi - lo) / max(abs(hi), 1e-300) + 4 * _EPS
    return value, achieved


def _asymptotic_series(a: float, c: float, z: complex):
    """sum_s (a)_s (c)_s / (s! z^s), truncated at the smallest term.

    Returns (sum, bound) with bound = |first omitted term| / |sum|.
    """
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    smallest = 1.0
    for s in range(_MAX_TERMS):
        new = term * (a + s) * (c + s) / ((s + 1) * z)
        if abs(new) >= abs(term):
            smallest = abs(new)
            break
        term = new
        total += term
        smallest = abs(term)
        if smallest < _EPS * 1e-3 * abs(total):
            break
    return total, smallest / max(abs(total), 1e-300)


def _m_asymptotic(a: float, b: float, t: complex):
    """Large-|t| form: two inverse-power series around e^t t^(a-b) and (-t)^(-a)."""
    s1, e1 = _asymptotic_series(a, a - b + 1, -t)
    s2, e2 = _asymptotic_series(b - a, 1 - a, t)
    p1 = (-t) ** (-a) * s1 / math.gamma(b - a)
    p2 = cmath.exp(t) * t ** (a - b) * s2 / math.gamma(a)
    value = math.gamma(b) * (p1 + p2)
    scale = max(abs(value), 1e-300)
    achieved = (abs(p1) * e1 + abs(p2) * e2) * math.gamma(b) / scale + 4 * _EPS
    return value, achieved


def kummer_m(a: float, b: float, t: complex, rtol: float = 1e-10) -> complex:
    """Kummer's confluent hypergeometric function M(a, b, t) = 1F1(a; b; t).

    Parameters
    ----------
    a, b : real parameters; b must not be a non-positive integer.
    t : complex argument (principal branch for the large-|t| form).
    rtol : relative accuracy target; AccuracyError if unattainable.
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"M undefined for non-positive integer b = {b}")
    t = complex(t)
    r = abs(t)
    if r <= SERIES_RADIUS:
        value, achieved = _m_series(a, b, t)
    elif r <= ASYMPTOTIC_RADIUS and b > a > 0:
        value, achieved = _m_integral(a, b, t)
    else:
        value, achieved = _m_asymptotic(a, b, t)
    if achieved > rtol:
        raise AccuracyError(
            f"M({a}, {b}, {t}): achieved ~{achieved:.2e}, requested {rtol:.2e}",
            achieved=achieved,
        )
    return value


# ---------------------------------------------------------------------------
# U(a, b, t)
# ---------------------------------------------------------------------------


def _reciprocal_gamma(x: float) -> float:
    if x <= 0 and float(x).is_integer():
        return 0.0
    return 1.0 / math.gamma(x)


def _u_logseries(a: float, n: int, t: complex):
    """U(a, n+1, t) for integer b = n+1 >= 2 via the logarithmic limit form.

    U = (-1)^(n+1)/(n! G(a-n)) * sum_k (a)_k t^k/((n+1)_k k!) *
        [ln t + psi(a+k) - psi(1+k) - psi(n+1+k)]
        + (n-1)!/G(a) * t^(-n) * sum_{k<n} (a-n)_k t^k/((1-n)_k k!)
    """
    log_t = cmath.log(t)
    coeff = 1.0 + 0.0j
    terms = []
    for k in range(_MAX_TERMS):
        psi_k = digamma(a + k) - digamma(1.0 + k) - digamma(n + 1.0 + k)
        terms.append(coeff * (log_t + psi_k))
        coeff = coeff * (a + k) / ((n + 1 + k) * (k + 1)) * t
        if abs(coeff) < _EPS * 1e-3 and k > 4:
            break
    series, biggest = _kahan_sum(terms)
    part1 = (-1.0) ** (n + 1) / math.factorial(n) * _reciprocal_gamma(a - n) * series

    finite = 0.0 + 0.0j
    coeff = 1.0 + 0.0j
    for k in range(n):
        finite += coeff
        if k < n - 1:
            coeff = coeff * (a - n + k) / ((1 - n + k) * (k + 1)) * t
    part2 = math.factorial(n - 1) / math.gamma(a) * t ** (-n) * finite

    value = part1 + part2
    scale = max(abs(value), 1e-300)
    achieved = (biggest + abs(part2)) * _EPS * 4 / scale
    return value, achieved


@lru_cache(maxsize=8)
def _glag_nodes(n: int, alpha: float):
    nodes, weights = roots_genlaguerre(n, alpha)
    return nodes, weights


def _u_integral(a: float, b: float, t: complex, n: int = 200):
    """Laplace integral on the rotated ray arg w = -arg t:

        U = e^(i theta a) / (G(a) |t|^a) int_0^inf e^-u u^(a-1) (1 + u e^(i theta)/|t|)^(b-a-1) du

    valid off the negative real axis for Re a > 0; generalized Gauss-Laguerre
    absorbs the u^(a-1) e^-u weight.
    """
    if a <= 0:
        raise DomainError(f"U integral branch needs a > 0, got a={a}")
    theta = -cmath.phase(t)
    rot = cmath.exp(1j * theta)
    r = abs(t)

    def quad(m):
        u, w = _glag_nodes(m, a - 1.0)
        f = (1.0 + u * rot / r) ** (b - a - 1.0)
        return np.sum(w * f)

    hi = quad(n)
    lo = quad(n // 2)
    value = cmath.exp(1j * theta * a) / (math.gamma(a) * r**a) * hi
    achieved = abs(hi - lo) / max(abs(hi), 1e-300) + 4 * _EPS
    return value, achieved


def _u_asymptotic(a: float, b: float, t: complex):
    """U ~ t^(-a) sum_s (a)_s (a-b+1)_s / (s! (-t)^s) for large |t|."""
    s1, e1 = _asymptotic_series(a, a - b + 1, -t)
    value = t ** (-a) * s1
    return value, e1 + 4 * _EPS


def kummer_u(a: float, b: float, t: complex, rtol: float = 1e-9) -> complex:
    """Tricomi's confluent hypergeometric function U(a, b, t), principal branch.

    Integer b is handled through the logarithmic limit form; the negative real
    axis (the branch cut) is rejected outside the series zone.
    """
    t = complex(t)
    if t == 0:
        raise DomainError("U(a, b, 0) is singular")
    r = abs(t)
    on_cut = t.real < 0 and t.imag == 0
    if r <= SERIES_RADIUS:
        if float(b).is_integer() and b >= 2:
            value, achieved = _u_logseries(a, int(b) - 1, t)
        elif not float(b).is_integer():
            # two-M connection, safe for small |t|
            m1, e1 = _m_series(a, b, t)
            m2, e2 = _m_series(a - b + 1.0, 2.0 - b, t)
            p1 = math.gamma(1.0 - b) * _reciprocal_gamma(a - b + 1.0) * m1
            p2 = math.gamma(b - 1.0) * _reciprocal_gamma(a) * t ** (1.0 - b) * m2
            value = p1 + p2
            achieved = (abs(p1) * e1 + abs(p2) * e2) / max(abs(value), 1e-300) + 4 * _EPS
        else:
            raise DomainError(f"U not implemented for integer b = {b} < 2")
    elif r <= ASYMPTOTIC_RADIUS and a > 0 and not on_cut:
        value, achieved = _u_integral(a, b, t)
    elif not on_cut:
        value, achieved = _u_asymptotic(a, b, t)
    else:
        raise DomainError(f"U on the branch cut (t = {t}) outside the series zone")
    if achieved > rtol:
        raise AccuracyError(
            f"U({a}, {b}, {t}): achieved ~{achieved:.2e}, requested {rtol:.2e}",
            achieved=achieved,
        )
    return value


# ---------------------------------------------------------------------------
# outgoing cylinder wave
# ---------------------------------------------------------------------------


def hankel1_order1(x: float) -> complex:
    """H1(1, x) = J1(x) + i Y1(x) for real x > 0."""
    if not x > 0:
        raise DomainError(f"hankel1_order1 needs x > 0, got {x}")
    return complex(j1(x), y1(x))
