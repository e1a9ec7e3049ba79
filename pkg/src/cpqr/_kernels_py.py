"""Pure-Python reference kernels.

These are the hot numerical loops of the package: the double quadrature
accumulator for the surface potential, the log-log spline evaluator for
tabulated potentials, and the embedded Runge-Kutta propagator for the
semiclassical amplitude equations.  A compiled extension (``cpqr._core``)
implements the same three entry points with identical semantics; whichever is
available is selected by :mod:`cpqr.backend` at import time.  Keep the two in
lockstep -- the test suite cross-checks them point by point.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["cp_accumulate", "potential_eval", "propagate"]


# ---------------------------------------------------------------------------
# quadrature accumulator
# ---------------------------------------------------------------------------


def cp_accumulate(xi, wxi, alpha, eps, u, wu, z, c, thickness, perfect):
    """Accumulate the dispersion potential double integral at distance ``z``.

    ``xi``/``wxi`` are frequency nodes and weights on the imaginary axis,
    ``alpha`` and ``eps`` the polarizability and permittivity evaluated on
    those nodes, and ``u``/``wu`` nodes and weights for the
    transverse-momentum integral after the substitution
    ``kappa = xi/c + u/(2 z)``; the weights already carry the ``exp(-u)``
    damping, so the kernel sees a plain weighted sum.  ``thickness <= 0``
    means a half-space mirror; ``perfect`` selects the ideal-conductor
    closed form for the mode sum.
    """
    xi = np.asarray(xi, dtype=float)
    wxi = np.asarray(wxi, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    u = np.asarray(u, dtype=float)
    wu = np.asarray(wu, dtype=float)

    xi_c = (xi / c)[:, None]  # (n, 1)
    du = (u / (2.0 * z))[None, :]  # (1, m)
    kappa = xi_c + du
    # k^2 = kappa^2 - (xi/c)^2 computed in factored form: no cancellation
    ksq = du * (2.0 * xi_c + du)

    if perfect:
        g = -2.0 * (c * c) * kappa * kappa
    else:
        eps_col = np.asarray(eps, dtype=float)[:, None]
        kcap = np.sqrt(ksq + eps_col * xi_c * xi_c)
        rho_te = (kappa - kcap) / (kappa + kcap)
        rho_tm = (eps_col * kappa - kcap) / (eps_col * kappa + kcap)
        if thickness > 0.0:
            em1 = -np.expm1(-2.0 * thickness * kcap)
            rho_te = em1 * rho_te / ((1.0 - rho_te * rho_te) + em1 * rho_te * rho_te)
            rho_tm = em1 * rho_tm / ((1.0 - rho_tm * rho_tm) + em1 * rho_tm * rho_tm)
        xi_sq = (xi * xi)[:, None]
        g = xi_sq * rho_te - (xi_sq + 2.0 * (c * c) * ksq) * rho_tm

    inner = g @ wu  # (n,)
    outer = float(np.dot(wxi * alpha * np.exp(-2.0 * z * xi_c[:, 0]), inner))
    return outer / (4.0 * math.pi * z * c * c)


# ---------------------------------------------------------------------------
# log-log spline evaluation with power-law tails
# ---------------------------------------------------------------------------


def _spline_s(knots, coeffs, lo_slope, hi_slope, x):
    """Evaluate S, S', S'' at ``x`` for the cubic spline of S = ln(-V) vs ln z.

    Outside the knot range S continues linearly (a pure power law in z) with
    the supplied slopes.
    """
    n = knots.shape[0]
    if x <= knots[0]:
        s0 = coeffs[3, 0]
        return s0 + lo_slope * (x - knots[0]), lo_slope, 0.0
    if x >= knots[n - 1]:
        h = knots[n - 1] - knots[n - 2]
        j = n - 2
        s_end = ((coeffs[0, j] * h + coeffs[1, j]) * h + coeffs[2, j]) * h + coeffs[3, j]
        return s_end + hi_slope * (x - knots[n - 1]), hi_slope, 0.0
    j = int(np.searchsorted(knots, x, side="right")) - 1
    if j > n - 2:
        j = n - 2
    d = x - knots[j]
    c3, c2, c1, c0 = coeffs[0, j], coeffs[1, j], coeffs[2, j], coeffs[3, j]
    s = ((c3 * d + c2) * d + c1) * d + c0
    s1 = (3.0 * c3 * d + 2.0 * c2) * d + c1
    s2 = 6.0 * c3 * d + 2.0 * c2
    return s, s1, s2


def potential_eval(knots, coeffs, lo_slope, hi_slope, z):
    """Return (V, V', V'') at ``z`` from the tabulated log-log representation."""
    s, s1, s2 = _spline_s(knots, coeffs, lo_slope, hi_slope, math.log(z))
    v = -math.exp(s)
    dv = v * s1 / z
    d2v = v * (s2 + s1 * s1 - s1) / (z * z)
    return v, dv, d2v


# ---------------------------------------------------------------------------
# amplitude propagation
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_A2 = (1.0 / 5.0,)
_A3 = (3.0 / 40.0, 9.0 / 40.0)
_A4 = (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0)
_A5 = (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0)
_A6 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_B4 = (
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
)
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)


def _rhs(t, y, mode, zmap, knots, coeffs, lo_slope, hi_slope, mass, energy, out):
    """Amplitude equations for the state (Re c+, Im c+, Re c-, Im c-, phase).

    ``mode`` 0 integrates in the near-wall variable x (z = zmap / x^2, which
    keeps the stiff wall region on an O(1) scale); ``mode`` 1 integrates in z
    directly.
    """
    if mode == 0:
        x = t
        z = zmap / (x * x)
        jac = -2.0 * z / x  # dz/dx
    else:
        z = t
        jac = 1.0
    v, dv, _ = potential_eval(knots, coeffs, lo_slope, hi_slope, z)
    p = math.sqrt(2.0 * mass * (energy - v))
    g = (-mass * dv / (p * p) / 2.0) * jac  # (dp/dz) / (2 p) * dz/dt
    two_phi = 2.0 * y[4]
    cos2 = math.cos(two_phi)
    sin2 = math.sin(two_phi)
    # dc+/dt = g e^{-2 i phi} c- ; dc-/dt = g e^{+2 i phi} c+
    out[0] = g * (cos2 * y[2] + sin2 * y[3])
    out[1] = g * (cos2 * y[3] - sin2 * y[2])
    out[2] = g * (cos2 * y[0] - sin2 * y[1])
    out[3] = g * (cos2 * y[1] + sin2 * y[0])
    out[4] = p * jac
    return out


def propagate(
    y0,
    t0,
    t1,
    mode,
    zmap,
    knots,
    coeffs,
    lo_slope,
    hi_slope,
    mass,
    energy,
    rtol,
    atol,
    max_steps,
):
    """Propagate the amplitude state from ``t0`` to ``t1``.

    Returns ``(y, current_defect, accepted_steps, status)`` where the current
    defect is the largest drift of the conserved flux |c-|^2 - |c+|^2 seen at
    any accepted step, and status is 0 on success, 1 if the step budget ran
    out, 2 if the step size underflowed.
    """
    knots = np.ascontiguousarray(knots, dtype=float)
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    y = np.array(y0, dtype=float, copy=True)
    if y.shape != (5,):
        raise ValueError("state must have five components")
    t = float(t0)
    span = float(t1) - t
    if span == 0.0:
        return y, 0.0, 0, 0
    direction = 1.0 if span > 0 else -1.0
    h = span / 128.0

    k = np.empty((7, 5))
    ytmp = np.empty(5)
    args = (mode, zmap, knots, coeffs, lo_slope, hi_slope, mass, energy)
    _rhs(t, y, *args, k[0])

    flux0 = (y[2] * y[2] + y[3] * y[3]) - (y[0] * y[0] + y[1] * y[1])
    flux_scale = max(abs(flux0), 1.0)
    defect = 0.0
    accepted = 0
    attempts = 0

    while (t1 - t) * direction > 0.0:
        if (t + h - t1) * direction > 0.0:
            h = t1 - t
        attempts += 1
        if attempts > max_steps:
            return y, defect, accepted, 1
        if abs(h) <= 1e-14 * max(abs(t), abs(t1)):
            return y, defect, accepted, 2

        for i, row in enumerate((_A2, _A3, _A4, _A5, _A6, _B5[:6]), start=1):
            np.copyto(ytmp, y)
            for j, a in enumerate(row):
                if a != 0.0:
                    ytmp += (h * a) * k[j]
            _rhs(t + _C[i] * h, ytmp, *args, k[i])

        # k[6] was filled with the B5 combination slopes: build both orders
        y5 = y + h * (
            _B5[0] * k[0] + _B5[2] * k[2] + _B5[3] * k[3] + _B5[4] * k[4] + _B5[5] * k[5]
        )
        y4 = y + h * (
            _B4[0] * k[0]
            + _B4[2] * k[2]
            + _B4[3] * k[3]
            + _B4[4] * k[4]
            + _B4[5] * k[5]
            + _B4[6] * k[6]
        )
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))

        if err <= 1.0:
            t += h
            y = y5
            np.copyto(k[0], k[6])  # FSAL: last stage evaluated at (t+h, y5)
            accepted += 1
            flux = (y[2] * y[2] + y[3] * y[3]) - (y[0] * y[0] + y[1] * y[1])
            drift = abs(flux - flux0) / flux_scale
            if drift > defect:
                defect = drift
        factor = 0.9 * (err ** -0.2) if err > 0.0 else 5.0
        factor = min(5.0, max(0.2, factor))
        h *= factor

    return y, defect, accepted, 0
