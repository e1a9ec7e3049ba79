# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Same three entry points and semantics as ``cpqr._kernels_py`` (which is the
reference implementation): the double-quadrature accumulator for the surface
potential, the log-log spline evaluator, and the embedded Runge-Kutta
amplitude propagator.  Operation order mirrors the Python code so results
agree to rounding; the test suite cross-checks the two backends point by
point.
"""

import numpy as np

from libc.math cimport cos, exp, expm1, fabs, log, pow, sin, sqrt

cdef double PI = 3.141592653589793

__all__ = ["cp_accumulate", "potential_eval", "propagate"]


# ---------------------------------------------------------------------------
# quadrature accumulator
# ---------------------------------------------------------------------------


def cp_accumulate(xi, wxi, alpha, eps, u, wu, double z, double c,
                  double thickness, bint perfect):
    """Accumulate the dispersion potential double integral at distance ``z``.

    See ``cpqr._kernels_py.cp_accumulate`` for the argument contract; the
    ``wu`` weights already carry the ``exp(-u)`` damping.
    """
    cdef double[::1] xi_v = np.ascontiguousarray(xi, dtype=np.float64)
    cdef double[::1] wxi_v = np.ascontiguousarray(wxi, dtype=np.float64)
    cdef double[::1] alpha_v = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef double[::1] eps_v = np.ascontiguousarray(eps, dtype=np.float64)
    cdef double[::1] u_v = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] wu_v = np.ascontiguousarray(wu, dtype=np.float64)

    cdef Py_ssize_t n = xi_v.shape[0]
    cdef Py_ssize_t m = u_v.shape[0]
    cdef Py_ssize_t i, j
    cdef double xi_c, xi_sq, eps_i, du, kappa, ksq, kcap
    cdef double rho_te, rho_tm, em1, g, inner, outer
    cdef double c_sq = c * c
    cdef double half_z = 2.0 * z

    outer = 0.0
    for i in range(n):
        xi_c = xi_v[i] / c
        xi_sq = xi_v[i] * xi_v[i]
        eps_i = eps_v[i]
        inner = 0.0
        for j in range(m):
            du = u_v[j] / half_z
            kappa = xi_c + du
            # k^2 = kappa^2 - (xi/c)^2 in factored form: no cancellation
            ksq = du * (2.0 * xi_c + du)
            if perfect:
                g = -2.0 * c_sq * kappa * kappa
            else:
                kcap = sqrt(ksq + eps_i * xi_c * xi_c)
                rho_te = (kappa - kcap) / (kappa + kcap)
                rho_tm = (eps_i * kappa - kcap) / (eps_i * kappa + kcap)
                if thickness > 0.0:
                    em1 = -expm1(-2.0 * thickness * kcap)
                    rho_te = em1 * rho_te / ((1.0 - rho_te * rho_te) + em1 * rho_te * rho_te)
                    rho_tm = em1 * rho_tm / ((1.0 - rho_tm * rho_tm) + em1 * rho_tm * rho_tm)
                g = xi_sq * rho_te - (xi_sq + 2.0 * c_sq * ksq) * rho_tm
            inner += g * wu_v[j]
        outer += wxi_v[i] * alpha_v[i] * exp(-2.0 * z * xi_c) * inner
    return outer / (4.0 * PI * z * c * c)


# ---------------------------------------------------------------------------
# log-log spline evaluation with power-law tails
# ---------------------------------------------------------------------------


cdef void _spline_s(const double[::1] knots, const double[:, ::1] coeffs,
                    double lo_slope, double hi_slope, double x,
                    double* s, double* s1, double* s2) nogil:
    cdef Py_ssize_t n = knots.shape[0]
    cdef Py_ssize_t lo, hi, mid, j
    cdef double h, d, c3_, c2_, c1_, c0_
    if x <= knots[0]:
        s[0] = coeffs[3, 0] + lo_slope * (x - knots[0])
        s1[0] = lo_slope
        s2[0] = 0.0
        return
    if x >= knots[n - 1]:
        h = knots[n - 1] - knots[n - 2]
        j = n - 2
        s[0] = (((coeffs[0, j] * h + coeffs[1, j]) * h + coeffs[2, j]) * h
                + coeffs[3, j]) + hi_slope * (x - knots[n - 1])
        s1[0] = hi_slope
        s2[0] = 0.0
        return
    # searchsorted(side="right") - 1
    lo = 0
    hi = n
    while lo < hi:
        mid = (lo + hi) // 2
        if knots[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    j = lo - 1
    if j > n - 2:
        j = n - 2
    d = x - knots[j]
    c3_ = coeffs[0, j]
    c2_ = coeffs[1, j]
    c1_ = coeffs[2, j]
    c0_ = coeffs[3, j]
    s[0] = ((c3_ * d + c2_) * d + c1_) * d + c0_
    s1[0] = (3.0 * c3_ * d + 2.0 * c2_) * d + c1_
    s2[0] = 6.0 * c3_ * d + 2.0 * c2_


def potential_eval(knots, coeffs, double lo_slope, double hi_slope, double z):
    """Return (V, V', V'') at ``z`` from the tabulated log-log representation."""
    cdef double[::1] kn = np.ascontiguousarray(knots, dtype=np.float64)
    cdef double[:, ::1] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double s = 0.0, s1 = 0.0, s2 = 0.0, v, dv, d2v
    _spline_s(kn, cf, lo_slope, hi_slope, log(z), &s, &s1, &s2)
    v = -exp(s)
    dv = v * s1 / z
    d2v = v * (s2 + s1 * s1 - s1) / (z * z)
    return v, dv, d2v


# ---------------------------------------------------------------------------
# amplitude propagation
# ---------------------------------------------------------------------------

cdef double _A[6][6]
_A[0][:] = [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0]
_A[1][:] = [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0]
_A[2][:] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0]
_A[3][:] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
            -212.0 / 729.0, 0.0, 0.0]
_A[4][:] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
            -5103.0 / 18656.0, 0.0]
_A[5][:] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
            -2187.0 / 6784.0, 11.0 / 84.0]

cdef double _B5[6]
_B5[:] = [35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
          11.0 / 84.0, 0.0]  # indices 0, 2, 3, 4, 5 of the order-5 weights

cdef double _B4[7]
_B4[:] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0]

cdef double _C[7]
_C[:] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0]


cdef void _rhs(double t, const double* y, int mode, double zmap,
               const double[::1] knots, const double[:, ::1] coeffs,
               double lo_slope, double hi_slope, double mass, double energy,
               double* out) nogil:
    cdef double x, z, jac, s = 0.0, s1 = 0.0, s2 = 0.0
    cdef double v, dv, p, g, two_phi, cos2, sin2
    if mode == 0:
        x = t
        z = zmap / (x * x)
        jac = -2.0 * z / x
    else:
        z = t
        jac = 1.0
    _spline_s(knots, coeffs, lo_slope, hi_slope, log(z), &s, &s1, &s2)
    v = -exp(s)
    dv = v * s1 / z
    p = sqrt(2.0 * mass * (energy - v))
    g = (-mass * dv / (p * p) / 2.0) * jac
    two_phi = 2.0 * y[4]
    cos2 = cos(two_phi)
    sin2 = sin(two_phi)
    out[0] = g * (cos2 * y[2] + sin2 * y[3])
    out[1] = g * (cos2 * y[3] - sin2 * y[2])
    out[2] = g * (cos2 * y[0] - sin2 * y[1])
    out[3] = g * (cos2 * y[1] + sin2 * y[0])
    out[4] = p * jac


def propagate(y0, double t0, double t1, int mode, double zmap, knots, coeffs,
              double lo_slope, double hi_slope, double mass, double energy,
              double rtol, double atol, long max_steps):
    """Propagate the amplitude state from ``t0`` to ``t1``.

    Same contract as ``cpqr._kernels_py.propagate``: returns
    ``(y, current_defect, accepted_steps, status)``.
    """
    cdef double[::1] kn = np.ascontiguousarray(knots, dtype=np.float64)
    cdef double[:, ::1] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    y_arr = np.array(y0, dtype=np.float64, copy=True)
    if y_arr.shape != (5,):
        raise ValueError("state must have five components")
    cdef double[::1] y = y_arr

    cdef double t = t0
    cdef double span = t1 - t
    if span == 0.0:
        return y_arr, 0.0, 0, 0
    cdef double direction = 1.0 if span > 0 else -1.0
    cdef double h = span / 128.0

    cdef double k[7][5]
    cdef double ytmp[5]
    cdef double y5[5]
    cdef double y4[5]
    cdef double flux0, flux_scale, defect, flux, drift
    cdef double a, ha, acc5, acc4, scale, e, err, factor
    cdef long accepted = 0, attempts = 0
    cdef Py_ssize_t i, j, w

    _rhs(t, &y[0], mode, zmap, kn, cf, lo_slope, hi_slope, mass, energy, k[0])

    flux0 = (y[2] * y[2] + y[3] * y[3]) - (y[0] * y[0] + y[1] * y[1])
    flux_scale = fabs(flux0)
    if flux_scale < 1.0:
        flux_scale = 1.0
    defect = 0.0

    while (t1 - t) * direction > 0.0:
        if (t + h - t1) * direction > 0.0:
            h = t1 - t
        attempts += 1
        if attempts > max_steps:
            return y_arr, defect, accepted, 1
        if fabs(h) <= 1e-14 * max(fabs(t), fabs(t1)):
            return y_arr, defect, accepted, 2

        for i in range(1, 7):
            for w in range(5):
                ytmp[w] = y[w]
            for j in range(i):
                a = _A[i - 1][j]
                if a != 0.0:
                    ha = h * a
                    for w in range(5):
                        ytmp[w] += ha * k[j][w]
            _rhs(t + _C[i] * h, ytmp, mode, zmap, kn, cf, lo_slope, hi_slope,
                 mass, energy, k[i])

        err = 0.0
        for w in range(5):
            acc5 = _B5[0] * k[0][w]
            acc5 += _B5[1] * k[2][w]
            acc5 += _B5[2] * k[3][w]
            acc5 += _B5[3] * k[4][w]
            acc5 += _B5[4] * k[5][w]
            y5[w] = y[w] + h * acc5
            acc4 = _B4[0] * k[0][w]
            acc4 += _B4[2] * k[2][w]
            acc4 += _B4[3] * k[3][w]
            acc4 += _B4[4] * k[4][w]
            acc4 += _B4[5] * k[5][w]
            acc4 += _B4[6] * k[6][w]
            y4[w] = y[w] + h * acc4
            scale = atol + rtol * max(fabs(y[w]), fabs(y5[w]))
            e = (y5[w] - y4[w]) / scale
            err += e * e
        err = sqrt(err / 5.0)

        if err <= 1.0:
            t += h
            for w in range(5):
                y[w] = y5[w]
                k[0][w] = k[6][w]  # FSAL: stage 7 sits at (t+h, y5)
            accepted += 1
            flux = (y[2] * y[2] + y[3] * y[3]) - (y[0] * y[0] + y[1] * y[1])
            drift = fabs(flux - flux0) / flux_scale
            if drift > defect:
                defect = drift
        if err > 0.0:
            factor = 0.9 * pow(err, -0.2)
        else:
            factor = 5.0
        if factor > 5.0:
            factor = 5.0
        elif factor < 0.2:
            factor = 0.2
        h *= factor

    return y_arr, defect, accepted, 0
