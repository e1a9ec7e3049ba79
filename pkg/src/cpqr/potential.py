"""Surface-interaction potentials: quadrature, asymptotics, and tables.

The potential of a ground-state atom at distance ``z`` above a planar mirror
is a double integral over imaginary frequency ``xi`` and transverse decay
constant ``kappa``:

    V(z) = 1/(2 pi c^2) * Int_0^inf dxi alpha(i xi)
           * Int_{xi/c}^inf dkappa e^{-2 kappa z} G(xi, kappa)

with the mode sum G built from the TE/TM reflection amplitudes of the mirror
(:mod:`cpqr.optics`).  This module evaluates that integral to a requested
relative accuracy, extracts the near- and far-distance power-law
coefficients, and packages a log-spaced table with a smooth interpolant that
downstream modules (wave propagation, reflection probabilities) consume.
"""

from __future__ import annotations

import dataclasses
import math
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_legendre

from . import __version__, backend
from .errors import AccuracyError, DomainError, TableBuildError
from .units import DEFAULT_CONSTANTS

__all__ = [
    "compute_potential",
    "static_strength",
    "far_exponent",
    "build_table",
    "PotentialTable",
]

# quadrature layout -- see NUMERICS in the README for the rationale
_HEAD_FRACTION = 1e-3  # head panel reaches this far below the lowest model scale
_SUPPORT_FOLDS = 20.0  # cover e^{-2 z xi / c} out to 40 e-folds
_PANELS_PER_DECADE = 2
_BASE_OUTER = 12  # Legendre nodes per frequency panel at refinement level 0
_BASE_INNER = 8  # Legendre nodes per momentum panel at refinement level 0
_INNER_LO = 1e-4  # head panel of the u = 2 z (kappa - xi/c) integral
_INNER_HI = 45.0  # e^{-u} tail beyond this is < 3e-20
_MAX_LEVELS = 5

_TABLE_VERSION = 1


@lru_cache(maxsize=32)
def _legendre(n: int):
    nodes, weights = roots_legendre(n)
    return nodes, weights


def _panel_nodes(edges, n_per_panel):
    """Gauss-Legendre nodes/weights on each [edges[i], edges[i+1]] interval."""
    x, w = _legendre(n_per_panel)
    a = edges[:-1, None]
    b = edges[1:, None]
    nodes = (0.5 * (a + b) + 0.5 * (b - a) * x[None, :]).ravel()
    weights = (0.5 * (b - a) * np.broadcast_to(w, (edges.size - 1, w.size))).ravel()
    return nodes, weights


@lru_cache(maxsize=32)
def _inner_grid(n_per_panel: int):
    """Momentum-integral nodes after kappa = xi/c + u/(2z): log panels in u.

    The exp(-u) weight is folded into the returned weights, so the kernels
    see a plain weighted sum.  Log spacing resolves the sqrt(u) behaviour of
    the mode functions near u = 0 at any distance, which a Gauss-Laguerre
    rule only tracks algebraically.
    """
    panels = math.ceil(math.log10(_INNER_HI / _INNER_LO) * _PANELS_PER_DECADE)
    edges = np.concatenate(([0.0], np.geomspace(_INNER_LO, _INNER_HI, panels + 1)))
    nodes, weights = _panel_nodes(edges, n_per_panel)
    return nodes, weights * np.exp(-nodes)


def _model_scales(mirror, polarizability):
    scales = tuple(polarizability.scales_au()) + tuple(mirror.dielectric.scales_au())
    if not scales:
        raise DomainError("models expose no frequency scale to build panels from")
    return scales


def _outer_grid(scales, z, c, n_per_panel):
    """Frequency nodes/weights: a head panel [0, lo] plus log-spaced panels."""
    hi = _SUPPORT_FOLDS * c / z
    lo = min(_HEAD_FRACTION * min(scales), 0.1 * hi)
    panels = max(1, math.ceil(math.log10(hi / lo) * _PANELS_PER_DECADE))
    edges = np.concatenate(([0.0], np.geomspace(lo, hi, panels + 1)))
    return _panel_nodes(edges, n_per_panel)


def _evaluate_once(mirror, polarizability, z, constants, n_outer, n_inner):
    c = constants.light_speed_au
    scales = _model_scales(mirror, polarizability)
    xi, wxi = _outer_grid(scales, z, c, n_outer)
    alpha = np.asarray(polarizability.alpha(xi), dtype=float)
    perfect = bool(getattr(mirror.dielectric, "is_perfect", False))
    if perfect:
        eps = np.ones_like(xi)
    else:
        eps = np.asarray(mirror.dielectric.epsilon(xi), dtype=float)
    u, wu = _inner_grid(n_inner)
    thickness = 0.0 if mirror.is_bulk else float(mirror.thickness_au)
    return backend.cp_accumulate(xi, wxi, alpha, eps, u, wu, float(z), c, thickness, perfect)


def compute_potential(
    mirror,
    polarizability,
    z,
    constants=DEFAULT_CONSTANTS,
    rtol=1e-8,
    with_error=False,
):
    """Evaluate V(z) by node-doubling until two refinements agree to ``rtol``."""
    if not z > 0:
        raise DomainError(f"distance must be > 0, got {z}")
    previous = None
    err = math.inf
    for level in range(_MAX_LEVELS):
        value = _evaluate_once(
            mirror, polarizability, z, constants, _BASE_OUTER << level, _BASE_INNER << level
        )
        if previous is not None:
            err = abs(value - previous) / max(abs(value), 1e-300)
            if err <= rtol:
                return (value, err) if with_error else value
        previous = value
    raise AccuracyError(
        f"potential quadrature did not converge at z={z:g}: achieved {err:.3e}, "
        f"target {rtol:g}",
        achieved=err,
    )


# ---------------------------------------------------------------------------
# asymptotic coefficients
# ---------------------------------------------------------------------------


def static_strength(mirror, polarizability, constants=DEFAULT_CONSTANTS, rtol=1e-10):
    """Near-wall van der Waals coefficient C3 (V -> -C3 / z^3 as z -> 0).

    In that limit retardation drops out and the double integral collapses to
    a single frequency integral of alpha(i xi) times the electrostatic image
    strength (eps - 1)/(eps + 1); a slab of any thickness looks bulk from
    close up, so the result is thickness independent.
    """
    dielectric = mirror.dielectric
    perfect = bool(getattr(dielectric, "is_perfect", False))

    def integrand(xi):
        a = np.asarray(polarizability.alpha(xi), dtype=float)
        if perfect:
            ratio = 1.0
        else:
            eps = np.asarray(dielectric.epsilon(xi), dtype=float)
            ratio = (eps - 1.0) / (eps + 1.0)
        return a * ratio

    scales = _model_scales(mirror, polarizability)
    lo = _HEAD_FRACTION * min(scales)
    hi = 1e4 * max(scales)
    x, w = _legendre(64)

    def panel_sum(edges):
        a = edges[:-1, None]
        b = edges[1:, None]
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
        weights = 0.5 * (b - a) * np.broadcast_to(w, nodes.shape)
        return float(np.sum(weights * integrand(nodes.ravel()).reshape(nodes.shape)))

    # extend the upper edge until the analytic ~xi^-2 tail bound is negligible
    total = None
    for _ in range(12):
        tail = float(integrand(np.array([hi]))[0]) * hi
        edges = np.concatenate(([0.0], np.geomspace(lo, hi, 1 + 2 * max(4, int(math.log10(hi / lo))))))
        coarse = panel_sum(edges)
        fine_edges = np.concatenate(([0.0], np.geomspace(lo, hi, 1 + 4 * max(4, int(math.log10(hi / lo))))))
        fine = panel_sum(fine_edges)
        total = fine
        err = abs(fine - coarse) / max(abs(fine), 1e-300) + abs(tail) / max(abs(fine), 1e-300)
        if err <= rtol:
            return total / (4.0 * math.pi)
        hi *= 10.0
    raise AccuracyError(
        f"static-strength integral did not reach rtol={rtol:g} (achieved {err:.3e})",
        achieved=err,
    )


def far_exponent(mirror, z_max=1e7):
    """Power of the far-distance decay V ~ -C/z^n over the tabulated range.

    Bulk mirrors retard to n = 4.  A thin slab steepens to n = 5 once the
    distance dwarfs the thickness; a slab thicker than a tenth of the table
    edge never reaches that regime inside the table and is treated as bulk.
    """
    if mirror.is_bulk:
        return 4
    if mirror.thickness_au >= 0.1 * z_max:
        return 4
    return 5


def _fit_far_coefficient(z, v, n_far):
    mask = z >= z[-1] / 10.0 * (1.0 - 1e-12)
    lnc = np.log(-v[mask]) + n_far * np.log(z[mask])
    return float(np.exp(np.mean(lnc)))


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


class PotentialTable:
    """A log-spaced sample of V(z) with a smooth log-log interpolant.

    Inside the grid a cubic spline of ln(-V) against ln z supplies values and
    two derivatives; outside, the curve continues as the matched power law
    (-C3/z^3 below, -C_far/z^n_far above).
    """

    def __init__(self, z, v, c3, c_far, n_far, meta=None):
        z = np.asarray(z, dtype=float)
        v = np.asarray(v, dtype=float)
        if z.ndim != 1 or z.size < 4 or v.shape != z.shape:
            raise TableBuildError("table needs matching 1-D grids with >= 4 points")
        if not np.all(np.diff(z) > 0):
            raise TableBuildError("distance grid must be strictly increasing")
        if not np.all(v < 0):
            raise TableBuildError("potential values must all be negative")
        self.z_grid = z
        self.v_grid = v
        self.c3 = float(c3)
        self.c_far = float(c_far)
        self.n_far = int(n_far)
        self.meta = dict(meta or {})
        self._lnz = np.log(z)
        self._s = np.log(-v)
        spline = CubicSpline(self._lnz, self._s)
        self._coeffs = np.ascontiguousarray(spline.c)
        self.lo_slope = -3.0
        self.hi_slope = -float(n_far)

    # -- kernel plumbing ----------------------------------------------------

    def spline_data(self):
        """Arrays consumed by the backend kernels: knots, coefficients, slopes."""
        return self._lnz, self._coeffs, self.lo_slope, self.hi_slope

    # -- evaluation ---------------------------------------------------------

    def _s_eval(self, lnz):
        x = np.atleast_1d(np.asarray(lnz, dtype=float))
        kn = self._lnz
        j = np.clip(np.searchsorted(kn, x, side="right") - 1, 0, kn.size - 2)
        d = x - kn[j]
        c3_, c2_, c1_, c0_ = (self._coeffs[i, j] for i in range(4))
        s = ((c3_ * d + c2_) * d + c1_) * d + c0_
        s1 = (3.0 * c3_ * d + 2.0 * c2_) * d + c1_
        s2 = 6.0 * c3_ * d + 2.0 * c2_
        below = x < kn[0]
        if np.any(below):
            s[below] = self._s[0] + self.lo_slope * (x[below] - kn[0])
            s1[below] = self.lo_slope
            s2[below] = 0.0
        above = x > kn[-1]
        if np.any(above):
            s[above] = self._s[-1] + self.hi_slope * (x[above] - kn[-1])
            s1[above] = self.hi_slope
            s2[above] = 0.0
        return s, s1, s2

    def v(self, z):
        z_arr = np.asarray(z, dtype=float)
        s, _, _ = self._s_eval(np.log(z_arr))
        out = -np.exp(s)
        return float(out[0]) if z_arr.ndim == 0 else out.reshape(z_arr.shape)

    def dv(self, z):
        z_arr = np.asarray(z, dtype=float)
        s, s1, _ = self._s_eval(np.log(z_arr))
        out = -np.exp(s) * s1 / np.atleast_1d(z_arr)
        return float(out[0]) if z_arr.ndim == 0 else out.reshape(z_arr.shape)

    def d2v(self, z):
        z_arr = np.asarray(z, dtype=float)
        s, s1, s2 = self._s_eval(np.log(z_arr))
        out = -np.exp(s) * (s2 + s1 * s1 - s1) / np.atleast_1d(z_arr) ** 2
        return float(out[0]) if z_arr.ndim == 0 else out.reshape(z_arr.shape)

    # -- serialization ------------------------------------------------------

    def to_payload(self):
        return {
            "z": [float(x) for x in self.z_grid],
            "v": [float(x) for x in self.v_grid],
            "c3": self.c3,
            "c_far": self.c_far,
            "n_far": self.n_far,
            "meta": self.meta,
        }

    @classmethod
    def from_payload(cls, payload):
        return cls(
            payload["z"],
            payload["v"],
            payload["c3"],
            payload["c_far"],
            payload["n_far"],
            payload.get("meta"),
        )


def _constants_key(constants):
    return dataclasses.asdict(constants)


def build_table(
    mirror,
    polarizability,
    constants=DEFAULT_CONSTANTS,
    z_min=1.0,
    z_max=1e7,
    points_per_decade=20,
    rtol=1e-8,
    cache=None,
    edge_tol=0.01,
):
    """Sample V(z) on a log grid, attach asymptotics, and validate the edges.

    The finished table must behave as -C3/z^3 at ``z_min`` and as
    -C_far/z^n_far at ``z_max`` to within ``edge_tol``; violations mean the
    grid does not reach the asymptotic regimes and are raised rather than
    papered over.
    """
    if not (z_min > 0 and z_max > z_min):
        raise DomainError(f"bad table range [{z_min}, {z_max}]")
    key = {
        "kind": "potential-table",
        "version": _TABLE_VERSION,
        "mirror": mirror.key(),
        "polarizability": polarizability.key(),
        "constants": _constants_key(constants),
        "grid": [float(z_min), float(z_max), int(points_per_decade)],
        "rtol": float(rtol),
    }
    if cache is not None:
        payload = cache.get(key)
        if payload is not None:
            return PotentialTable.from_payload(payload)

    decades = math.log10(z_max / z_min)
    npts = int(round(decades * points_per_decade)) + 1
    z = np.geomspace(z_min, z_max, npts)
    v = np.array([compute_potential(mirror, polarizability, zi, constants, rtol) for zi in z])

    c3 = static_strength(mirror, polarizability, constants)
    n_far = far_exponent(mirror, z_max)
    c_far = _fit_far_coefficient(z, v, n_far)

    if not np.all(v < 0):
        raise TableBuildError("potential table contains non-negative values")
    if not np.all(np.diff(v) > 0):
        raise TableBuildError("potential table is not monotonically weakening")
    near = abs(v[0] * z[0] ** 3 + c3) / c3
    if near > edge_tol:
        raise TableBuildError(
            f"table edge z={z[0]:g} deviates {near:.2%} from the -C3/z^3 law; "
            "extend the grid downward",
            achieved=near,
        )
    far = abs(v[-1] * z[-1] ** n_far + c_far) / c_far
    if far > edge_tol:
        raise TableBuildError(
            f"table edge z={z[-1]:g} deviates {far:.2%} from the -C/z^{n_far} law; "
            "extend the grid upward",
            achieved=far,
        )

    meta = {
        "backend": backend.BACKEND_NAME,
        "rtol": float(rtol),
        "version": __version__,
        "key": key,
    }
    table = PotentialTable(z, v, c3, c_far, n_far, meta)
    if cache is not None:
        cache.put(key, table.to_payload())
    return table
