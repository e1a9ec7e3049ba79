"""Where the semiclassical (WKB) approximation fails: the badlands profile.

WKB is accurate where the dimensionless function

    Q(z) = p''/(2 p^3) - (3/4) (p'/p^2)^2,      p(z) = sqrt(2 m (E - V(z))),

is small.  For a surface potential Q vanishes both deep in the well (the
potential steepens faster than the de Broglie wavelength shrinks) and far
outside (free motion), leaving a single hump -- the badlands -- that is
responsible for quantum reflection.  Deep in the van der Waals region the
profile has the closed form Q = 3 z / (32 m C3), handy as a cross-check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import CoverageError, DomainError
from .units import DEFAULT_CONSTANTS

__all__ = ["quality", "profile", "peak", "vdw_quality"]


def quality(table, z, energy, constants=DEFAULT_CONSTANTS):
    """Badlands function Q at distance(s) ``z`` for total energy ``energy``."""
    if not energy > 0:
        raise DomainError(f"energy must be > 0, got {energy}")
    mass = constants.atom_mass_au
    z_arr = np.asarray(z, dtype=float)
    v = np.atleast_1d(table.v(z_arr))
    dv = np.atleast_1d(table.dv(z_arr))
    d2v = np.atleast_1d(table.d2v(z_arr))
    p_sq = 2.0 * mass * (energy - v)
    p = np.sqrt(p_sq)
    dp = -mass * dv / p
    d2p = -(mass * d2v + dp * dp) / p
    q = d2p / (2.0 * p_sq * p) - 0.75 * (dp / p_sq) ** 2
    return float(q[0]) if z_arr.ndim == 0 else q.reshape(z_arr.shape)


def vdw_quality(z, c3, constants=DEFAULT_CONSTANTS):
    """Closed-form deep-region limit Q = 3 z / (32 m C3)."""
    return 3.0 * np.asarray(z, dtype=float) / (32.0 * constants.atom_mass_au * c3)


def profile(table, energy, z_lo=None, z_hi=None, n=400, constants=DEFAULT_CONSTANTS):
    """Sample (z, Q) on a log grid spanning the hump."""
    z_lo = table.z_grid[0] if z_lo is None else z_lo
    z_hi = table.z_grid[-1] if z_hi is None else z_hi
    if not (0 < z_lo < z_hi):
        raise DomainError(f"bad profile range [{z_lo}, {z_hi}]")
    z = np.geomspace(z_lo, z_hi, n)
    return z, quality(table, z, energy, constants)


def peak(table, energy, constants=DEFAULT_CONSTANTS, n_scan=200):
    """Location and height of the badlands maximum.

    A log-grid scan brackets the hump, then a bounded scalar minimization
    of -Q polishes it.
    """
    z, q = profile(table, energy, n=n_scan, constants=constants)
    i = int(np.argmax(q))
    if i == 0 or i == z.size - 1:
        raise CoverageError(
            "badlands maximum sits at the edge of the potential table; "
            "the energy is outside the range this table can describe"
        )
    result = minimize_scalar(
        lambda lnz: -quality(table, math.exp(lnz), energy, constants),
        bounds=(math.log(z[i - 1]), math.log(z[i + 1])),
        method="bounded",
        options={"xatol": 1e-10},
    )
    z_peak = math.exp(result.x)
    return z_peak, quality(table, z_peak, energy, constants)
