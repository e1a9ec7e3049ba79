"""Threshold scattering parameters and the gravitational-bouncer lifetime.

Near threshold the reflection amplitude defines a complex, energy-dependent
scattering length a(k) = i ln(-r) / (2k).  Its k -> 0 limit a0 controls both
elastic scattering and absorption: an atom bouncing on the surface under
gravity decays at the rate set by Im a0, giving the lifetime

    tau = hbar / (2 m g |Im a0|).

The limit is taken numerically: a(k) is sampled on a descending geometric
ladder with the phase of -r unwrapped continuously, then extrapolated to
k = 0 by a linear fit over the lowest decades, where the O(k) correction is
the leading one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SamplingError
from .reflection import SolverControls, reflection_amplitude
from .units import DEFAULT_CONSTANTS, wavevector_to_energy

__all__ = [
    "ThresholdResult",
    "amplitude_ladder",
    "scattering_length",
    "lifetime",
    "bouncer_lifetime",
]


@dataclass(frozen=True)
class ThresholdResult:
    """Extrapolated threshold data with the ladder that produced it."""

    a0: complex
    slope: complex  # d a(k)/d k at threshold, from the same fit
    residual: float  # rms misfit of the linear model relative to |a0|
    k_values: tuple
    a_values: tuple

    def record(self) -> dict:
        return {
            "a0_re": self.a0.real,
            "a0_im": self.a0.imag,
            "slope_re": self.slope.real,
            "slope_im": self.slope.imag,
            "residual": self.residual,
            "k": list(self.k_values),
            "a_re": [a.real for a in self.a_values],
            "a_im": [a.imag for a in self.a_values],
        }


def amplitude_ladder(table, k_values, constants=DEFAULT_CONSTANTS, controls=SolverControls()):
    """a(k) on a descending ladder of wavevectors, phase-continuous in k.

    The principal-branch phase of -r is anchored at the largest k (where it
    is small) and unwrapped downward; a jump of more than pi/2 between
    neighbouring rungs means the ladder is too coarse to track the branch
    and raises :class:`SamplingError`.
    """
    k_values = list(k_values)
    if any(k2 >= k1 for k1, k2 in zip(k_values, k_values[1:])):
        raise DomainError("wavevector ladder must be strictly decreasing")
    amplitudes = []
    theta_prev = None
    for k in k_values:
        result = reflection_amplitude(
            table, wavevector_to_energy(k, constants), constants, controls
        )
        theta = cmath.phase(-result.r)
        if theta_prev is not None:
            theta -= 2.0 * math.pi * round((theta - theta_prev) / (2.0 * math.pi))
            if abs(theta - theta_prev) > math.pi / 2.0:
                raise SamplingError(
                    f"phase of -r jumped by {abs(theta - theta_prev):.2f} rad "
                    f"between k={k:g} and the previous rung; refine the ladder",
                    achieved=abs(theta - theta_prev),
                )
        theta_prev = theta
        amplitudes.append(complex(-theta, math.log(abs(result.r))) / (2.0 * k))
    return amplitudes


def scattering_length(
    table,
    k_max=1e-3,
    k_min=1e-6,
    points_per_decade=4,
    fit_decades=2.0,
    constants=DEFAULT_CONSTANTS,
    controls=SolverControls(),
):
    """Extrapolate a(k) to threshold by a linear fit over the smallest decades."""
    if not (0 < k_min < k_max):
        raise DomainError(f"need 0 < k_min < k_max, got [{k_min}, {k_max}]")
    decades = math.log10(k_max / k_min)
    n = int(round(decades * points_per_decade)) + 1
    k_values = np.geomspace(k_max, k_min, n)
    a_values = amplitude_ladder(table, k_values, constants, controls)

    fit_mask = k_values <= k_min * 10.0**fit_decades * (1.0 + 1e-9)
    if fit_mask.sum() < 3:
        raise DomainError("fewer than three ladder rungs inside the fit window")
    kf = k_values[fit_mask]
    af = np.array(a_values)[fit_mask]
    design = np.column_stack([np.ones_like(kf), kf])
    coeff, *_ = np.linalg.lstsq(design, af, rcond=None)
    a0, slope = complex(coeff[0]), complex(coeff[1])
    residual = float(np.sqrt(np.mean(np.abs(design @ coeff - af) ** 2)) / abs(a0))

    return ThresholdResult(
        a0=a0,
        slope=slope,
        residual=residual,
        k_values=tuple(float(k) for k in k_values),
        a_values=tuple(complex(a) for a in a_values),
    )


def lifetime(a0, constants=DEFAULT_CONSTANTS):
    """Gravitational-bouncer lifetime in seconds from the threshold length."""
    im = abs(a0.imag) if isinstance(a0, complex) else abs(float(a0))
    if im == 0.0:
        raise DomainError("threshold scattering length has no absorptive part")
    tau_au = 1.0 / (2.0 * constants.atom_mass_au * constants.gravity_au * im)
    return tau_au * constants.time_au_s


def bouncer_lifetime(table, constants=DEFAULT_CONSTANTS, controls=SolverControls(), **ladder_kwargs):
    """Convenience wrapper: threshold extrapolation plus lifetime in seconds."""
    threshold = scattering_length(table, constants=constants, controls=controls, **ladder_kwargs)
    return lifetime(threshold.a0, constants), threshold
