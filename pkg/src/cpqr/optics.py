"""Mirror optics at imaginary frequency.

Dielectric functions are only ever needed on the imaginary frequency axis,
where every causal response function is real, positive and monotonically
decreasing; the models below implement exactly that restriction.  Reflection
amplitudes follow the standard Fresnel forms for a vacuum/medium interface,

    rho_TE = (kappa - K) / (kappa + K)
    rho_TM = (eps*kappa - K) / (eps*kappa + K)

with kappa^2 = k^2 + xi^2/c^2 the vacuum and K^2 = k^2 + eps*xi^2/c^2 the
medium transverse wavevectors, and a finite slab of thickness d in vacuum
resums the internal round trips into

    rho_slab = (1 - e^(-2 K d)) rho / (1 - e^(-2 K d) rho^2).

All frequencies and lengths in the numeric API are atomic units; constructors
accept laboratory rad/s values and convert once.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import ConfigError, DomainError, ExtrapolationError, ValidationError
from .units import DEFAULT_CONSTANTS, Constants

__all__ = [
    "PerfectMirror",
    "DrudeLorentz",
    "Sellmeier",
    "TabulatedDielectric",
    "EffectiveOscillator",
    "TabulatedPolarizability",
    "Mirror",
    "EmMode",
    "silicon",
    "silica",
    "hydrogen",
    "fresnel_bulk",
    "slab_reflection",
]


# ---------------------------------------------------------------------------
# dielectric models
# ---------------------------------------------------------------------------


class PerfectMirror:
    """Ideal reflector: rho_TE = -1, rho_TM = +1 at all (xi, k)."""

    is_perfect = True

    def epsilon(self, xi_au):
        """Sentinel infinity; reflection code never divides by it."""
        return np.where(np.asarray(xi_au) >= 0, np.inf, np.nan) if np.ndim(xi_au) else math.inf

    def scales_au(self) -> tuple[float, ...]:
        return ()

    def key(self) -> dict:
        return {"model": "perfect"}


@dataclasses.dataclass(frozen=True)
class DrudeLorentz:
    """Single-oscillator model eps(i xi) = eps_inf + (eps0 - eps_inf) w0^2/(xi^2 + w0^2)."""

    eps_static: float
    eps_inf: float
    omega0_au: float
    is_perfect = False

    @classmethod
    def from_rad_s(cls, eps_static, eps_inf, omega0_rad_s,
                   constants: Constants = DEFAULT_CONSTANTS):
        return cls(eps_static, eps_inf, omega0_rad_s / constants.frequency_au_rad_s)

    def epsilon(self, xi_au):
        xi = np.asarray(xi_au, dtype=float)
        out = self.eps_inf + (self.eps_static - self.eps_inf) / (1.0 + (xi / self.omega0_au) ** 2)
        return float(out) if np.ndim(xi_au) == 0 else out

    def scales_au(self) -> tuple[float, ...]:
        return (self.omega0_au,)

    def key(self) -> dict:
        return {
            "model": "drude_lorentz",
            "eps_static": self.eps_static,
            "eps_inf": self.eps_inf,
            "omega0_au": self.omega0_au,
        }


@dataclasses.dataclass(frozen=True)
class Sellmeier:
    """Multi-resonance model eps(i xi) = 1 + sum_i B_i / (1 + (xi/w_i)^2)."""

    strengths: tuple[float, ...]
    omegas_au: tuple[float, ...]
    is_perfect = False

    def __post_init__(self):
        if len(self.strengths) != len(self.omegas_au):
            raise ConfigError("Sellmeier strengths and resonance lists differ in length")

    @classmethod
    def from_rad_s(cls, strengths, omegas_rad_s, constants: Constants = DEFAULT_CONSTANTS):
        omegas_au = tuple(w / constants.frequency_au_rad_s for w in omegas_rad_s)
        return cls(tuple(strengths), omegas_au)

    def epsilon(self, xi_au):
        xi = np.asarray(xi_au, dtype=float)
        out = np.ones_like(xi)
        for b, w in zip(self.strengths, self.omegas_au):
            out = out + b / (1.0 + (xi / w) ** 2)
        return float(out) if np.ndim(xi_au) == 0 else out

    def scales_au(self) -> tuple[float, ...]:
        return self.omegas_au

    def key(self) -> dict:
        return {
            "model": "sellmeier",
            "strengths": list(self.strengths),
            "omegas_au": list(self.omegas_au),
        }


class TabulatedDielectric:
    """eps(i xi) given on a grid, interpolated linearly in log xi.

    The grid must be strictly ascending with positive frequencies and values
    >= 1 everywhere; queries outside the tabulated range raise rather than
    extrapolate.
    """

    is_perfect = False

    def __init__(self, xi_au: np.ndarray, values: np.ndarray, label: str = "tabulated"):
        xi = np.asarray(xi_au, dtype=float)
        val = np.asarray(values, dtype=float)
        if xi.ndim != 1 or xi.shape != val.shape or xi.size < 2:
            raise ValidationError("tabulated dielectric needs two equal-length columns (n >= 2)")
        if not np.all(xi > 0) or not np.all(np.diff(xi) > 0):
            raise ValidationError("tabulated dielectric grid must be positive and ascending")
        if not np.all(val >= 1.0):
            raise ValidationError("tabulated dielectric must satisfy eps(i xi) >= 1")
        self._log_xi = np.log(xi)
        self._values = val
        self.label = label

    @classmethod
    def from_file(cls, path: str, constants: Constants = DEFAULT_CONSTANTS):
        """Load a two-column text file: xi in rad/s, eps(i xi)."""
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] != 2:
            raise ValidationError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls(data[:, 0] / constants.frequency_au_rad_s, data[:, 1], label=path)

    def epsilon(self, xi_au):
        xi = np.asarray(xi_au, dtype=float)
        lo, hi = self._log_xi[0], self._log_xi[-1]
        with np.errstate(divide="ignore"):
            lx = np.log(xi)
        if np.any(lx < lo) or np.any(lx > hi):
            raise ExtrapolationError(
                f"dielectric table {self.label!r} queried outside its grid "
                f"[{math.exp(lo):.3e}, {math.exp(hi):.3e}] a.u."
            )
        out = np.interp(lx, self._log_xi, self._values)
        return float(out) if np.ndim(xi_au) == 0 else out

    def scales_au(self) -> tuple[float, ...]:
        return (math.exp(self._log_xi[0]), math.exp(self._log_xi[-1]))

    def key(self) -> dict:
        return {
            "model": "tabulated",
            "log_xi": self._log_xi.tolist(),
            "values": self._values.tolist(),
        }


# ---------------------------------------------------------------------------
# atomic polarizability
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EffectiveOscillator:
    """Single-pole dynamic polarizability alpha(i xi) = alpha0 / (1 + (xi/w_a)^2)."""

    alpha0: float
    omega_a_au: float

    def alpha(self, xi_au):
        xi = np.asarray(xi_au, dtype=float)
        out = self.alpha0 / (1.0 + (xi / self.omega_a_au) ** 2)
        return float(out) if np.ndim(xi_au) == 0 else out

    def scales_au(self) -> tuple[float, ...]:
        return (self.omega_a_au,)

    def key(self) -> dict:
        return {"model": "oscillator", "alpha0": self.alpha0, "omega_a_au": self.omega_a_au}


class TabulatedPolarizability:
    """alpha(i xi) on a grid, linear in log xi, no extrapolation."""

    def __init__(self, xi_au: np.ndarray, values: np.ndarray, label: str = "tabulated"):
        xi = np.asarray(xi_au, dtype=float)
        val = np.asarray(values, dtype=float)
        if xi.ndim != 1 or xi.shape != val.shape or xi.size < 2:
            raise ValidationError("tabulated polarizability needs two equal-length columns")
        if not np.all(xi > 0) or not np.all(np.diff(xi) > 0):
            raise ValidationError("tabulated polarizability grid must be positive and ascending")
        if not np.all(val > 0):
            raise ValidationError("polarizability must be positive on the imaginary axis")
        self._log_xi = np.log(xi)
        self._values = val
        self.label = label

    @classmethod
    def from_file(cls, path: str, constants: Constants = DEFAULT_CONSTANTS):
        """Load a two-column text file: xi in rad/s, alpha in a0^3."""
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] != 2:
            raise ValidationError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls(data[:, 0] / constants.frequency_au_rad_s, data[:, 1], label=path)

    def alpha(self, xi_au):
        xi = np.asarray(xi_au, dtype=float)
        lo, hi = self._log_xi[0], self._log_xi[-1]
        with np.errstate(divide="ignore"):
            lx = np.log(xi)
        if np.any(lx < lo) or np.any(lx > hi):
            raise ExtrapolationError(
                f"polarizability table {self.label!r} queried outside its grid "
                f"[{math.exp(lo):.3e}, {math.exp(hi):.3e}] a.u."
            )
        out = np.interp(lx, self._log_xi, self._values)
        return float(out) if np.ndim(xi_au) == 0 else out

    def scales_au(self) -> tuple[float, ...]:
        return (math.exp(self._log_xi[0]), math.exp(self._log_xi[-1]))

    def key(self) -> dict:
        return {
            "model": "tabulated",
            "log_xi": self._log_xi.tolist(),
            "values": self._values.tolist(),
        }


# ---------------------------------------------------------------------------
# built-in materials
# ---------------------------------------------------------------------------

# intrinsic silicon: static permittivity, high-frequency limit, resonance
_SILICON_EPS0 = 11.87
_SILICON_EPSINF = 1.035
_SILICON_OMEGA0_RAD_S = 6.6e15

# amorphous silica: oscillator strengths and resonances
_SILICA_STRENGTHS = (0.696749, 0.408218, 0.890815)
_SILICA_OMEGAS_RAD_S = (27.2732e15, 16.2858e15, 0.190257e15)

# atom response calibrated so that the perfect-mirror asymptotes come out at
# C3 = alpha0*w_a/8 = 0.25 and C4 = 3*c*alpha0/(8*pi) = 73.6 atomic units
_ALPHA0 = 4.50
_OMEGA_A_AU = 4.0 / 9.0


def silicon(constants: Constants = DEFAULT_CONSTANTS) -> DrudeLorentz:
    """Bulk silicon single-oscillator dielectric model."""
    return DrudeLorentz.from_rad_s(
        _SILICON_EPS0, _SILICON_EPSINF, _SILICON_OMEGA0_RAD_S, constants
    )


def silica(constants: Constants = DEFAULT_CONSTANTS) -> Sellmeier:
    """Amorphous silica three-resonance dielectric model."""
    return Sellmeier.from_rad_s(_SILICA_STRENGTHS, _SILICA_OMEGAS_RAD_S, constants)


def hydrogen() -> EffectiveOscillator:
    """Ground-state (anti)hydrogen effective-oscillator polarizability."""
    return EffectiveOscillator(_ALPHA0, _OMEGA_A_AU)


# ---------------------------------------------------------------------------
# mirror geometry
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Mirror:
    """A dielectric model plus geometry: bulk (thickness None) or slab."""

    dielectric: object
    thickness_au: float | None = None

    def __post_init__(self):
        if self.thickness_au is not None and not self.thickness_au > 0:
            raise DomainError(f"slab thickness must be > 0, got {self.thickness_au}")

    @property
    def is_bulk(self) -> bool:
        return self.thickness_au is None

    def key(self) -> dict:
        return {"dielectric": self.dielectric.key(), "thickness_au": self.thickness_au}


# ---------------------------------------------------------------------------
# reflection amplitudes
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EmMode:
    """One evanescent mode at imaginary frequency.

    Attributes
    ----------
    xi : imaginary frequency, a.u.
    k : transverse wavevector, 1/a0.
    kappa : vacuum decay constant sqrt(k^2 + xi^2/c^2).
    kcap : in-medium decay constant sqrt(k^2 + eps xi^2/c^2); inf for a
        perfect mirror.
    polarization : 'te' or 'tm'.
    """

    xi: float
    k: float
    kappa: float
    kcap: float
    polarization: str

    @classmethod
    def build(cls, xi: float, k: float, eps: float, polarization: str,
              constants: Constants = DEFAULT_CONSTANTS):
        if xi < 0 or k < 0:
            raise DomainError("EmMode requires xi >= 0 and k >= 0")
        if polarization not in ("te", "tm"):
            raise ConfigError(f"unknown polarization {polarization!r} (use 'te' or 'tm')")
        c = constants.light_speed_au
        kappa = math.hypot(k, xi / c)
        kcap = math.inf if math.isinf(eps) else math.sqrt(k**2 + eps * (xi / c) ** 2)
        return cls(xi, k, kappa, kcap, polarization)


def fresnel_bulk(mode: EmMode, eps: float) -> float:
    """Vacuum/bulk reflection amplitude for the given mode.

    For eps = inf the perfect-mirror limits (-1 for TE, +1 for TM) are
    returned exactly.
    """
    if mode.polarization == "te":
        if math.isinf(eps):
            return -1.0
        return (mode.kappa - mode.kcap) / (mode.kappa + mode.kcap)
    if mode.polarization == "tm":
        if math.isinf(eps):
            return 1.0
        return (eps * mode.kappa - mode.kcap) / (eps * mode.kappa + mode.kcap)
    raise ConfigError(f"unknown polarization {mode.polarization!r}")


def slab_reflection(rho_bulk: float, kcap: float, thickness_au: float) -> float:
    """Finite-thickness reflection amplitude from the bulk one.

    Uses the numerically stable form

        rho_slab = em1 * rho / ((1 - rho^2) + em1 * rho^2),   em1 = 1 - e^(-2 K d),

    which is exact for |rho| = 1 and immune to cancellation for K d << 1.
    """
    if not thickness_au > 0:
        raise DomainError(f"slab thickness must be > 0, got {thickness_au}")
    if kcap < 0:
        raise DomainError(f"decay constant must be >= 0, got {kcap}")
    em1 = 1.0 if math.isinf(kcap) else -math.expm1(-2.0 * kcap * thickness_au)
    return em1 * rho_bulk / ((1.0 - rho_bulk**2) + em1 * rho_bulk**2)
