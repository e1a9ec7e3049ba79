"""Atomic units and the handful of SI constants the problem needs.

All internal physics is done in atomic units (hbar = e = m_e = 1); the speed
of light is then 1/alpha_fs ~ 137.036.  The falling antihydrogen atom enters
only through its mass (set equal to the hydrogen atom mass) and the local
gravitational acceleration, both overridable through a key=value config file.
"""

from __future__ import annotations

import dataclasses

from .errors import ConfigError, DomainError

# CODATA-quality values, truncated to the precision the rest of the pipeline
# can actually use.
_BOHR_RADIUS_M = 5.2917721e-11  # 52.917 pm
_HARTREE_J = 4.3597447e-18  # 4.3597 aJ
_HBAR_SI = 1.054571817e-34  # J s
_ELECTRON_MASS_KG = 9.1093837015e-31
_LIGHT_SPEED_AU = 137.035999  # 1/alpha_fs
_ATOM_MASS_AU = 1837.15  # hydrogen atom mass in electron masses
_GRAVITY_SI = 9.806  # m/s^2

_LENGTH_UNITS_M = {
    "pm": 1e-12,
    "nm": 1e-9,
    "um": 1e-6,
    "cm": 1e-2,
    "m": 1.0,
}


@dataclasses.dataclass(frozen=True)
class Constants:
    """Physical constants bundle threaded through the public API.

    Attributes
    ----------
    bohr_radius_m : SI length of one atomic unit.
    hartree_j : SI energy of one atomic unit.
    hbar_si : reduced Planck constant, J s.
    electron_mass_kg : SI electron mass (converts a.u. masses to kg).
    light_speed_au : speed of light in atomic units (1/alpha_fs).
    atom_mass_au : mass of the falling atom in electron masses.
    gravity_si : gravitational acceleration, m/s^2.
    """

    bohr_radius_m: float = _BOHR_RADIUS_M
    hartree_j: float = _HARTREE_J
    hbar_si: float = _HBAR_SI
    electron_mass_kg: float = _ELECTRON_MASS_KG
    light_speed_au: float = _LIGHT_SPEED_AU
    atom_mass_au: float = _ATOM_MASS_AU
    gravity_si: float = _GRAVITY_SI

    # -- derived scales -------------------------------------------------

    @property
    def time_au_s(self) -> float:
        """One atomic unit of time, s."""
        return self.hbar_si / self.hartree_j

    @property
    def frequency_au_rad_s(self) -> float:
        """One atomic unit of angular frequency, rad/s."""
        return self.hartree_j / self.hbar_si

    @property
    def gravity_au(self) -> float:
        """g expressed in atomic units of acceleration."""
        return self.gravity_si * self.time_au_s**2 / self.bohr_radius_m

    @property
    def atom_mass_kg(self) -> float:
        return self.atom_mass_au * self.electron_mass_kg

    def replace(self, **kwargs) -> "Constants":
        return dataclasses.replace(self, **kwargs)

    @classmethod
    def from_config(cls, path: str) -> "Constants":
        """Read overrides from a ``key = value`` text file.

        Unknown keys are rejected rather than ignored so that typos cannot
        silently fall back to defaults.  Lines starting with ``#`` and blank
        lines are skipped.
        """
        fields = {f.name for f in dataclasses.fields(cls)}
        overrides: dict[str, float] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}"
                    )
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in fields:
                    raise ConfigError(f"{path}:{lineno}: unknown constant {key!r}")
                try:
                    overrides[key] = float(value)
                except ValueError as exc:
                    raise ConfigError(
                        f"{path}:{lineno}: cannot parse value for {key!r}: {value!r}"
                    ) from exc
        return cls(**overrides)


DEFAULT_CONSTANTS = Constants()


def length_to_au(value: float, unit: str, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Convert a length in the given unit to Bohr radii.

    Parameters
    ----------
    value : length, may be any real number (conversions are linear).
    unit : one of 'pm', 'nm', 'um', 'cm', 'm'.
    """
    try:
        scale = _LENGTH_UNITS_M[unit]
    except KeyError:
        known = ", ".join(sorted(_LENGTH_UNITS_M))
        raise ConfigError(f"unknown length unit {unit!r} (known: {known})") from None
    return value * scale / constants.bohr_radius_m


def length_from_au(value_au: float, unit: str, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Inverse of :func:`length_to_au`."""
    try:
        scale = _LENGTH_UNITS_M[unit]
    except KeyError:
        known = ", ".join(sorted(_LENGTH_UNITS_M))
        raise ConfigError(f"unknown length unit {unit!r} (known: {known})") from None
    return value_au * constants.bohr_radius_m / scale


def height_to_energy(height_m: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Kinetic energy E = m g h gained in a free fall from height h, in Hartree.

    Parameters
    ----------
    height_m : free-fall height in metres; must be non-negative.
    """
    if height_m < 0:
        raise DomainError(f"free-fall height must be >= 0, got {height_m}")
    energy_j = constants.atom_mass_kg * constants.gravity_si * height_m
    return energy_j / constants.hartree_j


def height_to_gh(height_m: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Specific energy g*h in (m/s)^2 for reporting alongside the a.u. energy."""
    if height_m < 0:
        raise DomainError(f"free-fall height must be >= 0, got {height_m}")
    return constants.gravity_si * height_m


def energy_to_wavevector(energy_au: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Free-space wavevector k = sqrt(2 m E) in 1/a0 for a given energy in Hartree."""
    if energy_au < 0:
        raise DomainError(f"energy must be >= 0, got {energy_au}")
    return (2.0 * constants.atom_mass_au * energy_au) ** 0.5


def wavevector_to_energy(k_au: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Energy E = k^2 / (2 m) in Hartree for a wavevector in 1/a0."""
    if k_au < 0:
        raise DomainError(f"wavevector must be >= 0, got {k_au}")
    return k_au**2 / (2.0 * constants.atom_mass_au)
