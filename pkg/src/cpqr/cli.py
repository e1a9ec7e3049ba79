"""Command-line front end: tables, reflection runs, badlands profiles, figure data.

Every command resolves its full configuration first (material, geometry,
energy, numeric controls), computes entirely in memory, and only then writes a
single payload -- CSV or JSON records -- stamped with the resolved
configuration and the package version.  No timestamps are emitted, so
re-running a command with an identical configuration and cache state
byte-reproduces the output.

Exit codes: 0 success, 2 configuration errors, 3 domain/coverage errors,
4 accuracy failures, 5 cache corruption, 1 any other package error.  Failures
print one machine-readable JSON record to stderr and write no output file.

Lengths are given as a number plus unit (``10cm``, ``3nm``); a bare number
means metres for ``--height`` and Bohr radii for ``--z``/``--thickness``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .backend import BACKEND_NAME
from .badlands import peak, profile
from .cache import PotentialCache, canonical_key
from .errors import ConfigError, CpqrError
from .optics import Mirror, PerfectMirror, hydrogen, silica, silicon
from .potential import build_table, compute_potential
from .reflection import SolverControls, reflection_amplitude, reflection_curve
from .threshold import amplitude_ladder, lifetime, scattering_length
from .units import (
    DEFAULT_CONSTANTS,
    height_to_energy,
    length_to_au,
    wavevector_to_energy,
)

__all__ = ["main", "build_parser"]

_MATERIALS = ("perfect", "silicon", "silica")
_TABLE4_THICKNESS_NM = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)
_FIG_SLAB_NM = (50.0, 20.0, 10.0, 5.0, 2.0, 1.0)
_ALL_FIGURES = (1, 2, 3, 4, 5, 6, 7)
# Reference strength for ratio plots: the retarded perfect-mirror potential
# -C4*/z^4 shared by every potential figure.
_C4_STAR = 73.6

_QUANTITY_RE = re.compile(r"^\s*([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)\s*([a-zA-Z0]*)\s*$")


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------


def _split_quantity(text) -> tuple[float, str]:
    """Split '10cm' / '3 nm' / '1e2' into (value, unit); bare numbers get ''."""
    if isinstance(text, (int, float)):
        return float(text), ""
    match = _QUANTITY_RE.match(str(text))
    if match is None:
        raise ConfigError(f"cannot parse quantity {text!r} (expected e.g. '10cm', '3nm', '250')")
    try:
        value = float(match.group(1))
    except ValueError:
        raise ConfigError(f"cannot parse number in quantity {text!r}") from None
    return value, match.group(2)


def _parse_length_au(text, bare_unit: str) -> float:
    """A length flag in Bohr radii; ``bare_unit`` applies when no unit is given."""
    value, unit = _split_quantity(text)
    if unit == "":
        unit = bare_unit
    if unit in ("a0", "au", "bohr"):
        return value
    return length_to_au(value, unit)


def _parse_height_m(text) -> float:
    """A free-fall height in metres; bare numbers mean metres."""
    value, unit = _split_quantity(text)
    if unit in ("", "m"):
        return value
    if unit in ("a0", "au", "bohr"):
        return value * DEFAULT_CONSTANTS.bohr_radius_m
    return length_to_au(value, unit) * DEFAULT_CONSTANTS.bohr_radius_m


def _parse_figures(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        items = [str(x) for x in text]
    else:
        items = [part for part in str(text).split(",") if part.strip()]
    figures = []
    for item in items:
        try:
            number = int(item)
        except ValueError:
            raise ConfigError(f"bad figure id {item!r} in {text!r}") from None
        if number not in _ALL_FIGURES:
            raise ConfigError(f"unknown figure {number} (have {list(_ALL_FIGURES)})")
        if number not in figures:
            figures.append(number)
    if not figures:
        raise ConfigError(f"no figures selected in {text!r}")
    return tuple(figures)


def _dielectric(name):
    if name == "perfect":
        return PerfectMirror()
    if name == "silicon":
        return silicon()
    if name == "silica":
        return silica()
    if name is None:
        raise ConfigError(f"--material is required (one of: {', '.join(_MATERIALS)})")
    raise ConfigError(f"unknown material {name!r} (known: {', '.join(_MATERIALS)})")


def _make_mirror(args) -> Mirror:
    thickness = getattr(args, "thickness", None)
    if thickness is not None and getattr(args, "bulk", False):
        raise ConfigError("--bulk and --thickness are mutually exclusive")
    thickness_au = None if thickness is None else _parse_length_au(thickness, "a0")
    return Mirror(_dielectric(args.material), thickness_au)


def _resolve_energy(args) -> tuple[float, dict]:
    """Exactly one of --height/--energy/--k; returns (energy_au, config entries)."""
    given = [
        name
        for name, value in (
            ("height", getattr(args, "height", None)),
            ("energy", getattr(args, "energy", None)),
            ("k", getattr(args, "k", None)),
        )
        if value is not None
    ]
    if len(given) != 1:
        raise ConfigError(
            f"exactly one of --height, --energy, --k is required (got {given or 'none'})"
        )
    if given[0] == "height":
        height_m = _parse_height_m(args.height)
        if not height_m > 0:
            raise ConfigError(f"height must be > 0, got {args.height!r}")
        energy = height_to_energy(height_m)
        return energy, {"height_m": height_m, "energy_au": energy}
    if given[0] == "energy":
        return float(args.energy), {"energy_au": float(args.energy)}
    energy = wavevector_to_energy(float(args.k))
    return energy, {"k_au": float(args.k), "energy_au": energy}


def _make_cache(args):
    if getattr(args, "no_cache", False):
        return None
    directory = getattr(args, "cache_dir", None) or os.environ.get("CPQR_CACHE_DIR")
    if directory is None:
        base = os.environ.get("XDG_CACHE_HOME") or os.path.join(
            os.path.expanduser("~"), ".cache"
        )
        directory = os.path.join(base, "cpqr")
    return PotentialCache(directory)


def _controls(args) -> SolverControls:
    return SolverControls().replace(
        rtol=args.tol_ode, atol=args.tol_ode, defect_tol=args.tol_defect
    )


def _grid_config(args) -> dict:
    return {
        "z_min_au": args.zmin,
        "z_max_au": args.zmax,
        "points_per_decade": args.grid_points,
        "tol_quad": args.tol_quad,
        "tol_ode": args.tol_ode,
        "tol_defect": args.tol_defect,
    }


def _build(mirror: Mirror, args, cache):
    return build_table(
        mirror,
        hydrogen(),
        z_min=args.zmin,
        z_max=args.zmax,
        points_per_decade=args.grid_points,
        rtol=args.tol_quad,
        cache=cache,
    )


def _height_grid(args) -> np.ndarray:
    h_min = _parse_height_m(args.height_min)
    h_max = _parse_height_m(args.height_max)
    if not (0 < h_min < h_max):
        raise ConfigError(f"need 0 < height-min < height-max, got {h_min} .. {h_max}")
    decades = math.log10(h_max / h_min)
    n = max(2, int(round(decades * args.heights_per_decade)) + 1)
    return np.geomspace(h_min, h_max, n)


def _k_ladder(args) -> np.ndarray:
    if not (0 < args.k_min < args.k_max):
        raise ConfigError(f"need 0 < k-min < k-max, got {args.k_min} .. {args.k_max}")
    decades = math.log10(args.k_max / args.k_min)
    n = max(2, int(round(decades * args.k_per_decade)) + 1)
    return np.geomspace(args.k_max, args.k_min, n)


# ---------------------------------------------------------------------------
# payload serialization
# ---------------------------------------------------------------------------


def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _finite_or_none(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def _payload(fmt: str, columns, rows, config: dict) -> str:
    """Render one output table with its configuration stamp."""
    if fmt == "csv":
        lines = [f"# cpqr {__version__}", f"# config {canonical_key(config)}"]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"
    if fmt == "records":
        head = {"record": "meta", "version": __version__, "config": config}
        lines = [json.dumps(head, sort_keys=True, separators=(",", ":"))]
        for row in rows:
            record = {"record": "row"}
            record.update((c, _finite_or_none(v)) for c, v in zip(columns, row))
            lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown output format {fmt!r} (known: csv, records)")


def _write_payload(out_path, text: str) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        return
    parent = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(parent, exist_ok=True)
    with open(out_path, "w", encoding="ascii") as handle:
        handle.write(text)


def _base_config(args, command: str) -> dict:
    return {
        "command": command,
        "version": __version__,
        "backend": BACKEND_NAME,
        "format": args.format,
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_potential(args) -> int:
    mirror = _make_mirror(args)
    config = _base_config(args, "potential")
    config.update({"mirror": mirror.key(), "polarizability": hydrogen().key()})
    if args.z is not None:
        z_au = _parse_length_au(args.z, "a0")
        value, err = compute_potential(
            mirror, hydrogen(), z_au, rtol=args.tol_quad, with_error=True
        )
        config.update({"z_au": z_au, "tol_quad": args.tol_quad})
        text = _payload(
            args.format, ("z_au", "v_au", "quad_rel_err"), [(z_au, value, err)], config
        )
        _write_payload(args.out, text)
        return 0
    cache = _make_cache(args)
    table = _build(mirror, args, cache)
    config.update(_grid_config(args))
    config.update({"c3_au": table.c3, "c_far_au": table.c_far, "n_far": table.n_far})
    rows = list(zip(table.z_grid.tolist(), table.v_grid.tolist()))
    text = _payload(args.format, ("z_au", "v_au"), rows, config)
    _write_payload(args.out, text)
    return 0


def _cmd_reflect(args) -> int:
    mirror = _make_mirror(args)
    energy, energy_cfg = _resolve_energy(args)
    cache = _make_cache(args)
    table = _build(mirror, args, cache)
    result = reflection_amplitude(table, energy, controls=_controls(args))
    record = result.record()
    config = _base_config(args, "reflect")
    config.update({"mirror": mirror.key(), "polarizability": hydrogen().key()})
    config.update(energy_cfg)
    config.update(_grid_config(args))
    text = _payload(args.format, tuple(record), [tuple(record.values())], config)
    _write_payload(args.out, text)
    return 0


def _cmd_curve(args) -> int:
    mirror = _make_mirror(args)
    cache = _make_cache(args)
    table = _build(mirror, args, cache)
    heights = _height_grid(args)
    energies = [height_to_energy(h) for h in heights]
    results = reflection_curve(table, energies, controls=_controls(args))
    rows = [
        (100.0 * float(h), res.energy, res.probability)
        for h, res in zip(heights, results)
    ]
    config = _base_config(args, "curve")
    config.update({"mirror": mirror.key(), "polarizability": hydrogen().key()})
    config.update(_grid_config(args))
    config.update(
        {
            "height_min_m": float(heights[0]),
            "height_max_m": float(heights[-1]),
            "heights_per_decade": args.heights_per_decade,
        }
    )
    text = _payload(args.format, ("h_cm", "energy_au", "probability"), rows, config)
    _write_payload(args.out, text)
    return 0


def _cmd_badlands(args) -> int:
    mirror = _make_mirror(args)
    energy, energy_cfg = _resolve_energy(args)
    cache = _make_cache(args)
    table = _build(mirror, args, cache)
    z, q = profile(table, energy, n=args.profile_points)
    z_peak, q_peak = peak(table, energy)
    config = _base_config(args, "badlands")
    config.update({"mirror": mirror.key(), "polarizability": hydrogen().key()})
    config.update(energy_cfg)
    config.update(_grid_config(args))
    config.update(
        {"profile_points": args.profile_points, "peak_z_au": z_peak, "peak_q": q_peak}
    )
    rows = list(zip(z.tolist(), q.tolist()))
    text = _payload(args.format, ("z_au", "q"), rows, config)
    _write_payload(args.out, text)
    return 0


def _cmd_scatlen(args) -> int:
    mirror = _make_mirror(args)
    cache = _make_cache(args)
    table = _build(mirror, args, cache)
    threshold = scattering_length(
        table,
        k_max=args.k_max,
        k_min=args.k_min,
        points_per_decade=args.k_per_decade,
        fit_decades=args.fit_decades,
        controls=_controls(args),
    )
    tau = lifetime(threshold.a0)
    config = _base_config(args, "scatlen")
    config.update({"mirror": mirror.key(), "polarizability": hydrogen().key()})
    config.update(_grid_config(args))
    config.update(
        {
            "k_max_au": args.k_max,
            "k_min_au": args.k_min,
            "k_per_decade": args.k_per_decade,
            "fit_decades": args.fit_decades,
            "a0_re": threshold.a0.real,
            "a0_im": threshold.a0.imag,
            "slope_re": threshold.slope.real,
            "slope_im": threshold.slope.imag,
            "fit_residual": threshold.residual,
            "tau_s": tau,
        }
    )
    rows = [
        (k, a.real, a.imag) for k, a in zip(threshold.k_values, threshold.a_values)
    ]
    text = _payload(args.format, ("k_au", "re_a", "im_a"), rows, config)
    _write_payload(args.out, text)
    return 0


def _cmd_table1(args) -> int:
    cache = _make_cache(args)
    rows = []
    for material in _MATERIALS:
        table = _build(Mirror(_dielectric(material)), args, cache)
        rows.append((material, table.c3, table.c_far))
    config = _base_config(args, "table1")
    config.update({"polarizability": hydrogen().key()})
    config.update(_grid_config(args))
    text = _payload(args.format, ("material", "c3_au", "c4_au"), rows, config)
    _write_payload(args.out, text)
    return 0


def _cmd_table2(args) -> int:
    height_m = _parse_height_m(args.height)
    if not height_m > 0:
        raise ConfigError(f"height must be > 0, got {args.height!r}")
    energy = height_to_energy(height_m)
    cache = _make_cache(args)
    controls = _controls(args)
    rows = []
    for material in _MATERIALS:
        table = _build(Mirror(_dielectric(material)), args, cache)
        result = reflection_amplitude(table, energy, controls=controls)
        rows.append((material, 100.0 * height_m, result.probability))
    config = _base_config(args, "table2")
    config.update({"polarizability": hydrogen().key()})
    config.update({"height_m": height_m, "energy_au": energy})
    config.update(_grid_config(args))
    text = _payload(args.format, ("material", "h_cm", "probability"), rows, config)
    _write_payload(args.out, text)
    return 0


def _ladder_config(args) -> dict:
    return {
        "k_max_au": args.k_max,
        "k_min_au": args.k_min,
        "k_per_decade": args.k_per_decade,
        "fit_decades": args.fit_decades,
    }


def _threshold_for(mirror: Mirror, args, cache, controls):
    table = _build(mirror, args, cache)
    return scattering_length(
        table,
        k_max=args.k_max,
        k_min=args.k_min,
        points_per_decade=args.k_per_decade,
        fit_decades=args.fit_decades,
        controls=controls,
    )


def _cmd_table3(args) -> int:
    cache = _make_cache(args)
    controls = _controls(args)
    rows = []
    for material in _MATERIALS:
        threshold = _threshold_for(Mirror(_dielectric(material)), args, cache, controls)
        tau = lifetime(threshold.a0)
        rows.append(
            (material, threshold.a0.real, threshold.a0.imag, threshold.residual, tau)
        )
    config = _base_config(args, "table3")
    config.update({"polarizability": hydrogen().key()})
    config.update(_grid_config(args))
    config.update(_ladder_config(args))
    text = _payload(
        args.format, ("material", "re_a0", "im_a0", "fit_residual", "tau_s"), rows, config
    )
    _write_payload(args.out, text)
    return 0


def _cmd_table4(args) -> int:
    cache = _make_cache(args)
    controls = _controls(args)
    rows = []
    for material in ("silicon", "silica"):
        dielectric = _dielectric(material)
        for d_nm in _TABLE4_THICKNESS_NM + (math.inf,):
            thickness_au = None if math.isinf(d_nm) else length_to_au(d_nm, "nm")
            mirror = Mirror(dielectric, thickness_au)
            threshold = _threshold_for(mirror, args, cache, controls)
            rows.append((material, d_nm, threshold.a0.real, threshold.a0.imag))
    config = _base_config(args, "table4")
    config.update({"polarizability": hydrogen().key()})
    config.update(_grid_config(args))
    config.update(_ladder_config(args))
    text = _payload(
        args.format, ("material", "thickness_nm", "re_a0", "im_a0"), rows, config
    )
    _write_payload(args.out, text)
    return 0


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------


def _figure_path(out_dir: str, stem: str, fmt: str) -> str:
    suffix = "csv" if fmt == "csv" else "jsonl"
    return os.path.join(out_dir, f"{stem}.{suffix}")


def _silica_slab_mirrors() -> list[tuple[float, Mirror]]:
    dielectric = silica()
    mirrors = [(math.inf, Mirror(dielectric))]
    for d_nm in _FIG_SLAB_NM:
        mirrors.append((d_nm, Mirror(dielectric, length_to_au(d_nm, "nm"))))
    return mirrors


def _slab_label(d_nm: float) -> str:
    return "bulk" if math.isinf(d_nm) else f"d{d_nm:g}nm"


def _fig_potential_ratio(tables: dict, keys, labels) -> tuple[tuple, list]:
    z = tables[keys[0]].z_grid
    columns = ("z_au",) + tuple(labels)
    ratios = [(-tables[key].v_grid * z**4) / _C4_STAR for key in keys]
    rows = [
        (float(z[i]),) + tuple(float(r[i]) for r in ratios) for i in range(z.size)
    ]
    return columns, rows


def _fig_reflection_curves(tables: dict, keys, labels, heights, controls):
    energies = [height_to_energy(h) for h in heights]
    curves = [
        [res.probability for res in reflection_curve(tables[key], energies, controls=controls)]
        for key in keys
    ]
    columns = ("h_cm",) + tuple(labels)
    rows = [
        (100.0 * float(heights[i]),) + tuple(curve[i] for curve in curves)
        for i in range(len(heights))
    ]
    return columns, rows


def _cmd_fig_data(args) -> int:
    figures = _parse_figures(args.figures)
    if args.out is None:
        raise ConfigError("fig-data requires --out DIRECTORY")
    cache = _make_cache(args)
    controls = _controls(args)

    bulk_tables = {}

    def bulk(material):
        if material not in bulk_tables:
            bulk_tables[material] = _build(Mirror(_dielectric(material)), args, cache)
        return bulk_tables[material]

    slab_tables = {}

    def silica_slabs():
        if not slab_tables:
            for d_nm, mirror in _silica_slab_mirrors():
                slab_tables[d_nm] = _build(mirror, args, cache)
        return slab_tables

    base = _base_config(args, "fig-data")
    base.update({"polarizability": hydrogen().key()})
    base.update(_grid_config(args))
    base["figures"] = list(figures)

    outputs = {}

    if 1 in figures:
        tables = {m: bulk(m) for m in _MATERIALS}
        columns, rows = _fig_potential_ratio(tables, _MATERIALS, _MATERIALS)
        config = dict(base, figure=1, reference_c4_au=_C4_STAR)
        outputs["fig1"] = (columns, rows, config)

    if 4 in figures:
        tables = silica_slabs()
        keys = list(tables)
        labels = [_slab_label(d) for d in keys]
        columns, rows = _fig_potential_ratio(tables, keys, labels)
        config = dict(base, figure=4, reference_c4_au=_C4_STAR, material="silica")
        outputs["fig4"] = (columns, rows, config)

    heights = None
    if 2 in figures or 5 in figures:
        heights = _height_grid(args)
        heights_cfg = {
            "height_min_m": float(heights[0]),
            "height_max_m": float(heights[-1]),
            "heights_per_decade": args.heights_per_decade,
        }

    if 2 in figures:
        tables = {m: bulk(m) for m in _MATERIALS}
        columns, rows = _fig_reflection_curves(
            tables, _MATERIALS, _MATERIALS, heights, controls
        )
        config = dict(base, figure=2, **heights_cfg)
        outputs["fig2"] = (columns, rows, config)

    if 5 in figures:
        tables = silica_slabs()
        keys = list(tables)
        labels = [_slab_label(d) for d in keys]
        columns, rows = _fig_reflection_curves(tables, keys, labels, heights, controls)
        config = dict(base, figure=5, material="silica", **heights_cfg)
        outputs["fig5"] = (columns, rows, config)

    if 3 in figures:
        height_m = _parse_height_m(args.height or "10cm")
        energy = height_to_energy(height_m)
        profiles = {}
        peaks = []
        z_shared = None
        for material in _MATERIALS:
            table = bulk(material)
            z, q = profile(table, energy, n=args.profile_points)
            z_shared = z
            profiles[material] = q
            z_peak, q_peak = peak(table, energy)
            peaks.append((material, z_peak, q_peak))
        columns = ("z_au",) + _MATERIALS
        rows = [
            (float(z_shared[i]),) + tuple(float(profiles[m][i]) for m in _MATERIALS)
            for i in range(z_shared.size)
        ]
        config = dict(
            base, figure=3, height_m=height_m, energy_au=energy,
            profile_points=args.profile_points,
        )
        outputs["fig3"] = (columns, rows, config)
        outputs["fig3-peaks"] = (("material", "peak_z_au", "peak_q"), peaks, config)

    if 6 in figures or 7 in figures:
        k_values = _k_ladder(args)

    if 6 in figures:
        rows = []
        for material in _MATERIALS:
            table = bulk(material)
            amplitudes = amplitude_ladder(table, k_values, controls=controls)
            rows.extend(
                (material, float(k), a.real, a.imag)
                for k, a in zip(k_values, amplitudes)
            )
        config = dict(base, figure=6, **_ladder_config(args))
        outputs["fig6"] = (("material", "k_au", "re_a", "im_a"), rows, config)

    if 7 in figures:
        tables = silica_slabs()
        rows = []
        for d_nm, table in tables.items():
            amplitudes = amplitude_ladder(table, k_values, controls=controls)
            rows.extend(
                (_slab_label(d_nm), float(k), a.real, a.imag)
                for k, a in zip(k_values, amplitudes)
            )
        config = dict(base, figure=7, material="silica", **_ladder_config(args))
        outputs["fig7"] = (("thickness", "k_au", "re_a", "im_a"), rows, config)

    os.makedirs(args.out, exist_ok=True)
    for stem, (columns, rows, config) in outputs.items():
        text = _payload(args.format, columns, rows, config)
        path = _figure_path(args.out, stem, args.format)
        with open(path, "w", encoding="ascii") as handle:
            handle.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser construction
# ---------------------------------------------------------------------------


def _add_output_flags(sp) -> None:
    sp.add_argument("--out", help="output path (default: stdout; fig-data: directory)")
    sp.add_argument(
        "--format",
        choices=("csv", "records"),
        default="csv",
        help="csv (with '# config' stamp) or records (JSON lines)",
    )
    sp.add_argument("--config", help="JSON file of option defaults for this command")


def _add_cache_flags(sp) -> None:
    sp.add_argument("--cache-dir", help="potential-table cache directory")
    sp.add_argument(
        "--no-cache", action="store_true", help="compute without reading or writing the cache"
    )


def _add_numeric_flags(sp) -> None:
    sp.add_argument("--tol-quad", type=float, default=1e-8, help="potential quadrature rtol")
    sp.add_argument("--tol-ode", type=float, default=1e-12, help="amplitude integrator rtol/atol")
    sp.add_argument("--tol-defect", type=float, default=1e-6, help="allowed flux defect")
    sp.add_argument("--zmin", type=float, default=1.0, help="table grid start (a0)")
    sp.add_argument("--zmax", type=float, default=1e7, help="table grid end (a0)")
    sp.add_argument("--grid-points", type=int, default=20, help="table points per decade")


def _add_mirror_flags(sp) -> None:
    # Not argparse-required so that --config files can supply the material;
    # _make_mirror raises ConfigError when it is still missing.
    sp.add_argument("--material", choices=_MATERIALS, help="mirror material")
    sp.add_argument("--bulk", action="store_true", help="semi-infinite mirror (default)")
    sp.add_argument("--thickness", help="slab thickness, e.g. '20nm' (bare number: a0)")


def _add_energy_flags(sp) -> None:
    sp.add_argument("--height", help="free-fall height, e.g. '10cm' (bare number: metres)")
    sp.add_argument("--energy", type=float, help="kinetic energy in hartree")
    sp.add_argument("--k", type=float, help="incident wavevector in a.u.")


def _add_height_grid_flags(sp) -> None:
    sp.add_argument("--height-min", default="0.01cm", help="curve start height")
    sp.add_argument("--height-max", default="1000cm", help="curve end height")
    sp.add_argument("--heights-per-decade", type=int, default=4, help="curve density")


def _add_ladder_flags(sp) -> None:
    sp.add_argument("--k-max", type=float, default=1e-3, help="ladder start wavevector (a.u.)")
    sp.add_argument("--k-min", type=float, default=1e-6, help="ladder end wavevector (a.u.)")
    sp.add_argument("--k-per-decade", type=int, default=4, help="ladder rungs per decade")
    sp.add_argument(
        "--fit-decades", type=float, default=2.0, help="decades above k-min used in the fit"
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="cpqr",
        description=(
            "Casimir-Polder potentials and quantum reflection of antihydrogen "
            "above bulk and thin-slab mirrors"
        ),
    )
    parser.add_argument("--version", action="version", version=f"cpqr {__version__}")
    subparsers = parser.add_subparsers(dest="command")
    registry = {}

    def sub(name, help_text):
        sp = subparsers.add_parser(name, help=help_text)
        _add_output_flags(sp)
        _add_cache_flags(sp)
        _add_numeric_flags(sp)
        registry[name] = sp
        return sp

    sp = sub("potential", "V(z) at one distance (--z) or over the whole table grid")
    _add_mirror_flags(sp)
    sp.add_argument("--z", help="distance from the surface, e.g. '250' (a0) or '5nm'")

    sp = sub("reflect", "reflection amplitude at one energy")
    _add_mirror_flags(sp)
    _add_energy_flags(sp)

    sp = sub("curve", "reflection probability versus free-fall height")
    _add_mirror_flags(sp)
    _add_height_grid_flags(sp)

    sp = sub("badlands", "WKB-breakdown profile Q(z) and its peak")
    _add_mirror_flags(sp)
    _add_energy_flags(sp)
    sp.add_argument("--profile-points", type=int, default=400, help="profile sample count")

    sp = sub("scatlen", "threshold scattering length from a wavevector ladder")
    _add_mirror_flags(sp)
    _add_ladder_flags(sp)

    sub("table1", "van der Waals and retarded strength for the three bulk mirrors")

    sp = sub("table2", "reflection probability at one height for the three bulk mirrors")
    sp.add_argument("--height", default="10cm", help="free-fall height (default 10cm)")

    sp = sub("table3", "threshold scattering length and lifetime for the three bulks")
    _add_ladder_flags(sp)

    sp = sub("table4", "slab scattering lengths for silicon and silica")
    _add_ladder_flags(sp)

    sp = sub("fig-data", "plot-ready datasets for the figure suite")
    sp.add_argument(
        "--figures", default="1,2,3,4,5,6,7", help="comma-separated figure ids to emit"
    )
    sp.add_argument("--height", help="badlands height for figure 3 (default 10cm)")
    sp.add_argument("--profile-points", type=int, default=400, help="figure 3 sample count")
    _add_height_grid_flags(sp)
    _add_ladder_flags(sp)

    return parser, registry


_COMMANDS = {
    "potential": _cmd_potential,
    "reflect": _cmd_reflect,
    "curve": _cmd_curve,
    "badlands": _cmd_badlands,
    "scatlen": _cmd_scatlen,
    "table1": _cmd_table1,
    "table2": _cmd_table2,
    "table3": _cmd_table3,
    "table4": _cmd_table4,
    "fig-data": _cmd_fig_data,
}


def _load_config_file(path: str, sp) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            loaded = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    known = {action.dest for action in sp._actions} - {"help", "config"}
    unknown = sorted(set(loaded) - known)
    if unknown:
        raise ConfigError(
            f"unknown option(s) in {path}: {', '.join(unknown)} (known: {', '.join(sorted(known))})"
        )
    return loaded


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, registry = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        if getattr(args, "config", None):
            overrides = _load_config_file(args.config, registry[args.command])
            registry[args.command].set_defaults(**overrides)
            # Re-parse so explicit command-line flags still win over the file.
            args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CpqrError as exc:
        sys.stderr.write(json.dumps(exc.record(), sort_keys=True) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
