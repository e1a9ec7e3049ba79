"""Timing comparison between the pure-Python kernels and the compiled core.

Runs the three kernel entry points on representative workloads and prints a
small table with the per-call times and the speedup of the compiled
extension.  Usage::

    python3 benchmarks/bench_backends.py [--repeats N]

The script needs an importable ``cpqr`` (editable install or ``src`` on the
path) and exercises whatever backends ``cpqr.backend.implementations()``
reports; with only the Python kernels built it simply times those.
"""

import argparse
import math
import time

import numpy as np

from cpqr.backend import implementations
from cpqr.cache import PotentialCache
from cpqr.optics import Mirror, hydrogen, silica
from cpqr.potential import _inner_grid, _model_scales, _outer_grid, build_table
from cpqr.reflection import wall_amplitudes
from cpqr.units import DEFAULT_CONSTANTS, height_to_energy


def _time_call(fn, args, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def _workloads(tmpdir):
    """Build one argument tuple per kernel, shared by every backend."""
    c = DEFAULT_CONSTANTS.light_speed_au
    mass = DEFAULT_CONSTANTS.atom_mass_au
    pol = hydrogen()
    mirror = Mirror(silica())

    z = 250.0
    xi, wxi = _outer_grid(_model_scales(mirror, pol), z, c, 48)
    u, wu = _inner_grid(32)
    accumulate_args = (
        xi,
        wxi,
        pol.alpha(xi),
        mirror.dielectric.epsilon(xi),
        u,
        wu,
        z,
        c,
        math.inf,
        False,
    )

    table = build_table(mirror, pol, cache=PotentialCache(tmpdir))
    knots, coeffs, lo, hi = table.spline_data()
    eval_args = (knots, coeffs, lo, hi, 123.4)

    energy = height_to_energy(0.1)
    z_start = float(table.z_grid[0])
    zmap = 8.0 * mass * (-table.v_grid[0] * z_start**3)
    x_start = math.sqrt(zmap / z_start)
    c_plus, c_minus = wall_amplitudes(x_start, x_start)
    y0 = np.array([c_plus.real, c_plus.imag, c_minus.real, c_minus.imag, 0.0])
    propagate_args = (
        y0,
        x_start,
        math.sqrt(zmap / (50.0 * z_start)),
        0,
        zmap,
        knots,
        coeffs,
        lo,
        hi,
        mass,
        energy,
        1e-12,
        1e-12,
        200000,
    )

    return {
        "cp_accumulate (48x32 nodes)": ("cp_accumulate", accumulate_args, 20),
        "potential_eval (single z)": ("potential_eval", eval_args, 20000),
        "propagate (wall segment)": ("propagate", propagate_args, 5),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--repeats",
        type=int,
        default=5,
        help="timing repetitions per workload; the best run is reported",
    )
    args = parser.parse_args()

    import tempfile

    impls = implementations()
    with tempfile.TemporaryDirectory() as tmpdir:
        workloads = _workloads(tmpdir)

        print(f"backends: {', '.join(impls)}")
        header = f"{'workload':<30}" + "".join(f"{name:>14}" for name in impls)
        if len(impls) > 1:
            header += f"{'speedup':>10}"
        print(header)
        print("-" * len(header))
        for label, (fn_name, fn_args, inner) in workloads.items():
            row = f"{label:<30}"
            times = {}
            for name, mod in impls.items():
                fn = getattr(mod, fn_name)
                per_call = _time_call(
                    lambda: [fn(*fn_args) for _ in range(inner)],
                    (),
                    args.repeats,
                ) / inner
                times[name] = per_call
                row += f"{per_call * 1e6:>12.2f}us"
            if len(times) > 1:
                row += f"{times['python'] / times['compiled']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
