import math

import numpy as np
import pytest

from cpqr.errors import ConfigError, DomainError, ExtrapolationError, ValidationError
from cpqr.optics import (
    DrudeLorentz,
    EffectiveOscillator,
    EmMode,
    Mirror,
    PerfectMirror,
    Sellmeier,
    TabulatedDielectric,
    TabulatedPolarizability,
    fresnel_bulk,
    hydrogen,
    silica,
    silicon,
    slab_reflection,
)
from cpqr.units import DEFAULT_CONSTANTS

C_AU = DEFAULT_CONSTANTS.light_speed_au


# ---------------------------------------------------------------------------
# dielectric models
# ---------------------------------------------------------------------------


def test_silicon_static_and_high_frequency_limits():
    model = silicon()
    assert model.epsilon(0.0) == pytest.approx(11.87, rel=1e-12)
    assert model.epsilon(1e4) == pytest.approx(1.035, rel=1e-6)


def test_silicon_half_height_at_resonance():
    model = silicon()
    # 6.6e15 rad/s in atomic units
    w0 = 6.6e15 / DEFAULT_CONSTANTS.frequency_au_rad_s
    assert model.omega0_au == pytest.approx(0.15965, rel=1e-4)
    expected = 1.035 + (11.87 - 1.035) / 2
    assert model.epsilon(w0) == pytest.approx(expected, rel=1e-12)


def test_silica_static_value():
    model = silica()
    assert model.epsilon(0.0) == pytest.approx(2.995782, rel=1e-9)
    assert model.epsilon(1e5) == pytest.approx(1.0, rel=1e-6)


def test_builtin_epsilon_monotone_and_above_one():
    grid = np.logspace(-6, 5, 400)
    for model in (silicon(), silica()):
        eps = model.epsilon(grid)
        assert np.all(eps >= 1.0)
        assert np.all(np.diff(eps) <= 0.0)


def test_perfect_mirror_epsilon_sentinel():
    assert math.isinf(PerfectMirror().epsilon(0.3))


def test_tabulated_dielectric_interpolates_in_log_xi():
    xi = np.logspace(-4, 2, 61)
    model_src = silicon()
    table = TabulatedDielectric(xi, model_src.epsilon(xi))
    # midpoint in log space between adjacent nodes
    mid = math.sqrt(xi[10] * xi[11])
    expected = 0.5 * (model_src.epsilon(xi[10]) + model_src.epsilon(xi[11]))
    assert table.epsilon(mid) == pytest.approx(expected, rel=1e-12)
    # well inside the grid the dense table tracks the source model
    dense = TabulatedDielectric(np.logspace(-4, 2, 4001), silicon().epsilon(np.logspace(-4, 2, 4001)))
    assert dense.epsilon(0.02) == pytest.approx(model_src.epsilon(0.02), rel=1e-6)


def test_tabulated_dielectric_rejects_out_of_range():
    xi = np.logspace(-2, 2, 21)
    table = TabulatedDielectric(xi, np.full(21, 2.0))
    with pytest.raises(ExtrapolationError):
        table.epsilon(1e-3)
    with pytest.raises(ExtrapolationError):
        table.epsilon(1e3)


def test_tabulated_dielectric_validation():
    xi = np.logspace(-2, 2, 11)
    with pytest.raises(ValidationError):
        TabulatedDielectric(xi, np.full(11, 0.9))  # eps < 1
    with pytest.raises(ValidationError):
        TabulatedDielectric(xi[::-1], np.full(11, 2.0))  # descending grid
    with pytest.raises(ValidationError):
        TabulatedDielectric(xi, np.full(10, 2.0))  # length mismatch


def test_tabulated_dielectric_from_file(tmp_path):
    path = tmp_path / "eps.dat"
    xi_rad_s = np.logspace(13, 18, 40)
    xi_au = xi_rad_s / DEFAULT_CONSTANTS.frequency_au_rad_s
    values = silica().epsilon(xi_au)
    np.savetxt(path, np.column_stack([xi_rad_s, values]))
    table = TabulatedDielectric.from_file(str(path))
    probe = xi_au[17]
    assert table.epsilon(probe) == pytest.approx(values[17], rel=1e-9)


# ---------------------------------------------------------------------------
# polarizability
# ---------------------------------------------------------------------------


def test_oscillator_static_value_matches_retarded_calibration():
    model = hydrogen()
    # alpha(0) solves 3 alpha0 c / (8 pi) = 73.6: one division
    assert model.alpha0 == pytest.approx(8 * math.pi * 73.6 / (3 * C_AU), rel=1e-3)
    assert model.alpha(0.0) == pytest.approx(4.50, rel=1e-12)


def test_oscillator_half_value_and_tail():
    model = hydrogen()
    wa = model.omega_a_au
    assert model.alpha(wa) == pytest.approx(0.5 * model.alpha0, rel=1e-12)
    assert model.alpha(1e3 * wa) == pytest.approx(1e-6 * model.alpha0, rel=1e-3)


def test_oscillator_monotone_decreasing():
    grid = np.logspace(-4, 4, 200)
    alpha = hydrogen().alpha(grid)
    assert np.all(np.diff(alpha) < 0)
    assert np.all(alpha > 0)


def test_tabulated_polarizability(tmp_path):
    xi = np.logspace(-5, 3, 200)
    table = TabulatedPolarizability(xi, hydrogen().alpha(xi))
    assert table.alpha(0.02) == pytest.approx(hydrogen().alpha(0.02), rel=1e-4)
    with pytest.raises(ExtrapolationError):
        table.alpha(1e4)
    path = tmp_path / "alpha.dat"
    np.savetxt(
        path,
        np.column_stack([xi * DEFAULT_CONSTANTS.frequency_au_rad_s, hydrogen().alpha(xi)]),
    )
    from_file = TabulatedPolarizability.from_file(str(path))
    assert from_file.alpha(0.02) == pytest.approx(table.alpha(0.02), rel=1e-9)


# ---------------------------------------------------------------------------
# modes and Fresnel amplitudes
# ---------------------------------------------------------------------------


def test_emmode_wavevector_ordering():
    rng = np.random.default_rng(3)
    for _ in range(50):
        xi = 10.0 ** rng.uniform(-6, 3)
        k = 10.0 ** rng.uniform(-6, 3)
        eps = 1.0 + 10.0 ** rng.uniform(-3, 1.5)
        mode = EmMode.build(xi, k, eps, "te")
        assert mode.kappa >= xi / C_AU
        assert mode.kcap >= mode.kappa  # eps >= 1 slows the decay outside vacuum


def test_emmode_rejects_bad_polarization():
    with pytest.raises(ConfigError):
        EmMode.build(1.0, 1.0, 2.0, "tem")


def test_fresnel_perfect_mirror_limits():
    te = EmMode.build(0.5, 0.7, math.inf, "te")
    tm = EmMode.build(0.5, 0.7, math.inf, "tm")
    assert fresnel_bulk(te, math.inf) == -1.0
    assert fresnel_bulk(tm, math.inf) == 1.0


def test_fresnel_large_epsilon_approaches_perfect():
    # TE needs eps >> (kappa c / xi)^2 before the inverted-mirror limit bites
    eps = 1e12
    te = EmMode.build(0.5, 0.7, eps, "te")
    tm = EmMode.build(0.5, 0.7, eps, "tm")
    assert fresnel_bulk(te, eps) == pytest.approx(-1.0, abs=1e-3)
    assert fresnel_bulk(tm, eps) == pytest.approx(1.0, abs=1e-3)


def test_fresnel_vacuum_is_transparent():
    for pol in ("te", "tm"):
        mode = EmMode.build(0.5, 0.7, 1.0, pol)
        assert fresnel_bulk(mode, 1.0) == 0.0


def test_fresnel_hand_evaluated_point():
    # eps = 2 with xi = k numerically: kappa = k sqrt(1 + 1/c^2), K = k sqrt(1 + 2/c^2)
    k = 0.7
    xi = 0.7
    kappa = k * math.sqrt(1.0 + 1.0 / C_AU**2)
    kcap = k * math.sqrt(1.0 + 2.0 / C_AU**2)
    te = EmMode.build(xi, k, 2.0, "te")
    tm = EmMode.build(xi, k, 2.0, "tm")
    assert fresnel_bulk(te, 2.0) == pytest.approx((kappa - kcap) / (kappa + kcap), rel=1e-12)
    assert fresnel_bulk(tm, 2.0) == pytest.approx(
        (2 * kappa - kcap) / (2 * kappa + kcap), rel=1e-12
    )


def test_fresnel_amplitudes_bounded_by_unity():
    rng = np.random.default_rng(11)
    for _ in range(200):
        xi = 10.0 ** rng.uniform(-6, 3)
        k = 10.0 ** rng.uniform(-6, 3)
        eps = 1.0 + 10.0 ** rng.uniform(-4, 2)
        te = EmMode.build(xi, k, eps, "te")
        tm = EmMode.build(xi, k, eps, "tm")
        assert abs(fresnel_bulk(te, eps)) <= 1.0
        assert abs(fresnel_bulk(tm, eps)) <= 1.0
        # sign bounds hold exactly in real arithmetic; allow round-off slack
        assert fresnel_bulk(te, eps) <= 1e-12  # TE reflection is inverted
        assert fresnel_bulk(tm, eps) >= -1e-12


# ---------------------------------------------------------------------------
# slabs
# ---------------------------------------------------------------------------


def test_slab_thick_limit_recovers_bulk():
    assert slab_reflection(0.6, kcap=2.0, thickness_au=500.0) == pytest.approx(
        0.6, abs=1e-12
    )


def test_slab_thin_limit_linear_in_thickness():
    rho = -0.4
    kcap = 1.3
    r1 = slab_reflection(rho, kcap, 1e-9)
    r2 = slab_reflection(rho, kcap, 2e-9)
    assert r2 == pytest.approx(2 * r1, rel=1e-6)
    assert r1 == pytest.approx(2 * kcap * 1e-9 * rho / (1 - rho**2), rel=1e-6)


def test_slab_matches_two_interface_recursion():
    # independent route: vacuum/medium then medium/vacuum amplitudes with a
    # round-trip damping factor e^(-2 K d)
    rng = np.random.default_rng(5)
    for _ in range(40):
        rho = rng.uniform(-0.95, 0.95)
        kcap = 10.0 ** rng.uniform(-3, 2)
        d = 10.0 ** rng.uniform(-2, 3)
        damping = math.exp(-2 * kcap * d)
        expected = (rho + (-rho) * damping) / (1 + rho * (-rho) * damping)
        assert slab_reflection(rho, kcap, d) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_slab_hand_evaluated_point():
    # rho = 0.6, K d = 0.5: 0.6 (1 - e^-1) / (1 - 0.36 e^-1)
    expected = 0.6 * (1 - math.exp(-1.0)) / (1 - 0.36 * math.exp(-1.0))
    assert slab_reflection(0.6, 0.5, 1.0) == pytest.approx(expected, rel=1e-12)


def test_slab_perfect_mirror_is_thickness_independent():
    for rho in (-1.0, 1.0):
        assert slab_reflection(rho, math.inf, 3.0) == rho
        assert slab_reflection(rho, 0.7, 3.0) == pytest.approx(rho, rel=1e-12)


def test_slab_magnitude_increases_with_thickness():
    rho = -0.55
    kcap = 0.8
    thicknesses = np.logspace(-3, 2, 30)
    values = [abs(slab_reflection(rho, kcap, d)) for d in thicknesses]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] <= abs(rho) + 1e-12


def test_slab_rejects_bad_geometry():
    with pytest.raises(DomainError):
        slab_reflection(0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        slab_reflection(0.5, -1.0, 1.0)


def test_mirror_geometry():
    bulk = Mirror(silicon())
    slab = Mirror(silica(), thickness_au=18.9)
    assert bulk.is_bulk and not slab.is_bulk
    with pytest.raises(DomainError):
        Mirror(silica(), thickness_au=-1.0)


def test_model_keys_are_json_friendly():
    import json

    for model in (PerfectMirror(), silicon(), silica(), hydrogen()):
        json.dumps(model.key())
    json.dumps(Mirror(silica(), 18.9).key())
