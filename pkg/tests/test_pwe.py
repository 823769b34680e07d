import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import values as ref
from rainuav import medium, pwe
from rainuav.errors import ConfigurationError, NumericalError

F = 4.9


def grid_1d(n=512, dx=0.02):
    return pwe.TransverseGrid.centered(n, dx)


def beam(grid, w0=0.5, center=None):
    center = (0.0,) * grid.ndim if center is None else center
    return pwe.gaussian_beam(pwe.SourceSpec(w0, center), grid)


# grid and source ------------------------------------------------------------


def test_grid_rejects_bad_shapes():
    with pytest.raises(ConfigurationError):
        pwe.TransverseGrid(100, 0.1)
    with pytest.raises(ConfigurationError):
        pwe.TransverseGrid(64, -0.1)
    with pytest.raises(ConfigurationError):
        pwe.TransverseGrid((8, 8, 8), 0.1)


def test_centered_grid_has_zero_at_middle():
    g = grid_1d(64, 0.5)
    assert g.coords()[32] == 0.0
    assert g.nearest_index((0.0,)) == (32,)


def test_check_sampling_limit():
    limit = pwe.max_spacing(F)
    pwe.TransverseGrid.centered(64, limit).check_sampling(F)
    with pytest.raises(ConfigurationError, match="refine"):
        pwe.TransverseGrid.centered(64, 1.01 * limit).check_sampling(F)


def test_next_pow2():
    assert [pwe.next_pow2(n) for n in (1, 2, 3, 64, 65)] == [1, 2, 4, 64, 128]


def test_gaussian_centre_and_waist():
    g = grid_1d(1024, 0.01)
    u = beam(g, 0.5)
    x = g.coords()
    assert u.amplitude[512] == 1.0
    i = int(np.argmin(np.abs(x - 0.5)))
    assert abs(u.amplitude[i]) == pytest.approx(math.exp(-1), rel=1e-12)


def test_gaussian_norm_matches_continuum():
    u = beam(grid_1d(1024, 0.01), 0.5)
    assert u.norm() ** 2 == pytest.approx(ref.GAUSSIAN_NORM_SQ_W0_0_5, rel=0.01)


def test_under_resolved_waist_rejected():
    with pytest.raises(ConfigurationError, match="under-resolved"):
        beam(grid_1d(64, 0.5), 0.9)


def test_field_shape_checked():
    with pytest.raises(ConfigurationError):
        pwe.ComplexField(np.zeros(10), grid_1d(16, 1.0))


# propagator ---------------------------------------------------------------


def test_propagator_properties():
    k = np.linspace(-50, 50, 101)
    c = pwe.spectral_propagator(k, 0.7, 100.0)
    assert pwe.spectral_propagator(0.0, 0.7, 100.0) == 1.0
    assert np.allclose(np.abs(c), 1.0, atol=1e-15)
    c2 = pwe.spectral_propagator(k, 1.4, 100.0)
    assert np.allclose(c * c, c2, atol=1e-12)


@settings(max_examples=25)
@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_propagator_semigroup(dz1, dz2):
    k = np.linspace(-20, 20, 41)
    prod = pwe.spectral_propagator(k, dz1, 50.0) * pwe.spectral_propagator(k, dz2, 50.0)
    assert np.allclose(prod, pwe.spectral_propagator(k, dz1 + dz2, 50.0), atol=1e-12)


def test_free_space_norm_conserved():
    g = grid_1d()
    u0 = beam(g)
    res = pwe.propagate(u0, pwe.PropagationConfig(F, 0.5, 100), sample_every=100)
    assert abs(res.samples[-1].norm() - u0.norm()) / u0.norm() < 1e-10


def test_free_space_norm_conserved_in_3d():
    g = pwe.TransverseGrid.centered((64, 64), 0.1)
    u0 = beam(g, 0.5)
    u = u0
    for _ in range(20):
        u = pwe.step(u, 1.0, 0.5, medium.wavenumber(F))
    assert abs(u.norm() - u0.norm()) / u0.norm() < 1e-10
    assert u.current_range == pytest.approx(10.0)


def test_one_double_step_equals_two_steps_in_free_space():
    g = grid_1d()
    k0 = medium.wavenumber(F)
    u0 = beam(g)
    two = pwe.step(pwe.step(u0, 1.0, 0.3, k0), 1.0, 0.3, k0)
    one = pwe.step(u0, 1.0, 0.6, k0)
    assert np.max(np.abs(two.amplitude - one.amplitude)) < 1e-12


@settings(max_examples=20)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_step_is_linear(a, b):
    g = grid_1d(128, 0.05)
    k0 = medium.wavenumber(F)
    u = beam(g, 0.5)
    v = beam(g, 0.3, (1.0,))
    n = 1.0 + 1e-4 - 1e-6j
    lhs = pwe.step(pwe.ComplexField(a * u.amplitude + b * v.amplitude, g), n, 0.5, k0)
    rhs = a * pwe.step(u, n, 0.5, k0).amplitude + b * pwe.step(v, n, 0.5, k0).amplitude
    assert np.allclose(lhs.amplitude, rhs, atol=1e-12)


def test_lossy_slope_matches_plane_wave_attenuation():
    g = grid_1d(256, 0.05)
    n = 1.0 + 1e-5 - 1e-7j
    cfg_kw = dict(frequency=F, step_dz=2.0, n_steps=600)
    wet = pwe.propagate(beam(g, 1.0), pwe.PropagationConfig(refractive_index=n, **cfg_kw))
    dry = pwe.propagate(beam(g, 1.0), pwe.PropagationConfig(**cfg_kw))
    got = pwe.extract_specific_attenuation(wet.probe_ranges, wet.probe_values, dry.probe_values)
    expect = medium.paraxial_attenuation_db_per_km(n * n, F)
    assert got == pytest.approx(expect, rel=0.01)


def test_beam_spreads_like_gaussian_optics():
    w0 = 0.5
    g = grid_1d(2048, 0.01)
    zr = pwe.rayleigh_range(w0, F)
    n_steps = 200
    res = pwe.propagate(beam(g, w0), pwe.PropagationConfig(F, 2 * zr / n_steps, n_steps), sample_every=n_steps)
    assert pwe.measured_beam_radius(res.samples[0]) == pytest.approx(w0, rel=1e-3)
    assert pwe.measured_beam_radius(res.samples[-1]) == pytest.approx(pwe.beam_radius(w0, F, 2 * zr), rel=0.01)
    assert pwe.beam_radius(w0, F, 2 * zr) == pytest.approx(w0 * math.sqrt(5))


def test_near_field_range():
    assert pwe.near_field_range(0.01, F) == 100.0
    w0 = 2.0
    assert pwe.near_field_range(w0, F) == pytest.approx(10 * pwe.rayleigh_range(w0, F))


# propagate bookkeeping ---------------------------------------------------------


def test_zero_steps_returns_source():
    u0 = beam(grid_1d())
    res = pwe.propagate(u0, pwe.PropagationConfig(F, 1.0, 0))
    assert len(res.samples) == 1
    assert np.array_equal(res.samples[0].amplitude, u0.amplitude)
    assert res.probe_ranges.tolist() == [0.0]
    assert res.probe_values[0] == 1.0


def test_sampling_does_not_change_the_march():
    u0 = beam(grid_1d())
    cfg = pwe.PropagationConfig(F, 0.5, 40, absorber_width=0.1, refractive_index=1 + 1e-5 - 1e-7j)
    a = pwe.propagate(u0, cfg, sample_every=0)
    b = pwe.propagate(u0, cfg, sample_every=7)
    assert np.array_equal(a.probe_values, b.probe_values)
    assert [s.current_range for s in b.samples] == [0.0, 3.5, 7.0, 10.5, 14.0, 17.5]


def test_propagate_matches_repeated_step():
    g = grid_1d(128, 0.05)
    n = 1 + 2e-5 - 1e-7j
    cfg = pwe.PropagationConfig(F, 0.5, 10, absorber_width=0.1, refractive_index=n)
    res = pwe.propagate(beam(g), cfg, sample_every=10)
    taper = pwe.absorber_taper(g, 0.1)
    u = beam(g)
    for _ in range(10):
        u = pwe.step(u, n, 0.5, cfg.k0, taper)
    assert np.allclose(res.samples[-1].amplitude, u.amplitude, atol=1e-14)


def test_invalid_propagation_config():
    with pytest.raises(ConfigurationError):
        pwe.PropagationConfig(F, 0.0, 10)
    with pytest.raises(ConfigurationError):
        pwe.PropagationConfig(F, 1.0, -1)
    with pytest.raises(ConfigurationError):
        pwe.PropagationConfig(F, 1.0, 10, absorber_width=0.5)


def test_profile_shape_mismatch():
    g = grid_1d(64, 0.1)
    with pytest.raises(ConfigurationError):
        pwe.propagate(beam(g), pwe.PropagationConfig(F, 1.0, 2, refractive_index=np.ones(32)))


def test_non_finite_field_reported():
    g = grid_1d(64, 0.1)
    u = pwe.ComplexField(np.full(64, np.nan), g)
    with pytest.raises(NumericalError):
        pwe.step(u, 1.0, 1.0, 100.0)


# absorber -------------------------------------------------------------------


def test_absorber_taper_shape():
    g = grid_1d(256, 0.1)
    t = pwe.absorber_taper(g, 0.15)
    assert t[0] < 1e-3 and t[-1] < 1e-3
    assert np.all(t[60:196] == 1.0)
    assert np.all((t >= 0) & (t <= 1))
    assert pwe.absorber_taper(g, 0.0) is None


def test_absorber_keeps_boundary_quiet():
    g = grid_1d(256, 0.02)
    w0 = 0.1
    cfg = pwe.PropagationConfig(F, 0.5, 400, absorber_width=0.15)
    res = pwe.propagate(beam(g, w0), cfg, sample_every=50)
    for s in res.samples[1:]:
        edge = np.abs(s.amplitude[[0, -1]]).max()
        assert edge < 1e-3 * np.abs(s.amplitude).max()


# attenuation extraction -------------------------------------------------------


def test_identical_runs_give_zero_attenuation():
    r = np.linspace(0, 2000, 201)
    v = np.exp(-r / 5000) * (1 + 0.1j)
    assert pwe.extract_specific_attenuation(r, v, v) == 0.0


def test_synthetic_decay_recovered():
    r = np.linspace(0, 3000, 301)
    gamma = 0.37  # dB/km
    ref_v = 1.0 / np.sqrt(1 + r / 100)
    wet = ref_v * 10 ** (-gamma * r / 1e3 / 20)
    assert pwe.extract_specific_attenuation(r, wet, ref_v, fit_start=500) == pytest.approx(gamma, abs=1e-6)


def test_short_fit_span_rejected():
    r = np.linspace(0, 900, 91)
    v = np.ones_like(r)
    with pytest.raises(ConfigurationError):
        pwe.extract_specific_attenuation(r, v, v)


def test_curved_ratio_rejected():
    r = np.linspace(0, 2000, 201)
    ref_v = np.ones_like(r)
    wet = 10 ** (-((r / 1e3) ** 2) * 5 / 20)
    with pytest.raises(NumericalError, match="residual"):
        pwe.extract_specific_attenuation(r, wet, ref_v)


def test_write_probe_csv(tmp_path):
    res = pwe.propagate(beam(grid_1d(64, 0.1)), pwe.PropagationConfig(F, 1.0, 3))
    path = tmp_path / "probe.csv"
    pwe.write_probe_csv(path, res)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["range", "re", "im", "magnitude_db"]
    assert len(rows) == 5
    assert float(rows[1][3]) == 0.0
