import math

import numpy as np
import pytest

import wavelab as w


def test_rarefaction_fan_midpoint():
    r = w.RiemannData(-1.0, 1.0)
    assert w.exact_rarefaction(r, 2.0, 1.0) == pytest.approx(0.5)
    value, slope = w.approx_rarefaction(r, 1.0, 0.0)
    assert value == pytest.approx(0.0, abs=1e-14)
    assert slope > 0.0


def test_noise_constraint_raises_value_error():
    w.NoiseParams(0.2, 0.3)
    with pytest.raises(ValueError, match="sigma"):
        w.NoiseParams(0.2, 0.7)


def test_field_roundtrip_and_norm():
    g = w.Grid.symmetric(5.0, 11)
    f = w.Field(g, g.points())
    np.testing.assert_allclose(f.values, np.linspace(-5.0, 5.0, 11))
    assert w.lp_norm(f, w.inf) == 5.0


def test_cole_hopf_matches_fd_on_interior():
    r = w.RiemannData(-1.0, 1.0)
    init = w.arctan_initial_data(r)
    g = w.Grid.symmetric(21.0, 2048)
    u0 = w.Field(g, [w.approx_rarefaction_initial(r, x) for x in g.points()])
    u = w.fd_viscous_solve(u0, 0.05, 1.0, w.stable_time_step(g, 1.0))
    x = g.points()
    inner = np.abs(x) <= 10.5
    ref = np.array([w.cole_hopf_solve(init, 0.05, 1.0, xi) for xi in x[inner]])
    assert np.max(np.abs(u.values[inner] - ref)) < 5e-3


def test_simulate_path_is_deterministic_per_seed():
    r = w.RiemannData(-1.0, 1.0)
    g = w.Grid.symmetric(10.0, 256)
    u0 = w.Field(g, [w.approx_rarefaction_initial(r, x) for x in g.points()])
    noise = w.NoiseParams(0.2, 0.3)
    dt = w.admissible_time_step(g, 1.0, noise, w.Scheme.euler_maruyama)
    a = w.simulate_path(u0, noise, r, w.Scheme.euler_maruyama, 0.5, dt, 7, [0.5])
    b = w.simulate_path(u0, noise, r, w.Scheme.euler_maruyama, 0.5, dt, 7, [0.5])
    c = w.simulate_path(u0, noise, r, w.Scheme.euler_maruyama, 0.5, dt, 8, [0.5])
    assert np.array_equal(a[0][1].values, b[0][1].values)
    assert not np.array_equal(a[0][1].values, c[0][1].values)


def test_shock_quadrature_limit_and_zero():
    p = w.ShockProfileParams(1.0, 0.1)
    d, tail = w.shock_instability_quadrature(p, 1.0, [0.0, 1.0, 1e4])
    assert d[0] == 0.0
    assert d[2] >= 0.99 * 2.0
    assert tail < 1e-30
    assert w.shock_shift_gap(p, 0.7) == pytest.approx(w.shock_shift_gap_numeric(p, 0.7), abs=1e-12)


def test_witness_peaks_follow_target_power():
    wit = w.area_witness(1.0, 0.1, 1.0, 6)
    for pk in wit.peaks:
        assert pk.peak == pytest.approx((1.0 + pk.t) ** (-0.6), rel=1e-9)
    assert math.isfinite(wit.integral())


def test_library_errors_map_to_python():
    with pytest.raises(ValueError):
        w.Grid(0.0, 1.0, 2)
