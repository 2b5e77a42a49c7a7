"""Smoke tests for the python bindings: build a field, run the kernel both
ways, integrate a short trajectory, and check a few frozen numbers."""

import math

import numpy as np
import pytest

try:
    import landau
except ImportError:
    import _landau as landau


@pytest.fixture
def grid():
    return landau.PhaseGrid(landau.SpatialGrid(0, 1, 1.0), landau.VelocityGrid(10, 3.0))


def test_maxwellian_mass(grid):
    f = landau.make_maxwellian(grid, 1.0, 1.0)
    mass = landau.weighted_lp_norm(f, 1.0, 0.0)
    assert mass == pytest.approx(math.pi ** 1.5, rel=1e-3)
    assert landau.weighted_sup_norm(f, 0.0) == pytest.approx(f.max_abs())


def test_fast_matches_direct(grid):
    vg = grid.velocity
    rng = np.random.default_rng(7)
    f = rng.random(vg.size)
    kernel = landau.CollisionKernel.standard(-2.0)
    direct = landau.compute_coefficients_direct(f, vg, kernel)
    fast = landau.compute_coefficients_fast(f, vg, kernel)
    for da, fa in zip(direct.a, fast.a):
        scale = np.abs(da).max()
        assert np.abs(fa - da).max() <= 1e-10 * scale
    spec = landau.ellipticity_spectrum(fast)
    assert spec.psd_violations == 0


def test_short_run_conserves_mass(grid):
    f = landau.make_maxwellian(grid, 1.0, 1.0)
    cfg = landau.SolverConfig()
    cfg.gamma = -1.0
    cfg.dt = 1e-4
    cfg.t_end = 10 * cfg.dt
    cfg.diag_every = 2
    cfg.positivity = landau.PositivityMode.off
    cfg.diag_holder = False
    cfg.diag_ellipticity = False
    traj = landau.run_simulation(f, cfg)
    assert traj.status == landau.RunStatus.completed
    m0 = traj.rows[0].mass_max_x
    for row in traj.rows:
        assert abs(row.mass_max_x - m0) / m0 <= 1e-12
        assert row.psi > 0


def test_schauder_frozen_values():
    e = landau.schauder_exponents(0.5, -2.0, 30.0, 10.0)
    assert e.p_alpha == pytest.approx(28.0 / 3.0, abs=1e-14)
    assert e.time_exponent == pytest.approx(1.0 / 22.0, abs=1e-16)
    assert e.q == pytest.approx(73.0 / 33.0, abs=1e-12)


def test_config_validation():
    ok = landau.parse_config("gamma = -1\nt_end = 0.1\n")
    assert ok.ok
    bad = landau.parse_config("gamma = 0.5\nt_end = 0.1\nunknown_key = 1\n")
    assert not bad.ok
    assert len(bad.errors) >= 2


def test_snapshot_roundtrip(tmp_path, grid):
    f = landau.make_maxwellian(grid, 2.0, 0.5)
    f.time = 0.125
    path = str(tmp_path / "f.lndf")
    landau.write_snapshot(path, f)
    back = landau.read_snapshot(path)
    assert back.time == 0.125
    assert np.array_equal(back.values, f.values)
