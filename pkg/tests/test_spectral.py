import math

import numpy as np
import pytest

from _shared import KAPPA, T_FINAL, solution_run
from nsverify import spectral
from nsverify.analysis import compute_inertial, leray_remainder_exact
from nsverify.flows import make_abc, make_general_family, make_phase_locked, make_taylor, reference_inertial
from nsverify.spectral import (
    TOLERANCES, GridField, SpectralState, SpectralTolerances, deviation_probe, evolve,
    evolve_flow, grid_coords, grid_sample, leray_project, load_checkpoint,
    sample_polys, save_checkpoint, spectral_divergence,
)

SQ3_2 = math.sqrt(3) / 2


def _field(polys, n=32, alpha=1.0):
    return GridField(sample_polys(polys, n, alpha), alpha, KAPPA, 0.0)


def _random_band_limited(n, rng, kmax=4):
    hat = np.zeros((3, n, n, n // 2 + 1), complex)
    sl = (slice(None), slice(0, kmax), slice(0, kmax), slice(0, kmax))
    hat[sl] = rng.normal(size=hat[sl].shape) + 1j * rng.normal(size=hat[sl].shape)
    data = np.fft.irfftn(hat, s=(n, n, n), axes=(-3, -2, -1))
    return GridField(data / np.max(np.abs(data)), 1.0, KAPPA, 0.0)


# --- grid fields ------------------------------------------------------------

def test_gridfield_validation():
    with pytest.raises(ValueError):
        GridField(np.zeros((3, 4, 4, 4)), 1.0, 0.1, 0.0)
    with pytest.raises(ValueError):
        GridField(np.zeros((2, 8, 8, 8)), 1.0, 0.1, 0.0)


def test_grid_coords():
    x = grid_coords(8, 2.0)
    assert np.isclose(x[0][1, 0, 0] - x[0][0, 0, 0], 2 * math.pi / (2.0 * 8))
    assert x[2][0, 0, 7] < 2 * math.pi / 2.0


def test_grid_sample_solution():
    v = grid_sample(make_phase_locked(), 32, 0.0, 1.0, KAPPA)
    assert np.max(np.abs(spectral_divergence(v))) <= 1e-12
    assert np.allclose(v.data[:, 0, 0, 0], -SQ3_2, rtol=0, atol=1e-15)
    t = 200.0
    late = grid_sample(make_phase_locked(), 32, t, 1.0, KAPPA)
    assert late.norm() <= math.exp(-3 * KAPPA * t) * v.norm() + 1e-12


def test_parseval_diagnostics_match_grid():
    v = grid_sample(make_abc(1, 2, 3), 16, 0.0, math.pi, KAPPA)
    st = SpectralState.from_grid(v)
    assert math.isclose(st.wn.inner(st.hat, st.hat) / 2, v.energy(), rel_tol=1e-13)
    assert math.isclose(v.energy(), (1 + 4 + 9) / 2, rel_tol=1e-13)


# --- projector --------------------------------------------------------------

def test_leray_on_solution_inertial_term():
    g = _field(reference_inertial())
    u = leray_project(g)
    assert u.max_abs() <= 1e-12 * g.max_abs()


def test_leray_off_condition_matches_exact_remainder():
    gp = compute_inertial(make_general_family((0, 0, 0)).profiles)
    g = _field(gp)
    u = leray_project(g)
    exact = _field(leray_remainder_exact(gp))
    assert exact.max_abs() >= 1e-3 * g.max_abs()
    assert u.max_abs() >= 1e-3 * g.max_abs()
    assert np.max(np.abs(u.data - exact.data)) <= 1e-12 * g.max_abs()


def test_leray_annihilates_gradients():
    rng = np.random.default_rng(3)
    n = 16
    phi = _random_band_limited(n, rng).data[0]
    wn = spectral.wavenumbers(n, 1.0)
    grad = np.fft.irfftn(wn.ik * np.fft.rfftn(phi)[None], s=(n, n, n), axes=(-3, -2, -1))
    u = leray_project(GridField(grad, 1.0, KAPPA, 0.0))
    assert u.max_abs() <= 1e-12 * max(1.0, np.max(np.abs(grad)))


def test_leray_idempotent_and_solenoidal():
    rng = np.random.default_rng(11)
    f = _random_band_limited(16, rng)
    once = leray_project(f)
    twice = leray_project(once)
    assert np.max(np.abs(twice.data - once.data)) <= 1e-13
    assert np.max(np.abs(spectral_divergence(once))) <= TOLERANCES.divergence


def test_leray_keeps_mean():
    f = GridField(np.ones((3, 8, 8, 8)), 1.0, KAPPA, 0.0)
    assert np.allclose(leray_project(f).data, 1.0)


# --- evolution --------------------------------------------------------------

def test_solution_matches_closed_form():
    result, seconds = solution_run()
    assert result["l2_error"] <= TOLERANCES.trajectory
    assert max(result["errors"]) <= TOLERANCES.trajectory
    assert abs(result["energy_ratio"] - 0.25) <= 1e-5
    assert result["max_div"] <= TOLERANCES.divergence
    assert math.isclose(result["trajectory"].times[-1], T_FINAL, rel_tol=1e-12)


def test_energy_monotone():
    traj = solution_run()[0]["trajectory"]
    e = np.array(traj.energy)
    assert np.all(np.diff(e) < 0)
    # and off-condition, where the nonlinear term is active
    v0 = grid_sample(make_general_family((0, 0, 0)), 16, 0.0, 1.0, KAPPA)
    e = np.array(evolve(v0, 0.02, 2.0, KAPPA).energy)
    assert np.all(np.diff(e) < 0)


def test_helicity_decays_with_energy():
    traj = solution_run()[0]["trajectory"]
    # Beltrami: helicity = 2 sqrt(3) alpha x energy at all times
    assert np.allclose(traj.helicity, 2 * math.sqrt(3) * np.array(traj.energy), rtol=1e-10)


def test_taylor_evolution():
    T = 1.0
    res = evolve_flow(make_taylor(), n=16, dt=5e-3, T=T, kappa=KAPPA)
    assert res["l2_error"] <= 1e-6
    assert math.isclose(res["energy_ratio"], math.exp(-4 * math.pi ** 2 * KAPPA * T), rel_tol=1e-10)
    assert np.max(np.abs(res["trajectory"].final().data[2])) == 0.0


@pytest.mark.parametrize("make", [make_phase_locked, make_taylor, make_abc])
def test_resolution_independence(make):
    flow = make()
    a = evolve_flow(flow, n=16, dt=5e-3, T=0.25, kappa=KAPPA)["trajectory"].final()
    b = evolve_flow(flow, n=32, dt=5e-3, T=0.25, kappa=KAPPA)["trajectory"].final()
    assert np.max(np.abs(b.data[:, ::2, ::2, ::2] - a.data)) <= 1e-10


def test_fourth_order_in_time_off_condition():
    # the phase-locked run is exact up to round-off, so the order is measured
    # where the nonlinear term is active
    v0 = grid_sample(make_general_family((0, 0, 0)), 16, 0.0, 1.0, KAPPA)
    T = 0.8
    ref = evolve(v0, T / 256, T, KAPPA).final().data
    errs = [np.sqrt(np.mean((evolve(v0, dt, T, KAPPA).final().data - ref) ** 2)) for dt in (0.05, 0.025)]
    assert 12 <= errs[0] / errs[1] <= 20


def test_zero_final_time():
    res = evolve_flow(make_phase_locked(), n=16, T=0.0)
    assert len(res["trajectory"].times) == 1
    assert res["l2_error"] <= 1e-15 and res["errors"] == [pytest.approx(0, abs=1e-15)]


def test_cfl_guard():
    v0 = grid_sample(make_phase_locked(), 16, 0.0, 1.0, KAPPA)
    with pytest.raises(spectral.CFLError):
        evolve(v0, 1.0, 2.0, KAPPA)


def test_instability_detector_reports_diagnostics():
    # any energy change beyond a negative budget counts as growth here
    v0 = grid_sample(make_phase_locked(), 8, 0.0, 1.0, KAPPA)
    strict = SpectralTolerances(energy_growth=-1e-3)
    with pytest.raises(spectral.InstabilityError) as info:
        evolve(v0, 1e-3, 0.01, 1e-6, tol=strict)
    assert {"step", "t", "energy", "previous_energy", "max_div"} <= set(info.value.diagnostics)


def test_observer_sees_every_step():
    seen = []
    v0 = grid_sample(make_phase_locked(), 8, 0.0, 1.0, KAPPA)
    evolve(v0, 0.1, 0.5, KAPPA, observer=lambda t, s: seen.append(t))
    assert np.allclose(seen, np.linspace(0, 0.5, 6))


# --- deviation probe --------------------------------------------------------

def test_deviation_on_condition_stays_small():
    curve = deviation_probe(make_phase_locked(), 5e-3, T_FINAL, KAPPA, n=16)
    assert curve.deviation.max() <= 1e-6


def test_deviation_off_condition():
    curve = deviation_probe(make_general_family((0, 0, 0)), 5e-3, T_FINAL, KAPPA, n=16)
    assert curve.deviation[-1] > 1e-3
    assert curve.exact_initial_slope > 0
    assert abs(curve.initial_slope() - curve.exact_initial_slope) <= 0.1 * curve.exact_initial_slope


def test_deviation_shrinks_with_viscosity():
    flow = make_general_family((0, 0, 0))
    finals = [deviation_probe(flow, 5e-3, 1.0, k, n=16).deviation[-1] for k in (0.05, 1.0, 10.0)]
    assert finals[0] > finals[1] > finals[2]


# --- checkpoints ------------------------------------------------------------

def test_checkpoint_roundtrip(tmp_path):
    f = grid_sample(make_abc(1, 2, 3), 8, 0.3, math.pi, 0.07)
    path = tmp_path / "state.bin"
    save_checkpoint(path, f)
    raw = path.read_bytes()
    assert len(raw) == 8 + 8 + 3 * 8 + 3 * 8 ** 3 * 8
    g = load_checkpoint(path)
    assert (g.n, g.alpha, g.kappa, g.t) == (8, math.pi, 0.07, 0.3)
    assert np.array_equal(g.data, f.data)
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        load_checkpoint(path)
    path.write_bytes(b"garbage!" + raw[8:])
    with pytest.raises(ValueError):
        load_checkpoint(path)
