"""Propagation: unitarity, exact limits, two-level tunneling, ramps."""

from __future__ import annotations

import numpy as np
import pytest

from optowell import (
    Grid,
    SystemParams,
    localized_states,
    potential_on_grid,
    solve_stationary,
    tunneling_rate,
)
from optowell.dynamics import (
    RampSchedule,
    WaveState,
    evolve,
    evolve_eigen,
    expectation_energy,
    expectation_position,
    position_variance,
    ramp_evolve,
)


@pytest.fixture(scope="module")
def harm():
    grid = Grid.symmetric(10.0, 1024)
    x = grid.nodes()
    u = 0.5 * x * x
    eig = solve_stationary(u, grid, 4)
    return grid, x, u, eig


def coherent_state(x: np.ndarray, x0: float) -> np.ndarray:
    return (1 / np.pi) ** 0.25 * np.exp(-((x - x0) ** 2) / 2)


def test_eigenstate_is_stationary(harm):
    grid, x, u, eig = harm
    state = WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=grid)
    out = evolve(state, u, dt=0.01, n_steps=1000)
    assert abs(expectation_position(out)) < 1e-6
    # only a phase: overlap magnitude stays 1
    ov = abs(np.sum(np.conj(state.psi) * out.psi) * grid.h)
    assert ov == pytest.approx(1.0, abs=1e-9)


def test_coherent_oscillation(harm):
    grid, x, u, _ = harm
    x0 = 2.0
    state = WaveState(psi=coherent_state(x, x0).astype(complex), time=0.0, grid=grid)
    state = state.normalized()
    dt, period = 0.005, 2 * np.pi
    n_per_probe = 100
    t = 0.0
    for _ in range(13):  # a bit over one period
        state = evolve(state, u, dt, n_per_probe)
        t += dt * n_per_probe
        assert expectation_position(state) == pytest.approx(x0 * np.cos(t), abs=1e-4)
    assert t > period


def test_norm_conservation_and_harmonic_energy_drift(harm):
    grid, x, u, eig = harm
    psi = (eig.states[:, 0] + 0.5 * eig.states[:, 2]).astype(complex)
    state = WaveState(psi=psi, time=0.0, grid=grid).normalized()
    e0 = expectation_energy(state, u)
    out = evolve(state, u, dt=0.01, n_steps=10_000)
    assert abs(out.norm() - 1.0) < 1e-6
    # unit-curvature potential: bounded Strang oscillation ~ dt^2
    assert abs(expectation_energy(out, u) - e0) < 2e-5


def test_energy_conservation_double_well(ref_params):
    grid = Grid.symmetric(50.0, 4096)
    u = potential_on_grid(ref_params, grid)
    eig = solve_stationary(u, grid, 2)
    psi_l, _ = localized_states(eig)
    state = WaveState(psi=psi_l.astype(complex), time=0.0, grid=grid)
    e0 = expectation_energy(state, u)
    out = evolve(state, u, dt=0.01, n_steps=10_000)
    assert abs(expectation_energy(out, u) - e0) < 1e-8


def test_time_reversal(harm):
    grid, x, u, _ = harm
    state = WaveState(psi=coherent_state(x, 1.3).astype(complex), time=0.0, grid=grid)
    state = state.normalized()
    fwd = evolve(state, u, dt=0.01, n_steps=500)
    # conjugation reverses the arrow of time for a real potential
    rev = WaveState(psi=np.conj(fwd.psi), time=0.0, grid=grid)
    back = evolve(rev, u, dt=0.01, n_steps=500)
    fid = abs(np.sum(state.psi * back.psi) * grid.h) ** 2
    assert fid >= 1 - 1e-8


def test_evolve_rejects_bad_input(harm):
    grid, x, u, eig = harm
    state = WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=grid)
    with pytest.raises(ValueError, match="grid"):
        evolve(state, u[:-1], dt=0.01, n_steps=1)


def test_boundary_warning():
    grid = Grid.symmetric(3.0, 256)
    x = grid.nodes()
    u = 0.5 * x * x
    psi = coherent_state(x, 2.0).astype(complex)  # tail touches the box edge
    state = WaveState(psi=psi, time=0.0, grid=grid).normalized()
    with pytest.warns(UserWarning, match="boundary"):
        evolve(state, u, dt=0.01, n_steps=1)


def test_expectation_position_parity_and_mirror(ref_eig):
    grid = ref_eig.grid
    psi1 = WaveState(psi=ref_eig.states[:, 0].astype(complex), time=0.0, grid=grid)
    assert abs(expectation_position(psi1)) < 1e-10
    psi_l, psi_r = localized_states(ref_eig)
    sl = WaveState(psi=psi_l.astype(complex), time=0.0, grid=grid)
    sr = WaveState(psi=psi_r.astype(complex), time=0.0, grid=grid)
    xl, xr = expectation_position(sl), expectation_position(sr)
    assert xl < -9  # localized well below the origin
    assert xl == pytest.approx(-xr, abs=1e-8)


def test_harmonic_ground_energy(harm):
    grid, x, u, eig = harm
    state = WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=grid)
    assert expectation_energy(state, u) == pytest.approx(0.5, abs=1e-6)


def test_eigen_propagator_matches_split(ref_eig, ref_potential):
    grid = ref_eig.grid
    psi_l, _ = localized_states(ref_eig)
    state = WaveState(psi=psi_l.astype(complex), time=0.0, grid=grid)
    t_span = 40.0
    a = evolve_eigen(state, ref_eig, t_span)
    b = evolve(state, ref_potential, dt=0.005, n_steps=8000)
    ov = abs(np.sum(np.conj(a.psi) * b.psi) * grid.h) ** 2
    assert ov >= 1 - 1e-8
    assert a.time == pytest.approx(b.time)


def test_two_level_position_trace(ref_eig, ref_potential):
    """<x>(t) follows xbar cos(Jt) for the localized doublet state."""
    grid = ref_eig.grid
    j = tunneling_rate(ref_eig)
    psi_l, psi_r = localized_states(ref_eig)
    state = WaveState(psi=psi_l.astype(complex), time=0.0, grid=grid)
    xbar = expectation_position(state)
    for frac in (0.25, 0.5, 0.75, 1.0):
        t = frac * np.pi / j
        out = evolve_eigen(state, ref_eig, t)
        assert expectation_position(out) == pytest.approx(
            xbar * np.cos(j * t), abs=0.05 * abs(xbar)
        )
    final = evolve_eigen(state, ref_eig, np.pi / j)
    ov = abs(np.sum(psi_r * final.psi) * grid.h) ** 2
    assert ov >= 0.95


def test_position_variance(harm):
    grid, x, u, eig = harm
    state = WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=grid)
    assert position_variance(state) == pytest.approx(0.5, abs=1e-4)


def test_ramp_identity_when_pump_constant(ref_params, ref_grid, ref_potential):
    eig = solve_stationary(ref_potential, ref_grid, 2)
    state = WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=ref_grid)
    sched = RampSchedule(eta_start=ref_params.eta, eta_end=ref_params.eta, duration=50.0)
    _, adi = ramp_evolve(state, ref_params, sched, dt=0.05)
    assert adi == pytest.approx(1.0, abs=1e-8)


def test_sudden_quench_is_pure_overlap(ref_params, ref_grid):
    u0 = potential_on_grid(ref_params.replace_eta(0.0), ref_grid)
    eig0 = solve_stationary(u0, ref_grid, 2)
    state = WaveState(psi=eig0.states[:, 0].astype(complex), time=0.0, grid=ref_grid)
    sched = RampSchedule(eta_start=0.0, eta_end=ref_params.eta, duration=0.0)
    out, adi = ramp_evolve(state, ref_params, sched, dt=0.05)
    assert np.array_equal(out.psi, state.psi)
    u1 = potential_on_grid(ref_params, ref_grid)
    ground = solve_stationary(u1, ref_grid, 2).states[:, 0]
    expected = abs(np.sum(ground * state.psi) * ref_grid.h) ** 2
    assert adi == pytest.approx(expected, abs=1e-12)


def test_ramp_adiabaticity_converges(ref_params, ref_grid):
    """Longer ramps approach the true double-well ground state."""
    eta0 = 176.7
    u0 = potential_on_grid(ref_params.replace_eta(eta0), ref_grid)
    eig0 = solve_stationary(u0, ref_grid, 2)
    state = WaveState(psi=eig0.states[:, 0].astype(complex), time=0.0, grid=ref_grid)
    adis = []
    for dur in (400.0, 1200.0, 2400.0):
        sched = RampSchedule(
            eta_start=eta0, eta_end=ref_params.eta, duration=dur, shape="smoothstep"
        )
        _, adi = ramp_evolve(state, ref_params, sched, dt=0.1)
        adis.append(adi)
    assert adis[0] < adis[1] < adis[2]
    assert adis[2] >= 0.99


def test_ramp_schedule_validation():
    with pytest.raises(ValueError, match="duration"):
        RampSchedule(eta_start=0.0, eta_end=1.0, duration=-1.0)
    with pytest.raises(ValueError, match="shape"):
        RampSchedule(eta_start=0.0, eta_end=1.0, duration=1.0, shape="cubic")
    s = RampSchedule(eta_start=0.0, eta_end=2.0, duration=10.0, shape="smoothstep")
    assert s.eta_at(0.0) == 0.0
    assert s.eta_at(10.0) == 2.0
    assert s.eta_at(5.0) == pytest.approx(1.0)
