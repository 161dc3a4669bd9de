"""Sweeps: threshold crossing, monotone geometry, splitting decay, margins."""

from __future__ import annotations

import math

import numpy as np
import pytest

from optowell import (
    SweepSpec,
    SystemParams,
    auto_grid,
    decoherence_margin,
    potential_on_grid,
    run_sweep,
    solve_stationary,
    threshold_eta,
    tunneling_rate,
)

BASE = SystemParams(g2=-2e-4, eta=176.785, delta_c=0.0, kappa=10.0)


def eta_sweep(values, outputs=None):
    kw = {} if outputs is None else {"outputs": outputs}
    return SweepSpec(base=BASE, swept_field="eta", values=tuple(values), **kw)


def test_spec_validation():
    with pytest.raises(ValueError, match="monotone"):
        eta_sweep([1.0, 3.0, 2.0])
    with pytest.raises(ValueError, match="at least one"):
        eta_sweep([])
    with pytest.raises(ValueError, match="swept_field"):
        SweepSpec(base=BASE, swept_field="power", values=(1.0,))
    with pytest.raises(ValueError, match="columns"):
        eta_sweep([1.0], outputs=("swept", "banana"))


def test_threshold_crossing_flags():
    star = threshold_eta(BASE.g2, BASE.kappa)
    rows = run_sweep(eta_sweep([star - 0.01, star - 0.001, star + 0.005, star + 0.01]))
    assert [r.J_flag for r in rows] == ["single_well", "single_well", "ok", "ok"]
    assert rows[0].x_min is None and rows[0].J is None
    assert rows[2].x_min is not None and rows[3].x_min > rows[2].x_min


def test_x_min_strictly_increasing_above_threshold():
    rows = run_sweep(eta_sweep(np.linspace(176.778, 176.84, 12)))
    x_mins = [r.x_min for r in rows]
    assert all(b > a for a, b in zip(x_mins, x_mins[1:]))


def test_splitting_decreases_and_flags_deep_wells():
    rows = run_sweep(eta_sweep([176.780, 176.790, 176.800, 176.820, 176.840]))
    js = [r.J for r in rows]
    assert js[0] > js[1] > js[2]
    # deep wells drop below the resolution floor and carry no number
    assert rows[-1].J_flag == "below_resolution"
    assert rows[-1].J is None


def test_single_point_consistent_with_modules():
    rows = run_sweep(eta_sweep([176.785]))
    row = rows[0]
    grid = auto_grid(BASE)
    eig = solve_stationary(potential_on_grid(BASE, grid), grid, 2)
    assert row.J == pytest.approx(tunneling_rate(eig), rel=1e-9)
    assert row.x_min == pytest.approx(15.56699665, abs=1e-6)
    assert row.E_b == pytest.approx(0.0075896117, abs=1e-9)
    assert row.ratio == pytest.approx(row.E_b / row.E_ground, rel=1e-12)
    assert row.E1_absolute == pytest.approx(float(eig.energies[0]), abs=1e-12)


def test_ratio_crosses_one():
    rows = run_sweep(eta_sweep(np.linspace(176.777, 176.80, 10)))
    ratios = [r.ratio for r in rows if r.ratio is not None]
    assert ratios[0] < 1
    assert ratios[-1] > 1
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_geometry_only_sweep_skips_eigensolve():
    rows = run_sweep(eta_sweep([176.785], outputs=("swept", "D", "x_min", "E_b")))
    assert rows[0].J is None and rows[0].E_ground is None
    assert rows[0].x_min is not None


def test_rows_deterministic_and_ordered():
    values = list(np.linspace(176.778, 176.81, 8))
    a = run_sweep(eta_sweep(values), threads=1)
    b = run_sweep(eta_sweep(values), threads=4)
    assert [r.swept for r in a] == values
    assert a == b


def test_log_splitting_near_linear_tail():
    rows = run_sweep(eta_sweep(np.linspace(176.788, 176.812, 13)))
    ok = [(r.swept, r.J) for r in rows if r.J_flag == "ok"]
    xs = np.array([v for v, _ in ok])
    ys = np.log([j for _, j in ok])
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    r2 = 1 - np.sum((ys - pred) ** 2) / np.sum((ys - ys.mean()) ** 2)
    assert slope < 0
    assert r2 >= 0.98


def test_decoherence_margin():
    # a 100 Hz splitting against omega_M/Q = 0.5 1/s
    omega_m = 2 * math.pi * 5e5
    q = omega_m / 0.5
    m = decoherence_margin(100.0 / omega_m, q, omega_m)
    assert m.j_si == pytest.approx(100.0)
    assert m.margin == pytest.approx(200.0)
    assert not m.decoherence_dominated

    m2 = decoherence_margin(0.001, 1e6, omega_m)
    assert m2.margin == pytest.approx(1000.0)
    m3 = decoherence_margin(1e-7, 1e6, omega_m)
    assert m3.margin == pytest.approx(0.1)
    assert m3.decoherence_dominated
    with pytest.raises(ValueError):
        decoherence_margin(-1.0, 1e6, omega_m)
