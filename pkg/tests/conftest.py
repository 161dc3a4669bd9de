"""Shared fixtures: the reference double-well operating point, solved once."""

from __future__ import annotations

import numpy as np
import pytest

from optowell import (
    Grid,
    SystemParams,
    auto_grid,
    potential_on_grid,
    solve_stationary,
)

# Reference operating point: quadratic coupling -2e-4, linewidth 10, zero
# detuning, pump 176.785 (just above the double-well threshold ~176.7767).
REF = SystemParams(g2=-2e-4, eta=176.785, delta_c=0.0, kappa=10.0)


@pytest.fixture(scope="session")
def ref_params() -> SystemParams:
    return REF


@pytest.fixture(scope="session")
def ref_grid() -> Grid:
    return auto_grid(REF)


@pytest.fixture(scope="session")
def ref_potential(ref_grid) -> np.ndarray:
    return potential_on_grid(REF, ref_grid)


@pytest.fixture(scope="session")
def ref_eig(ref_potential, ref_grid):
    """Large basis shared by spectrum, dynamics and measurement tests."""
    return solve_stationary(ref_potential, ref_grid, 96)


@pytest.fixture(scope="session")
def harmonic_grid() -> Grid:
    return Grid.symmetric(10.0, 2048)


@pytest.fixture(scope="session")
def harmonic_eig(harmonic_grid):
    x = harmonic_grid.nodes()
    return solve_stationary(0.5 * x * x, harmonic_grid, 6)
