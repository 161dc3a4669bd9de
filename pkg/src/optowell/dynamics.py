"""Norm-conserving wavefunction propagation.

Two propagators are provided.  ``evolve`` is a Strang-split step
(half potential, full kinetic in the Fourier representation, half
potential) valid for any, possibly time-dependent, sampled potential.
``evolve_eigen`` expands the state in a precomputed eigenbasis and
advances phases exactly; for a static potential it is exact for
arbitrarily long times and is what the measurement protocols use, since
pulse intervals span hundreds of oscillator periods.

The spectral kinetic term treats the box as periodic, which is valid
while the boundary amplitudes stay negligible; a warning is emitted when
they do not.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from optowell.grids import Grid
from optowell.potential import SystemParams, potential_on_grid
from optowell.spectrum import EigenSolution, solve_stationary

__all__ = [
    "WaveState",
    "RampSchedule",
    "evolve",
    "evolve_eigen",
    "expectation_position",
    "expectation_energy",
    "position_variance",
    "ramp_evolve",
    "BOUNDARY_AMPLITUDE_TOL",
]

BOUNDARY_AMPLITUDE_TOL = 1e-6


@dataclass(frozen=True)
class WaveState:
    """Complex wavefunction samples on a grid at a given time."""

    psi: np.ndarray
    time: float
    grid: Grid

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.psi) ** 2) * self.grid.h))

    def normalized(self) -> "WaveState":
        return replace(self, psi=self.psi / self.norm())

    def boundary_amplitude(self) -> float:
        return float(max(abs(self.psi[0]), abs(self.psi[-1])))


def from_vector(vec: np.ndarray, grid: Grid, time: float = 0.0) -> WaveState:
    """Wrap a (real or complex) grid vector as a normalized WaveState."""
    state = WaveState(psi=np.asarray(vec, dtype=complex), time=time, grid=grid)
    return state.normalized()


def _wavenumbers(grid: Grid) -> np.ndarray:
    return 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.h)


def _check_boundary(state: WaveState) -> None:
    amp = state.boundary_amplitude()
    if amp > BOUNDARY_AMPLITUDE_TOL:
        warnings.warn(
            f"boundary amplitude {amp:.2e} exceeds {BOUNDARY_AMPLITUDE_TOL:.0e}; "
            "box too small for this state",
            stacklevel=3,
        )


def evolve(state: WaveState, potential: np.ndarray, dt: float, n_steps: int) -> WaveState:
    """Advance n_steps Strang-split steps of size dt under a static potential."""
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (state.grid.n,):
        raise ValueError("potential not sampled on the state's grid")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    _check_boundary(state)
    k = _wavenumbers(state.grid)
    half_v = np.exp(-0.5j * dt * potential)
    kin = np.exp(-0.5j * dt * k**2)
    psi = state.psi.astype(complex)
    for _ in range(n_steps):
        psi = half_v * psi
        psi = np.fft.ifft(kin * np.fft.fft(psi))
        psi = half_v * psi
    out = WaveState(psi=psi, time=state.time + n_steps * dt, grid=state.grid)
    _check_boundary(out)
    return out


def evolve_eigen(state: WaveState, eig: EigenSolution, t: float, leak_tol: float = 1e-6) -> WaveState:
    """Advance time t exactly in the eigenbasis of a static potential.

    The state must be representable in the provided basis; the norm lost
    to truncation (leak) is checked against leak_tol.
    """
    if eig.grid != state.grid:
        raise ValueError("eigenbasis and state live on different grids")
    coeff = (eig.states.T * state.grid.h) @ state.psi
    leak = 1.0 - float(np.sum(np.abs(coeff) ** 2))
    if leak > leak_tol:
        warnings.warn(
            f"eigenbasis propagation leaks {leak:.2e} of the norm; "
            "increase n_states or use the split-operator propagator",
            stacklevel=2,
        )
    psi = eig.states @ (np.exp(-1j * eig.energies * t) * coeff)
    return WaveState(psi=psi, time=state.time + t, grid=state.grid)


def expectation_position(state: WaveState) -> float:
    """Trapezoidal quadrature of x |psi|^2."""
    x = state.grid.nodes()
    f = x * np.abs(state.psi) ** 2
    return float((np.sum(f) - 0.5 * (f[0] + f[-1])) * state.grid.h)


def position_variance(state: WaveState) -> float:
    x = state.grid.nodes()
    p = np.abs(state.psi) ** 2
    h = state.grid.h
    mean = float((np.sum(x * p) - 0.5 * (x[0] * p[0] + x[-1] * p[-1])) * h)
    f = (x - mean) ** 2 * p
    return float((np.sum(f) - 0.5 * (f[0] + f[-1])) * h)


def expectation_energy(state: WaveState, potential: np.ndarray) -> float:
    """<p^2>/2 via the spectral derivative plus the quadrature of U |psi|^2."""
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (state.grid.n,):
        raise ValueError("potential not sampled on the state's grid")
    k = _wavenumbers(state.grid)
    psi_k = np.fft.fft(state.psi)
    kinetic = float(np.sum(0.5 * k**2 * np.abs(psi_k) ** 2) * state.grid.h / state.grid.n)
    f = potential * np.abs(state.psi) ** 2
    pot = float((np.sum(f) - 0.5 * (f[0] + f[-1])) * state.grid.h)
    return kinetic + pot


@dataclass(frozen=True)
class RampSchedule:
    """Pump ramp eta(t) over a fixed duration (linear or smoothstep).

    duration = 0 is the sudden quench: no evolution, the final potential
    simply replaces the initial one.
    """

    eta_start: float
    eta_end: float
    duration: float
    shape: str = "linear"

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        if self.eta_start < 0 or self.eta_end < 0:
            raise ValueError("pump rates must be >= 0")
        if self.shape not in ("linear", "smoothstep"):
            raise ValueError(f"unknown ramp shape {self.shape!r}")

    def eta_at(self, t: float) -> float:
        s = min(max(t / self.duration, 0.0), 1.0) if self.duration > 0 else 1.0
        if self.shape == "smoothstep":
            s = s * s * (3 - 2 * s)
        return self.eta_start + (self.eta_end - self.eta_start) * s


def ramp_evolve(
    state: WaveState,
    params: SystemParams,
    schedule: RampSchedule,
    dt: float,
) -> tuple[WaveState, float]:
    """Propagate while the pump follows the schedule; report adiabaticity.

    The potential is rebuilt each step at the midpoint pump rate.
    Adiabaticity is the squared overlap of the final state with the
    ground state of the final potential; low values are reported, not
    raised.
    """
    grid = state.grid
    k = _wavenumbers(grid)
    kin = np.exp(-0.5j * dt * k**2)
    psi = state.psi.astype(complex)
    t = 0.0
    if schedule.duration > 0:
        n_steps = max(1, math.ceil(schedule.duration / dt))
        dt_eff = schedule.duration / n_steps
        kin = np.exp(-0.5j * dt_eff * k**2)
        for i in range(n_steps):
            eta_mid = schedule.eta_at((i + 0.5) * dt_eff)
            u = potential_on_grid(params.replace_eta(eta_mid), grid)
            half_v = np.exp(-0.5j * dt_eff * u)
            psi = half_v * np.fft.ifft(kin * np.fft.fft(half_v * psi))
        t = schedule.duration
    final = WaveState(psi=psi, time=state.time + t, grid=grid)
    _check_boundary(final)
    u_end = potential_on_grid(params.replace_eta(schedule.eta_end), grid)
    ground = solve_stationary(u_end, grid, 2).states[:, 0]
    overlap = np.sum(ground * final.psi) * grid.h
    return final, float(abs(overlap) ** 2)
