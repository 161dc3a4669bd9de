"""Pulsed Gaussian position measurements and stochastic trajectories.

A pulse with uncertainty sigma applies the Gaussian Kraus operator
exp[-(x_res - x)^2 / (2 sigma^2)] and renormalizes.  The outcome x_res is
distributed according to the Born-rule marginal of the Kraus family,
which factorizes exactly into two steps: draw x from |psi|^2 (inverse
CDF on the grid), then add Gaussian noise of variance sigma^2/2.

Trajectories own independent counter-based random streams derived from
(seed, trajectory index), so ensembles reproduce bit-identically
regardless of execution order or thread count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from optowell.dynamics import (
    WaveState,
    evolve,
    evolve_eigen,
    expectation_energy,
    expectation_position,
)
from optowell.grids import Grid
from optowell.spectrum import EigenSolution, localized_states, solve_stationary

__all__ = [
    "MeasurementConfig",
    "PreparationResult",
    "TrajectoryRecord",
    "EnsembleStats",
    "ZenoRow",
    "trajectory_rng",
    "weak_measure",
    "prepare_localized",
    "run_trajectory",
    "run_ensemble",
    "zeno_scan",
]

DEFAULT_EIG_STATES = 96
LOCALIZATION_THRESHOLD = 0.9
MAX_PREP_RETRIES = 64


@dataclass(frozen=True)
class MeasurementConfig:
    """Pulse protocol: uncertainty, count, spacing, preparation, seed."""

    sigma: float
    n_pulses: int
    pulse_interval: float
    prep_sigma: float
    seed: int

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.prep_sigma > 0:
            raise ValueError(f"prep_sigma must be > 0, got {self.prep_sigma}")
        if not self.pulse_interval > 0:
            raise ValueError(f"pulse_interval must be > 0, got {self.pulse_interval}")
        if self.n_pulses < 0:
            raise ValueError(f"n_pulses must be >= 0, got {self.n_pulses}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for one trajectory of an ensemble."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def weak_measure(
    state: WaveState, sigma: float, rng: np.random.Generator
) -> tuple[float, WaveState]:
    """One Gaussian position pulse: sample an outcome, collapse, renormalize."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    x = state.grid.nodes()
    h = state.grid.h
    weights = np.abs(state.psi) ** 2 * h
    cdf = np.cumsum(weights)
    u = rng.uniform(0.0, cdf[-1])
    i = int(np.searchsorted(cdf, u))
    x_drawn = x[i] + (rng.uniform() - 0.5) * h
    x_res = x_drawn + rng.normal(0.0, sigma / math.sqrt(2))
    psi = state.psi * np.exp(-((x_res - x) ** 2) / (2 * sigma**2))
    norm_sq = float(np.sum(np.abs(psi) ** 2) * h)
    if not norm_sq > 1e-300:
        raise FloatingPointError(
            f"post-measurement norm underflowed; sigma={sigma:.3g} is too small "
            f"for grid spacing {h:.3g}"
        )
    out = WaveState(psi=psi / math.sqrt(norm_sq), time=state.time, grid=state.grid)
    return float(x_res), out


@dataclass(frozen=True)
class PreparationResult:
    side: str  # "left" or "right"
    state: WaveState
    x_res: float
    retries: int


def prepare_localized(
    state: WaveState,
    prep_sigma: float,
    rng: np.random.Generator,
    localization: float = LOCALIZATION_THRESHOLD,
    max_retries: int = MAX_PREP_RETRIES,
) -> PreparationResult:
    """Project the symmetric ground state into one well with a single pulse.

    The side is the sign of the outcome; attempts that leave less than
    ``localization`` of the probability mass on that side are discarded
    and retried from the input state with fresh randomness.
    """
    x = state.grid.nodes()
    h = state.grid.h
    for attempt in range(max_retries):
        x_res, post = weak_measure(state, prep_sigma, rng)
        side = "left" if x_res < 0 else "right"
        mass_left = float(np.sum(np.abs(post.psi[x < 0]) ** 2) * h)
        mass = mass_left if side == "left" else 1.0 - mass_left
        if mass >= localization:
            return PreparationResult(side=side, state=post, x_res=x_res, retries=attempt)
    raise RuntimeError(
        f"no {localization:.0%}-localized preparation in {max_retries} attempts; "
        f"prep_sigma={prep_sigma:.3g} is too weak for this well separation"
    )


@dataclass(frozen=True)
class TrajectoryRecord:
    """Per-pulse record of one stochastic run (all arrays share n_pulses)."""

    times: np.ndarray
    outcomes: np.ndarray
    means: np.ndarray
    energies: np.ndarray
    initial_side: str
    seed: int


def _propagator(initial, potential, eig, propagator, dt):
    if propagator == "eigen":
        basis = eig
        if basis is None:
            basis = solve_stationary(potential, initial.grid, DEFAULT_EIG_STATES)
        return lambda st, t: evolve_eigen(st, basis, t)
    if propagator == "split":
        def step(st, t):
            n_steps = max(1, math.ceil(t / dt))
            return evolve(st, potential, t / n_steps, n_steps)
        return step
    raise ValueError(f"unknown propagator {propagator!r}")


def run_trajectory(
    initial: WaveState,
    potential: np.ndarray,
    config: MeasurementConfig,
    *,
    initial_side: str | None = None,
    rng: np.random.Generator | None = None,
    eig: EigenSolution | None = None,
    propagator: str = "eigen",
    dt: float = 0.005,
) -> TrajectoryRecord:
    """Alternate free evolution over pulse_interval and a weak pulse.

    ``initial`` is a prepared (localized) state; the side defaults to the
    sign of its position expectation.  Deterministic given config.seed.
    """
    if rng is None:
        rng = trajectory_rng(config.seed, 0)
    if initial_side is None:
        initial_side = "left" if expectation_position(initial) < 0 else "right"
    advance = _propagator(initial, potential, eig, propagator, dt)
    state = initial
    times = np.empty(config.n_pulses)
    outcomes = np.empty(config.n_pulses)
    means = np.empty(config.n_pulses)
    energies = np.empty(config.n_pulses)
    for i in range(config.n_pulses):
        state = advance(state, config.pulse_interval)
        x_res, state = weak_measure(state, config.sigma, rng)
        times[i] = state.time
        outcomes[i] = x_res
        means[i] = expectation_position(state)
        energies[i] = expectation_energy(state, potential)
    return TrajectoryRecord(
        times=times,
        outcomes=outcomes,
        means=means,
        energies=energies,
        initial_side=initial_side,
        seed=config.seed,
    )


@dataclass(frozen=True)
class EnsembleStats:
    """Post-selected outcome histogram and mean trace of an ensemble."""

    n_traj: int
    n_post_selected: int
    post_selected_side: str
    histogram_pulse: int
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray
    mean_trace: np.ndarray
    times: np.ndarray
    records: tuple[TrajectoryRecord, ...]


def _one_protocol_run(
    ground: WaveState,
    potential: np.ndarray,
    config: MeasurementConfig,
    advance,
    index: int,
) -> TrajectoryRecord:
    rng = trajectory_rng(config.seed, index)
    prep = prepare_localized(ground, config.prep_sigma, rng)
    state = prep.state
    times = np.empty(config.n_pulses)
    outcomes = np.empty(config.n_pulses)
    means = np.empty(config.n_pulses)
    energies = np.empty(config.n_pulses)
    for i in range(config.n_pulses):
        state = advance(state, config.pulse_interval)
        x_res, state = weak_measure(state, config.sigma, rng)
        times[i] = state.time
        outcomes[i] = x_res
        means[i] = expectation_position(state)
        energies[i] = expectation_energy(state, potential)
    return TrajectoryRecord(
        times=times,
        outcomes=outcomes,
        means=means,
        energies=energies,
        initial_side=prep.side,
        seed=config.seed,
    )


def run_ensemble(
    potential: np.ndarray,
    grid: Grid,
    config: MeasurementConfig,
    n_traj: int,
    post_select: str,
    histogram_pulse: int,
    *,
    eig: EigenSolution | None = None,
    target_post_selected: int | None = None,
    n_bins: int = 25,
    threads: int = 1,
) -> EnsembleStats:
    """Independent trajectories from the symmetric ground state, post-selected.

    Each trajectory prepares a localized state with the config's prep
    pulse, runs the pulse sequence, and is kept when its initial side
    matches ``post_select``.  With ``target_post_selected`` set,
    trajectories run in index order until that many survive the filter
    (``n_traj`` then caps the total).  Results are independent of thread
    count.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    if post_select not in ("left", "right"):
        raise ValueError(f"post_select must be 'left' or 'right', got {post_select!r}")
    if config.n_pulses > 0 and not 0 <= histogram_pulse < config.n_pulses:
        raise ValueError(
            f"histogram_pulse {histogram_pulse} out of range for {config.n_pulses} pulses"
        )
    if eig is None:
        eig = solve_stationary(potential, grid, DEFAULT_EIG_STATES)
    ground = WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=grid)
    advance = _propagator(ground, potential, eig, "eigen", 0.005)

    def run_index(i: int) -> TrajectoryRecord:
        return _one_protocol_run(ground, potential, config, advance, i)

    records: list[TrajectoryRecord] = []
    kept = 0
    if target_post_selected is None:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(run_index, range(n_traj)))
        else:
            records = [run_index(i) for i in range(n_traj)]
        kept = sum(r.initial_side == post_select for r in records)
    else:
        batch = max(2 * target_post_selected, 8)
        idx = 0
        while kept < target_post_selected and idx < n_traj:
            hi = min(idx + batch, n_traj)
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    new = list(pool.map(run_index, range(idx, hi)))
            else:
                new = [run_index(i) for i in range(idx, hi)]
            for rec in new:
                records.append(rec)
                if rec.initial_side == post_select:
                    kept += 1
                    if kept == target_post_selected:
                        break
            idx = len(records)

    selected = [r for r in records if r.initial_side == post_select]
    if target_post_selected is not None:
        selected = selected[:target_post_selected]
    n_selected = len(selected)
    if n_selected == 0:
        warnings.warn("post-selection left no trajectories; empty statistics", stacklevel=2)
        empty = np.array([])
        return EnsembleStats(
            n_traj=len(records),
            n_post_selected=0,
            post_selected_side=post_select,
            histogram_pulse=histogram_pulse,
            histogram_counts=np.array([], dtype=int),
            histogram_edges=empty,
            mean_trace=empty,
            times=empty,
            records=tuple(records),
        )
    if n_selected < 10:
        warnings.warn(
            f"post-selection left only {n_selected} trajectories; statistics are weak",
            stacklevel=2,
        )
    outcomes = np.array([r.outcomes[histogram_pulse] for r in selected])
    counts, edges = np.histogram(outcomes, bins=n_bins)
    mean_trace = np.mean([r.means for r in selected], axis=0)
    return EnsembleStats(
        n_traj=len(records),
        n_post_selected=n_selected,
        post_selected_side=post_select,
        histogram_pulse=histogram_pulse,
        histogram_counts=counts,
        histogram_edges=edges,
        mean_trace=mean_trace,
        times=selected[0].times.copy(),
        records=tuple(records),
    )


@dataclass(frozen=True)
class ZenoRow:
    multiplier: int
    n_pulses: int
    pulse_interval: float
    n_traj: int
    crossing_fraction: float


def zeno_scan(
    potential: np.ndarray,
    grid: Grid,
    base_config: MeasurementConfig,
    frequency_multipliers: list[int],
    n_traj: int,
    *,
    eig: EigenSolution | None = None,
    initial: WaveState | None = None,
) -> list[ZenoRow]:
    """Crossing fraction at fixed total time versus pulse frequency.

    The base schedule fixes the total time n_pulses * pulse_interval; for
    each multiplier m the interval is divided by m and the pulse count
    multiplied by m.  Trajectories start from the left-localized doublet
    state (or ``initial``) and count as crossed when more than half of
    the final probability mass sits on the opposite side.
    """
    if any(m < 1 for m in frequency_multipliers):
        raise ValueError("frequency multipliers must be >= 1")
    if eig is None:
        eig = solve_stationary(potential, grid, DEFAULT_EIG_STATES)
    if initial is None:
        psi_l, _ = localized_states(eig)
        initial = WaveState(psi=psi_l.astype(complex), time=0.0, grid=grid)
    x = grid.nodes()
    h = grid.h
    start_left = expectation_position(initial) < 0
    opposite = x > 0 if start_left else x < 0
    rows = []
    for m_index, mult in enumerate(frequency_multipliers):
        n_pulses = base_config.n_pulses * mult
        interval = base_config.pulse_interval / mult
        crossed = 0
        for i in range(n_traj):
            rng = trajectory_rng(base_config.seed, (m_index << 32) | i)
            state = initial
            for _ in range(n_pulses):
                state = evolve_eigen(state, eig, interval)
                _, state = weak_measure(state, base_config.sigma, rng)
            mass_opp = float(np.sum(np.abs(state.psi[opposite]) ** 2) * h)
            crossed += mass_opp > 0.5
        rows.append(
            ZenoRow(
                multiplier=mult,
                n_pulses=n_pulses,
                pulse_interval=interval,
                n_traj=n_traj,
                crossing_fraction=crossed / n_traj,
            )
        )
    return rows
