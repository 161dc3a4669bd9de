"""Membrane-in-a-double-well simulator.

A light field coupled quadratically to a mechanical membrane adds an
arctangent term to the harmonic trap.  For negative coupling and enough
pump power the result is a shallow symmetric double well; the lowest
eigenstate doublet tunnels between the wells at a rate set by its energy
splitting, and pulsed Gaussian position measurements monitor (or, when
strong and frequent, suppress) that tunneling.

Submodules: ``potential`` (closed-form well geometry), ``grids``,
``spectrum`` (stationary solver), ``dynamics`` (unitary propagation),
``measurement`` (stochastic pulse protocols), ``sweep`` (parameter
scans), ``cli`` (file-in/file-out command line).
"""

from optowell.grids import Grid, auto_grid
from optowell.potential import (
    SystemParams,
    WellGeometry,
    effective_potential,
    intracavity_intensity,
    potential_on_grid,
    threshold_eta,
    well_geometry,
)
from optowell.spectrum import (
    EigenSolution,
    localized_states,
    solve_stationary,
    tunneling_rate,
    two_level_params,
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
from optowell.measurement import (
    EnsembleStats,
    MeasurementConfig,
    PreparationResult,
    TrajectoryRecord,
    prepare_localized,
    run_ensemble,
    run_trajectory,
    trajectory_rng,
    weak_measure,
    zeno_scan,
)
from optowell.sweep import (
    DecoherenceMargin,
    SweepRow,
    SweepSpec,
    decoherence_margin,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "auto_grid",
    "SystemParams",
    "WellGeometry",
    "effective_potential",
    "intracavity_intensity",
    "potential_on_grid",
    "threshold_eta",
    "well_geometry",
    "EigenSolution",
    "localized_states",
    "solve_stationary",
    "tunneling_rate",
    "two_level_params",
    "RampSchedule",
    "WaveState",
    "evolve",
    "evolve_eigen",
    "expectation_energy",
    "expectation_position",
    "position_variance",
    "ramp_evolve",
    "EnsembleStats",
    "MeasurementConfig",
    "PreparationResult",
    "TrajectoryRecord",
    "prepare_localized",
    "run_ensemble",
    "run_trajectory",
    "trajectory_rng",
    "weak_measure",
    "zeno_scan",
    "DecoherenceMargin",
    "SweepRow",
    "SweepSpec",
    "decoherence_margin",
    "run_sweep",
]
