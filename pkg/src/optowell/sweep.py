"""Parameter sweeps over the well geometry and tunneling splitting.

Each swept value gets the closed-form geometry; double-well rows
additionally solve the stationary problem on an automatically sized grid
and report the ground energy above the well bottom, the barrier-to-ground
ratio, and the doublet splitting.  Splittings below the resolution floor
carry a flag instead of a number.  Rows never abort the sweep; failures
are captured per row.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from optowell.grids import auto_grid
from optowell.potential import SystemParams, effective_potential, potential_on_grid, well_geometry
from optowell.spectrum import BELOW_RESOLUTION_J, solve_stationary

__all__ = [
    "SweepSpec",
    "SweepRow",
    "DecoherenceMargin",
    "run_sweep",
    "decoherence_margin",
    "CSV_COLUMNS",
]

SWEEPABLE_FIELDS = ("eta", "delta_c", "g2", "kappa")
CSV_COLUMNS = ("swept", "D", "x_min", "E_b", "E_ground", "ratio", "J", "J_flag")


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional scan of a SystemParams field."""

    base: SystemParams
    swept_field: str
    values: tuple[float, ...]
    outputs: tuple[str, ...] = CSV_COLUMNS

    def __post_init__(self) -> None:
        if self.swept_field not in SWEEPABLE_FIELDS:
            raise ValueError(f"swept_field must be one of {SWEEPABLE_FIELDS}")
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("sweep values must be strictly monotone")
        unknown = set(self.outputs) - set(CSV_COLUMNS)
        if unknown:
            raise ValueError(f"unknown output columns: {sorted(unknown)}")

    def params_at(self, value: float) -> SystemParams:
        return replace(self.base, **{self.swept_field: value})


@dataclass(frozen=True)
class SweepRow:
    """One sweep point; None entries were not computed or carry no claim."""

    swept: float
    D: float
    x_min: float | None
    E_b: float | None
    E_ground: float | None
    ratio: float | None
    J: float | None
    J_flag: str  # "ok" | "below_resolution" | "single_well" | "error"
    E1_absolute: float | None = None
    grid_half_width: float | None = None
    grid_n: int | None = None
    error: str | None = None


def _solve_row(spec: SweepSpec, value: float) -> SweepRow:
    params = spec.params_at(value)
    geom = well_geometry(params)
    if not geom.is_double_well:
        return SweepRow(
            swept=value, D=geom.D, x_min=None, E_b=None, E_ground=None,
            ratio=None, J=None, J_flag="single_well",
        )
    needs_solve = bool({"E_ground", "ratio", "J", "J_flag"} & set(spec.outputs))
    if not needs_solve:
        return SweepRow(
            swept=value, D=geom.D, x_min=geom.x_min, E_b=geom.barrier_height,
            E_ground=None, ratio=None, J=None, J_flag="ok",
        )
    try:
        grid = auto_grid(params)
        eig = solve_stationary(potential_on_grid(params, grid), grid, 2)
    except Exception as exc:  # captured per row, sweep continues
        return SweepRow(
            swept=value, D=geom.D, x_min=geom.x_min, E_b=geom.barrier_height,
            E_ground=None, ratio=None, J=None, J_flag="error", error=str(exc),
        )
    e1 = float(eig.energies[0])
    j = float(eig.energies[1] - eig.energies[0])
    u_min = float(effective_potential(params, geom.x_min))
    e_ground = e1 - u_min
    below = j < BELOW_RESOLUTION_J
    return SweepRow(
        swept=value,
        D=geom.D,
        x_min=geom.x_min,
        E_b=geom.barrier_height,
        E_ground=e_ground,
        ratio=geom.barrier_height / e_ground,
        J=None if below else j,
        J_flag="below_resolution" if below else "ok",
        E1_absolute=e1,
        grid_half_width=grid.x_hi,
        grid_n=grid.n,
    )


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[SweepRow]:
    """Evaluate every sweep point; rows come back in input order."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda v: _solve_row(spec, v), spec.values))
    return [_solve_row(spec, v) for v in spec.values]


@dataclass(frozen=True)
class DecoherenceMargin:
    """Tunneling rate in SI units against the mechanical decoherence rate."""

    j_si: float
    margin: float
    decoherence_dominated: bool


def decoherence_margin(j: float, quality_factor: float, omega_m_si: float) -> DecoherenceMargin:
    """Compare J (oscillator units) with omega_M/Q for a real membrane.

    j_si = J * omega_M and margin = j_si / (omega_M / Q) = J * Q; a margin
    below 1 means decoherence outruns tunneling.
    """
    if j <= 0 or quality_factor <= 0 or omega_m_si <= 0:
        raise ValueError("all inputs must be positive")
    j_si = j * omega_m_si
    margin = j * quality_factor
    return DecoherenceMargin(j_si=j_si, margin=margin, decoherence_dominated=margin < 1)
