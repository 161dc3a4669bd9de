"""Command-line entry point: file-in, file-out runs of every subsystem.

Subcommands: potential, spectrum, sweep, trajectory, ensemble, zeno.
Each reads one JSON config (``--config``), applies flag overrides, writes
CSV/JSON and optional SVG figures into ``--out``, and exits 0 on success,
1 on validation failure, 2 on a runtime computation failure.  Output
contains no timestamps, so reruns with the same seed are byte-identical.
Diagnostics are plain text (NO_COLOR is honored trivially).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from optowell import plotting
from optowell.config import ConfigError, RunConfig, load_config, window_time
from optowell.dynamics import (
    RampSchedule,
    WaveState,
    evolve_eigen,
    expectation_position,
    ramp_evolve,
)
from optowell.grids import Grid, auto_grid
from optowell.measurement import (
    DEFAULT_EIG_STATES,
    MeasurementConfig,
    prepare_localized,
    run_ensemble,
    run_trajectory,
    trajectory_rng,
    zeno_scan,
)
from optowell.output import write_csv, write_json
from optowell.potential import potential_on_grid, well_geometry
from optowell.spectrum import (
    BELOW_RESOLUTION_J,
    localized_states,
    solve_stationary,
    two_level_params,
)
from optowell.sweep import CSV_COLUMNS, SweepSpec, decoherence_margin, run_sweep

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse usage errors are validation failures
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="optowell",
        description="Double-well membrane simulator: geometry, spectra, sweeps, "
        "monitored-tunneling trajectories and ensembles.",
    )
    parser.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps/ensembles")
    parser.add_argument(
        "--format",
        type=str,
        default=None,
        help="comma-separated output formats among csv,json,svg",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("potential", "sampled potential, well geometry, doublet summary"),
        ("spectrum", "lowest eigenvalues and splitting"),
        ("sweep", "parameter sweep over the configured field"),
        ("trajectory", "one monitored-tunneling trajectory plus coherent reference"),
        ("ensemble", "post-selected trajectory ensemble with outcome histogram"),
        ("zeno", "crossing fraction versus pulse frequency"),
    ]:
        sub.add_parser(name, help=doc)
    return parser


def _overrides(args) -> dict:
    ov: dict = {}
    if args.seed is not None:
        ov["seed"] = args.seed
    if args.format is not None:
        ov["formats"] = [f.strip() for f in args.format.split(",") if f.strip()]
    return ov


def _grid_for(cfg: RunConfig) -> Grid:
    if cfg.grid is not None:
        return Grid(cfg.grid.x_lo, cfg.grid.x_hi, cfg.grid.n)
    return auto_grid(cfg.system, cfg.n_states)


def _resolve_measurement(cfg: RunConfig, j: float, x_min: float | None) -> MeasurementConfig:
    m = cfg.measurement
    if m is None:
        raise ConfigError("this command requires a 'measurement' section")
    interval = m.pulse_interval
    if interval is None:
        interval = window_time(m.window, j) / max(m.n_pulses, 1)
    prep = m.prep_sigma
    if prep is None:
        if x_min is None:
            raise ConfigError("prep_sigma cannot default without a double well")
        prep = x_min / 3
    try:
        return MeasurementConfig(
            sigma=m.sigma, n_pulses=m.n_pulses, pulse_interval=interval,
            prep_sigma=prep, seed=m.seed,
        )
    except ValueError as exc:
        raise ConfigError(f"measurement: {exc}") from exc


def _doublet_summary(cfg: RunConfig, grid: Grid, eig) -> dict:
    geom = well_geometry(cfg.system)
    e_lr, j = two_level_params(eig)
    flagged = j < BELOW_RESOLUTION_J
    return {
        "system": {"g2": cfg.system.g2, "eta": cfg.system.eta,
                   "delta_c": cfg.system.delta_c, "kappa": cfg.system.kappa},
        "grid": {"x_lo": grid.x_lo, "x_hi": grid.x_hi, "n": grid.n},
        "D": geom.D,
        "is_double_well": geom.is_double_well,
        "x_min": geom.x_min,
        "E_b": geom.barrier_height,
        "E1": float(eig.energies[0]),
        "E2": float(eig.energies[1]),
        "E_mid": e_lr,
        "J": None if flagged else j,
        "J_flag": "below_resolution" if flagged else "ok",
    }


def cmd_potential(cfg: RunConfig, out: Path, threads: int) -> None:
    grid = _grid_for(cfg)
    u = potential_on_grid(cfg.system, grid)
    eig = solve_stationary(u, grid, max(cfg.n_states, 2))
    summary = _doublet_summary(cfg, grid, eig)
    geom = well_geometry(cfg.system)
    x = grid.nodes()
    write_csv(out / "potential.csv", ("x", "U"), zip(x, u))
    densities = None
    if geom.is_double_well:
        levels_below = [float(e) for e in eig.energies if e < geom.barrier_height]
        summary["levels_below_barrier"] = levels_below
        try:
            psi_l, psi_r = localized_states(eig)
            densities = {"|psi_L|^2": psi_l**2, "|psi_R|^2": psi_r**2}
        except RuntimeError:
            pass
    write_json(out / "summary.json", summary)
    print(f"wrote {out / 'potential.csv'}")
    print(f"wrote {out / 'summary.json'}")
    if "svg" in cfg.formats:
        for p in plotting.save_potential_figure(
            out / "potential", x, u, eig.energies[:2], densities
        ):
            print(f"wrote {p}")


def cmd_spectrum(cfg: RunConfig, out: Path, threads: int) -> None:
    grid = _grid_for(cfg)
    u = potential_on_grid(cfg.system, grid)
    eig = solve_stationary(u, grid, max(cfg.n_states, 2))
    write_csv(
        out / "energies.csv",
        ("index", "energy"),
        ((i + 1, float(e)) for i, e in enumerate(eig.energies)),
    )
    write_json(out / "summary.json", _doublet_summary(cfg, grid, eig))
    print(f"wrote {out / 'energies.csv'}")
    print(f"wrote {out / 'summary.json'}")
    if "svg" in cfg.formats:
        for p in plotting.save_potential_figure(
            out / "spectrum", grid.nodes(), u, eig.energies, None
        ):
            print(f"wrote {p}")


def cmd_sweep(cfg: RunConfig, out: Path, threads: int) -> None:
    if cfg.sweep is None:
        raise ConfigError("sweep command requires a 'sweep' section")
    try:
        spec = SweepSpec(
            base=cfg.system,
            swept_field=cfg.sweep.swept_field,
            values=cfg.sweep.values,
            outputs=cfg.sweep.outputs or CSV_COLUMNS,
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc
    rows = run_sweep(spec, threads=threads)
    write_csv(
        out / "sweep.csv",
        CSV_COLUMNS,
        (
            (r.swept, r.D, r.x_min, r.E_b, r.E_ground, r.ratio, r.J, r.J_flag)
            for r in rows
        ),
    )
    write_json(
        out / "sweep.json",
        {
            "swept_field": spec.swept_field,
            "base": {"g2": spec.base.g2, "eta": spec.base.eta,
                     "delta_c": spec.base.delta_c, "kappa": spec.base.kappa},
            "rows": [
                {
                    "swept": r.swept, "D": r.D, "x_min": r.x_min, "E_b": r.E_b,
                    "E_ground": r.E_ground, "ratio": r.ratio, "J": r.J,
                    "J_flag": r.J_flag, "E1_absolute": r.E1_absolute,
                    "grid_half_width": r.grid_half_width, "grid_n": r.grid_n,
                    "error": r.error,
                }
                for r in rows
            ],
        },
    )
    print(f"wrote {out / 'sweep.csv'}")
    print(f"wrote {out / 'sweep.json'}")
    if "svg" in cfg.formats:
        for p in plotting.save_sweep_figures(out, rows, spec.swept_field):
            print(f"wrote {p}")


def _prepared_ground(cfg: RunConfig, grid: Grid, u: np.ndarray, eig) -> tuple[WaveState, dict]:
    """Ground state by direct eigensolve or, when configured, a pump ramp."""
    info: dict = {"preparation": "eigensolve"}
    if cfg.ramp is None:
        return WaveState(psi=eig.states[:, 0].astype(complex), time=0.0, grid=grid), info
    u_start = potential_on_grid(cfg.system.replace_eta(cfg.ramp.eta_start), grid)
    start = solve_stationary(u_start, grid, 2)
    state = WaveState(psi=start.states[:, 0].astype(complex), time=0.0, grid=grid)
    schedule = RampSchedule(
        eta_start=cfg.ramp.eta_start, eta_end=cfg.system.eta,
        duration=cfg.ramp.duration, shape=cfg.ramp.shape,
    )
    state, adiabaticity = ramp_evolve(state, cfg.system, schedule, cfg.ramp.dt)
    info = {"preparation": "ramp", "ramp_duration": cfg.ramp.duration,
            "ramp_shape": cfg.ramp.shape, "adiabaticity": adiabaticity}
    return WaveState(psi=state.psi, time=0.0, grid=grid), info


def cmd_trajectory(cfg: RunConfig, out: Path, threads: int) -> None:
    grid = _grid_for(cfg)
    u = potential_on_grid(cfg.system, grid)
    eig = solve_stationary(u, grid, DEFAULT_EIG_STATES)
    geom = well_geometry(cfg.system)
    _, j = two_level_params(eig)
    mcfg = _resolve_measurement(cfg, j, geom.x_min)
    ground, prep_info = _prepared_ground(cfg, grid, u, eig)
    rng = trajectory_rng(mcfg.seed, 0)
    prep = prepare_localized(ground, mcfg.prep_sigma, rng)
    record = run_trajectory(
        prep.state, u, mcfg, initial_side=prep.side, rng=rng, eig=eig
    )
    write_csv(
        out / "trajectory.csv",
        ("t", "x_res", "mean_x", "energy"),
        zip(record.times, record.outcomes, record.means, record.energies),
    )
    # coherent (measurement-free) evolution of the same prepared state
    span = max(mcfg.n_pulses, 1) * mcfg.pulse_interval
    ref_times = np.linspace(0.0, span, 201)
    ref_means = []
    for t in ref_times:
        ref_means.append(expectation_position(evolve_eigen(prep.state, eig, float(t))))
    write_csv(out / "reference.csv", ("t", "mean_x"), zip(ref_times, ref_means))
    summary = _doublet_summary(cfg, grid, eig)
    summary.update(prep_info)
    summary.update(
        {
            "sigma": mcfg.sigma,
            "n_pulses": mcfg.n_pulses,
            "pulse_interval": mcfg.pulse_interval,
            "prep_sigma": mcfg.prep_sigma,
            "seed": mcfg.seed,
            "initial_side": record.initial_side,
            "prep_retries": prep.retries,
            "prep_outcome": prep.x_res,
        }
    )
    write_json(out / "summary.json", summary)
    for name in ("trajectory.csv", "reference.csv", "summary.json"):
        print(f"wrote {out / name}")
    if "svg" in cfg.formats:
        for p in plotting.save_trajectory_figure(
            out / "trajectory", record, ref_times, ref_means
        ):
            print(f"wrote {p}")


def cmd_ensemble(cfg: RunConfig, out: Path, threads: int) -> None:
    if cfg.ensemble is None:
        raise ConfigError("ensemble command requires an 'ensemble' section")
    grid = _grid_for(cfg)
    u = potential_on_grid(cfg.system, grid)
    eig = solve_stationary(u, grid, DEFAULT_EIG_STATES)
    geom = well_geometry(cfg.system)
    _, j = two_level_params(eig)
    mcfg = _resolve_measurement(cfg, j, geom.x_min)
    ens = cfg.ensemble
    pulse = ens.histogram_pulse
    if pulse is None:
        if mcfg.n_pulses < 1:
            raise ConfigError("ensemble needs at least one pulse")
        times = mcfg.pulse_interval * np.arange(1, mcfg.n_pulses + 1)
        pulse = int(np.argmin(np.abs(times - np.pi / j)))
    stats = run_ensemble(
        u, grid, mcfg, ens.n_traj, ens.post_select, pulse,
        eig=eig, target_post_selected=ens.target_post_selected,
        n_bins=ens.bins, threads=threads,
    )
    write_csv(
        out / "histogram.csv",
        ("bin_lo", "bin_hi", "count"),
        (
            (float(stats.histogram_edges[i]), float(stats.histogram_edges[i + 1]),
             int(stats.histogram_counts[i]))
            for i in range(len(stats.histogram_counts))
        ),
    )
    write_csv(
        out / "mean_trace.csv",
        ("pulse", "t", "mean_x"),
        (
            (i + 1, float(stats.times[i]), float(stats.mean_trace[i]))
            for i in range(len(stats.mean_trace))
        ),
    )
    mass_right = float(
        sum(c for lo, c in zip(stats.histogram_edges[:-1], stats.histogram_counts) if lo >= 0)
    )
    summary = _doublet_summary(cfg, grid, eig)
    summary.update(
        {
            "sigma": mcfg.sigma,
            "n_pulses": mcfg.n_pulses,
            "pulse_interval": mcfg.pulse_interval,
            "prep_sigma": mcfg.prep_sigma,
            "seed": mcfg.seed,
            "n_traj": stats.n_traj,
            "n_post_selected": stats.n_post_selected,
            "post_selected_side": stats.post_selected_side,
            "histogram_pulse": stats.histogram_pulse,
            "histogram_time": float(stats.times[stats.histogram_pulse])
            if len(stats.times) else None,
        }
    )
    write_json(out / "summary.json", summary)
    for name in ("histogram.csv", "mean_trace.csv", "summary.json"):
        print(f"wrote {out / name}")
    if "svg" in cfg.formats:
        for p in plotting.save_histogram_figure(out / "histogram", stats):
            print(f"wrote {p}")


def cmd_zeno(cfg: RunConfig, out: Path, threads: int) -> None:
    if cfg.zeno is None:
        raise ConfigError("zeno command requires a 'zeno' section")
    grid = _grid_for(cfg)
    u = potential_on_grid(cfg.system, grid)
    eig = solve_stationary(u, grid, DEFAULT_EIG_STATES)
    geom = well_geometry(cfg.system)
    _, j = two_level_params(eig)
    mcfg = _resolve_measurement(cfg, j, geom.x_min)
    rows = zeno_scan(u, grid, mcfg, list(cfg.zeno.multipliers), cfg.zeno.n_traj, eig=eig)
    write_csv(
        out / "zeno.csv",
        ("multiplier", "n_pulses", "pulse_interval", "n_traj", "crossing_fraction"),
        (
            (r.multiplier, r.n_pulses, r.pulse_interval, r.n_traj, r.crossing_fraction)
            for r in rows
        ),
    )
    summary = _doublet_summary(cfg, grid, eig)
    summary.update(
        {
            "sigma": mcfg.sigma,
            "total_time": mcfg.n_pulses * mcfg.pulse_interval,
            "seed": mcfg.seed,
            "rows": [
                {"multiplier": r.multiplier, "n_pulses": r.n_pulses,
                 "pulse_interval": r.pulse_interval, "n_traj": r.n_traj,
                 "crossing_fraction": r.crossing_fraction}
                for r in rows
            ],
        }
    )
    write_json(out / "zeno.json", summary)
    for name in ("zeno.csv", "zeno.json"):
        print(f"wrote {out / name}")
    if "svg" in cfg.formats:
        for p in plotting.save_zeno_figure(out / "zeno", rows):
            print(f"wrote {p}")


_COMMANDS = {
    "potential": cmd_potential,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "trajectory": cmd_trajectory,
    "ensemble": cmd_ensemble,
    "zeno": cmd_zeno,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out, max(1, args.threads))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error writing {getattr(exc, 'filename', 'output')}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
