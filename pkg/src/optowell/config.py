"""Strict run configuration: one JSON document per run, unknown keys rejected.

Fields that depend on the solved spectrum (pulse spacing from the
computed splitting, preparation strength from the well separation) may be
null in the file; the CLI resolves them after the eigensolve.  Flags
override file values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from optowell.potential import SystemParams

__all__ = [
    "ConfigError",
    "RunConfig",
    "GridConfig",
    "MeasurementSection",
    "EnsembleSection",
    "ZenoSection",
    "SweepSection",
    "RampSection",
    "load_config",
    "window_time",
]

WINDOWS = ("inverse_j", "half_period", "quarter_period")
FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


def _require(d: dict, path: str, known: set[str]) -> None:
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown key {path}.{sorted(unknown)[0]}")


def _get(d: dict, key: str, path: str, types, default=..., allow_none=False):
    if key not in d:
        if default is ...:
            raise ConfigError(f"missing required key {path}.{key}")
        return default
    v = d[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ConfigError(f"{path}.{key} has wrong type bool")
    if not isinstance(v, types):
        raise ConfigError(f"{path}.{key} has wrong type {type(v).__name__}")
    return v


@dataclass(frozen=True)
class GridConfig:
    x_lo: float
    x_hi: float
    n: int

    @classmethod
    def parse(cls, d: dict, path: str) -> "GridConfig":
        _require(d, path, {"x_lo", "x_hi", "n"})
        return cls(
            x_lo=float(_get(d, "x_lo", path, (int, float))),
            x_hi=float(_get(d, "x_hi", path, (int, float))),
            n=_get(d, "n", path, int),
        )


@dataclass(frozen=True)
class MeasurementSection:
    sigma: float
    n_pulses: int
    pulse_interval: float | None = None
    window: str = "inverse_j"
    prep_sigma: float | None = None
    seed: int = 0

    @classmethod
    def parse(cls, d: dict, path: str) -> "MeasurementSection":
        _require(d, path, {"sigma", "n_pulses", "pulse_interval", "window", "prep_sigma", "seed"})
        window = _get(d, "window", path, str, default="inverse_j")
        if window not in WINDOWS:
            raise ConfigError(f"{path}.window must be one of {WINDOWS}")
        interval = _get(d, "pulse_interval", path, (int, float), default=None, allow_none=True)
        prep = _get(d, "prep_sigma", path, (int, float), default=None, allow_none=True)
        return cls(
            sigma=float(_get(d, "sigma", path, (int, float))),
            n_pulses=_get(d, "n_pulses", path, int),
            pulse_interval=None if interval is None else float(interval),
            window=window,
            prep_sigma=None if prep is None else float(prep),
            seed=_get(d, "seed", path, int, default=0),
        )


@dataclass(frozen=True)
class EnsembleSection:
    n_traj: int
    post_select: str = "left"
    histogram_pulse: int | None = None
    target_post_selected: int | None = None
    bins: int = 25

    @classmethod
    def parse(cls, d: dict, path: str) -> "EnsembleSection":
        _require(d, path, {"n_traj", "post_select", "histogram_pulse", "target_post_selected", "bins"})
        side = _get(d, "post_select", path, str, default="left")
        if side not in ("left", "right"):
            raise ConfigError(f"{path}.post_select must be 'left' or 'right'")
        return cls(
            n_traj=_get(d, "n_traj", path, int),
            post_select=side,
            histogram_pulse=_get(d, "histogram_pulse", path, int, default=None, allow_none=True),
            target_post_selected=_get(d, "target_post_selected", path, int, default=None, allow_none=True),
            bins=_get(d, "bins", path, int, default=25),
        )


@dataclass(frozen=True)
class ZenoSection:
    multipliers: tuple[int, ...]
    n_traj: int

    @classmethod
    def parse(cls, d: dict, path: str) -> "ZenoSection":
        _require(d, path, {"multipliers", "n_traj"})
        raw = _get(d, "multipliers", path, list)
        if not raw or not all(isinstance(m, int) and m >= 1 for m in raw):
            raise ConfigError(f"{path}.multipliers must be integers >= 1")
        return cls(multipliers=tuple(raw), n_traj=_get(d, "n_traj", path, int))


@dataclass(frozen=True)
class SweepSection:
    swept_field: str
    values: tuple[float, ...]
    outputs: tuple[str, ...] | None = None

    @classmethod
    def parse(cls, d: dict, path: str) -> "SweepSection":
        _require(d, path, {"swept_field", "values", "outputs"})
        raw = _get(d, "values", path, list)
        if not raw or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            raise ConfigError(f"{path}.values must be a non-empty list of numbers")
        outputs = _get(d, "outputs", path, list, default=None, allow_none=True)
        return cls(
            swept_field=_get(d, "swept_field", path, str),
            values=tuple(float(v) for v in raw),
            outputs=None if outputs is None else tuple(outputs),
        )


@dataclass(frozen=True)
class RampSection:
    eta_start: float
    duration: float
    shape: str = "smoothstep"
    dt: float = 0.05

    @classmethod
    def parse(cls, d: dict, path: str) -> "RampSection":
        _require(d, path, {"eta_start", "duration", "shape", "dt"})
        return cls(
            eta_start=float(_get(d, "eta_start", path, (int, float), default=0.0)),
            duration=float(_get(d, "duration", path, (int, float))),
            shape=_get(d, "shape", path, str, default="smoothstep"),
            dt=float(_get(d, "dt", path, (int, float), default=0.05)),
        )


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    grid: GridConfig | None = None
    n_states: int = 8
    measurement: MeasurementSection | None = None
    ensemble: EnsembleSection | None = None
    zeno: ZenoSection | None = None
    sweep: SweepSection | None = None
    ramp: RampSection | None = None
    formats: tuple[str, ...] = ("csv", "json")

    @classmethod
    def parse(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config root must be a JSON object")
        _require(d, "", {"system", "grid", "spectrum", "measurement", "ensemble",
                         "zeno", "sweep", "ramp", "output"})
        sys_d = _get(d, "system", "", dict)
        _require(sys_d, "system", {"g2", "eta", "delta_c", "kappa"})
        try:
            system = SystemParams(
                g2=float(_get(sys_d, "g2", "system", (int, float))),
                eta=float(_get(sys_d, "eta", "system", (int, float))),
                delta_c=float(_get(sys_d, "delta_c", "system", (int, float))),
                kappa=float(_get(sys_d, "kappa", "system", (int, float))),
            )
        except ValueError as exc:
            raise ConfigError(f"system: {exc}") from exc
        n_states = 8
        if "spectrum" in d:
            spec_d = _get(d, "spectrum", "", dict)
            _require(spec_d, "spectrum", {"n_states"})
            n_states = _get(spec_d, "n_states", "spectrum", int, default=8)
        out = ("csv", "json")
        if "output" in d:
            out_d = _get(d, "output", "", dict)
            _require(out_d, "output", {"formats"})
            raw = _get(out_d, "formats", "output", list, default=list(out))
            for f in raw:
                if f not in FORMATS:
                    raise ConfigError(f"output.formats entries must be among {FORMATS}")
            out = tuple(raw)
        return cls(
            system=system,
            grid=GridConfig.parse(d["grid"], "grid") if d.get("grid") is not None else None,
            n_states=n_states,
            measurement=MeasurementSection.parse(d["measurement"], "measurement")
            if d.get("measurement") is not None else None,
            ensemble=EnsembleSection.parse(d["ensemble"], "ensemble")
            if d.get("ensemble") is not None else None,
            zeno=ZenoSection.parse(d["zeno"], "zeno") if d.get("zeno") is not None else None,
            sweep=SweepSection.parse(d["sweep"], "sweep") if d.get("sweep") is not None else None,
            ramp=RampSection.parse(d["ramp"], "ramp") if d.get("ramp") is not None else None,
            formats=out,
        )

    def to_dict(self) -> dict:
        def section(obj):
            if obj is None:
                return None
            return {f.name: getattr(obj, f.name) for f in fields(obj)}

        d: dict[str, Any] = {"system": section(self.system)}
        if self.grid is not None:
            d["grid"] = section(self.grid)
        d["spectrum"] = {"n_states": self.n_states}
        for name, obj in (("measurement", self.measurement), ("ensemble", self.ensemble),
                          ("zeno", self.zeno), ("sweep", self.sweep), ("ramp", self.ramp)):
            if obj is not None:
                sec = section(obj)
                for k, v in sec.items():
                    if isinstance(v, tuple):
                        sec[k] = list(v)
                d[name] = sec
        d["output"] = {"formats": list(self.formats)}
        return d


def load_config(path: Path | None, overrides: dict | None = None) -> RunConfig:
    """Parse a JSON config file (or defaults) and apply flag overrides."""
    if path is None:
        raw: dict = {"system": {"g2": -2e-4, "eta": 176.785, "delta_c": 0.0, "kappa": 10.0}}
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    cfg = RunConfig.parse(raw)
    if overrides:
        if "seed" in overrides and cfg.measurement is not None:
            cfg = replace(cfg, measurement=replace(cfg.measurement, seed=overrides["seed"]))
        if "formats" in overrides:
            for f in overrides["formats"]:
                if f not in FORMATS:
                    raise ConfigError(f"--format entries must be among {FORMATS}")
            cfg = replace(cfg, formats=tuple(overrides["formats"]))
    return cfg


def window_time(window: str, j: float) -> float:
    """Pulse-sequence span implied by a named window and splitting J."""
    if j <= 0:
        raise ValueError("splitting must be positive to derive a schedule")
    if window == "inverse_j":
        return 1.0 / j
    if window == "half_period":
        return math.pi / j
    if window == "quarter_period":
        return math.pi / (4 * j)
    raise ValueError(f"unknown window {window!r}")
