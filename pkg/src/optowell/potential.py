"""Cavity-induced effective potential and its closed-form well geometry.

Everything is dimensionless in oscillator units (hbar = M = omega_M = 1):
lengths in zero-point units, energies in units of the mechanical quantum,
rates in units of the mechanical frequency.  The potential is

    U(x) = x^2/2 + (4 eta^2 / kappa) * arctan(Delta(x) / (kappa/2)),
    Delta(x) = delta_c + g2 * x^2,

with the detuning evaluated pointwise in x.  For g2 < 0 and pump rates
above a threshold the arctan term carves a symmetric barrier into the
harmonic trap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "WellGeometry",
    "SIScales",
    "intracavity_intensity",
    "effective_potential",
    "well_geometry",
    "potential_on_grid",
    "threshold_eta",
    "si_scales",
]


@dataclass(frozen=True)
class SystemParams:
    """Drive and coupling parameters of the quadratically coupled mode.

    g2      quadratic coupling (negative values produce the barrier)
    eta     pump rate, >= 0
    delta_c pump-cavity detuning
    kappa   cavity linewidth, > 0
    """

    g2: float
    eta: float
    delta_c: float
    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    def replace_eta(self, eta: float) -> "SystemParams":
        return SystemParams(self.g2, eta, self.delta_c, self.kappa)


@dataclass(frozen=True)
class WellGeometry:
    """Closed-form double-well descriptors.

    x_min and barrier_height are None unless is_double_well.  The barrier
    height is U(0) - U(x_min).
    """

    D: float
    x_min: float | None
    barrier_height: float | None
    is_double_well: bool


def intracavity_intensity(params: SystemParams, x):
    """Steady-state photon number at membrane position x (scalar or array)."""
    delta = params.delta_c + params.g2 * np.square(x)
    return params.eta**2 / ((params.kappa / 2) ** 2 + delta**2)


def effective_potential(params: SystemParams, x):
    """Effective potential U(x) seen by the membrane (scalar or array)."""
    delta = params.delta_c + params.g2 * np.square(x)
    light = (4 * params.eta**2 / params.kappa) * np.arctan(delta / (params.kappa / 2))
    return np.square(x) / 2 + light


def well_geometry(params: SystemParams) -> WellGeometry:
    """Evaluate the double-well existence condition and its closed forms.

    The discriminant is D = -kappa^2 - 16 eta^2 g2.  A symmetric double
    well requires D > 0, g2 < 0 and a positive radicand for the minimum
    position; degenerate cases come back with is_double_well = False.
    """
    D = -params.kappa**2 - 16 * params.eta**2 * params.g2
    if D <= 0 or params.g2 >= 0:
        return WellGeometry(D=D, x_min=None, barrier_height=None, is_double_well=False)
    radicand = -(2 * params.delta_c + math.sqrt(D)) / (2 * params.g2)
    if radicand <= 0:
        return WellGeometry(D=D, x_min=None, barrier_height=None, is_double_well=False)
    x_min = math.sqrt(radicand)
    barrier = -0.5 * x_min**2 + (4 * params.eta**2 / params.kappa) * (
        math.atan(2 * params.delta_c / params.kappa)
        + math.atan(math.sqrt(D) / params.kappa)
    )
    return WellGeometry(D=D, x_min=x_min, barrier_height=barrier, is_double_well=True)


def potential_on_grid(params: SystemParams, grid) -> np.ndarray:
    """Sample U at every node of a Grid (deterministic, pointwise)."""
    return effective_potential(params, grid.nodes())


def threshold_eta(g2: float, kappa: float) -> float:
    """Pump rate at which D changes sign (requires g2 < 0)."""
    if g2 >= 0:
        raise ValueError("double-well threshold requires g2 < 0")
    return math.sqrt(kappa**2 / (-16 * g2))


@dataclass(frozen=True)
class SIScales:
    """Conversion factors from oscillator units to SI, for reporting only.

    length_m is sqrt(hbar / (M omega_M)), the unit in which the
    dimensionless position coordinate is expressed; energy_J is
    hbar * omega_M; time_s is 1 / omega_M.
    """

    length_m: float
    energy_J: float
    time_s: float


_HBAR = 1.054571817e-34  # J s


def si_scales(omega_m: float, mass: float) -> SIScales:
    """SI scales for a membrane of angular frequency omega_m [rad/s], mass [kg]."""
    if omega_m <= 0 or mass <= 0:
        raise ValueError("omega_m and mass must be positive")
    return SIScales(
        length_m=math.sqrt(_HBAR / (mass * omega_m)),
        energy_J=_HBAR * omega_m,
        time_s=1.0 / omega_m,
    )
