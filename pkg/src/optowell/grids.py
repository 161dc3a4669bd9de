"""Uniform position grids and automatic box sizing.

The box for a stationary or propagated problem must be large enough that
wavefunction tails die off before the edges.  Near the double-well
threshold the light term nearly cancels the harmonic confinement over a
wide region, so a fixed margin beyond the well minima is not safe; the
box edge is instead chosen so that the WKB decay action accumulated
outside the classically allowed region exceeds a target (action 30
corresponds to tail amplitudes around 1e-13).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from optowell.potential import SystemParams, effective_potential, well_geometry

__all__ = ["Grid", "auto_grid"]

TAIL_ACTION = 34.0


@dataclass(frozen=True)
class Grid:
    """Uniform grid with n nodes including both box edges."""

    x_lo: float
    x_hi: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 nodes, got {self.n}")
        if not self.x_lo < self.x_hi:
            raise ValueError(f"grid requires x_lo < x_hi, got [{self.x_lo}, {self.x_hi}]")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return _nodes(self.x_lo, self.x_hi, self.n)

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "Grid":
        return cls(-half_width, half_width, n)


@lru_cache(maxsize=128)
def _nodes(x_lo: float, x_hi: float, n: int) -> np.ndarray:
    x = np.linspace(x_lo, x_hi, n)
    if x_lo == -x_hi:
        # enforce exact sign symmetry so even potentials sample evenly
        x = 0.5 * (x - x[::-1])
    x.setflags(write=False)
    return x


def _tail_edge(params: SystemParams, e_ref: float, start: float) -> float:
    """Distance at which the WKB action above e_ref reaches TAIL_ACTION."""
    x = start
    action = 0.0
    dx = 0.05
    while action < TAIL_ACTION:
        x += dx
        du = float(effective_potential(params, x)) - e_ref
        if du > 0:
            action += math.sqrt(2 * du) * dx
        if x > 1e4:
            raise RuntimeError("box sizing did not converge; potential too flat")
    return x


def _next_pow2(m: int) -> int:
    return 1 << max(2, (m - 1).bit_length())


def auto_grid(params: SystemParams, n_states: int = 8) -> Grid:
    """Choose a box and resolution suited to the lowest n_states states.

    Double-well case: the box must swallow tails of states up to roughly
    one barrier height above the barrier top, and the spacing resolves
    the wells (h <= min(0.02, x_min/200)).  Single-well case: the box
    covers the classical turning point of the highest requested level and
    the spacing keeps the finite-difference eigenvalue error below 1e-6
    for that level.
    """
    geom = well_geometry(params)
    if geom.is_double_well:
        e_ref = float(effective_potential(params, 0.0)) + 2.0 * geom.barrier_height
        half = _tail_edge(params, e_ref, geom.x_min)
        h_target = min(0.02, geom.x_min / 200.0)
    else:
        e_ref = float(effective_potential(params, 0.0)) + n_states + 2.0
        # coarse scan for the outer turning point
        x_t = 1.0
        while float(effective_potential(params, x_t)) < e_ref:
            x_t *= 1.25
            if x_t > 1e4:
                raise RuntimeError("no turning point found; potential unconfined")
        half = max(10.0, _tail_edge(params, e_ref, x_t))
        # second-order FD eigenvalue error ~ (h^2/24) <p^4>; bound it by 5e-7
        p4 = 0.75 * (2 * n_states**2 + 2 * n_states + 1)
        h_target = math.sqrt(24 * 5e-7 / p4)
    n = _next_pow2(int(math.ceil(2 * half / h_target)) + 1)
    return Grid.symmetric(half, n)
