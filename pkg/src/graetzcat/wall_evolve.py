"""One semi-implicit time step of the surface balance.

    dC_is/dt = -gamma_is flux_i + delta_i rate_i + theta_is d2 C_is / dz2

Axial diffusion is backward Euler (tridiagonal solve), flux and reaction
enter explicitly from the caller-supplied vectors; both ends are zero-flux,
closed with mirrored ghost nodes, which keeps the trapezoid mass integral
exact for flux-free, reaction-free steps.  The update is computed in
increment form so fixed points are preserved bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_banded

from .model import SpeciesParams, WallField


@dataclass(frozen=True)
class WallStepInput:
    """Everything one step needs: previous wall, per-node flux dC_if/dr(1,z),
    per-node channel rates (sign not yet applied), step size, species table."""

    wall_prev: WallField
    flux: np.ndarray
    rates: np.ndarray
    dt: float
    params: Sequence[SpeciesParams]


def _mirrored_second_difference(values: np.ndarray, dz: float) -> np.ndarray:
    """d2/dz2 with ghost nodes mirrored across both ends, difference form."""
    d = (values[:, 1:] - values[:, :-1]) / dz**2
    out = np.empty_like(values)
    out[:, 0] = 2.0 * d[:, 0]
    out[:, 1:-1] = d[:, 1:] - d[:, :-1]
    out[:, -1] = -2.0 * d[:, -1]
    return out


def step_wall(inp: WallStepInput) -> WallField:
    ns, nn = inp.wall_prev.values.shape
    if inp.flux.shape != (ns, nn) or inp.rates.shape != (ns, nn):
        raise ValueError("flux/rates must match the wall layout")
    if not inp.dt > 0.0:
        raise ValueError(f"dt = {inp.dt} must be positive")

    dt = inp.dt
    dz = 1.0 / (nn - 1)
    prev = inp.wall_prev.values
    gammas = np.array([s.gamma_s for s in inp.params])
    deltas = np.array([float(s.delta) for s in inp.params])
    thetas = np.array([s.theta_s for s in inp.params])

    diffusion_prev = _mirrored_second_difference(prev, dz)
    rhs = dt * (
        -gammas[:, None] * inp.flux
        + deltas[:, None] * inp.rates
        + thetas[:, None] * diffusion_prev
    )

    new = np.empty_like(prev)
    # species sharing one diffusivity share one matrix (multi-RHS solve)
    groups: dict[float, list[int]] = {}
    for i, s in enumerate(inp.params):
        groups.setdefault(s.theta_s, []).append(i)

    for theta, idx in groups.items():
        if theta == 0.0:
            new[idx] = prev[idx] + rhs[idx]
            continue
        a = dt * theta / dz**2
        ab = np.zeros((3, nn))
        ab[1, :] = 1.0 + 2.0 * a
        ab[0, 1] = -2.0 * a  # mirrored ghost at z = 0
        ab[0, 2:] = -a
        ab[2, :-2] = -a
        ab[2, -2] = -2.0 * a  # mirrored ghost at z = 1
        delta = solve_banded((1, 1), ab, rhs[idx].T)
        new[idx] = prev[idx] + delta.T

    return WallField(values=new, time_tag=inp.wall_prev.time_tag + dt)
