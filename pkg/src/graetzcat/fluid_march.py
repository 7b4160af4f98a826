"""Implicit z-marching for the in-cylinder convection/diffusion balance.

The bulk equation has no time derivative: at a frozen time the field solves

    (1 - r^2) dC/dz = (beta / r) d/dr (r dC/dr),      0 <= r < 1,

with the inlet profile pinned at z = 0, symmetry at the axis and a Dirichlet
trace equal to the wall field at r = 1.  z therefore plays the role of time
and we march it with backward Euler, one tridiagonal solve per step:

    [(1 - r^2)/dz I - L_r] C^{k+1} = (1 - r^2)/dz C^k,   C^{k+1}(1) = wall_{k+1}.

L_r is the finite-volume radial operator; its axis row collapses to
4 beta (C_1 - C_0)/dr^2 because the flux through the r = 0 face vanishes.
The degenerate weight (1 - r^2) = 0 at r = 1 is harmless since that row is
Dirichlet.  The assembled matrix is an M-matrix, which yields a discrete
maximum principle: the marched field cannot leave the envelope of its inlet
and wall data.

The wall gradient the surface equation consumes is extracted two ways:

 * a one-sided second-order stencil at r = 1 (exact for radial quadratics),
 * the integral identity dC/dr(1,z) = (1/beta) int_0^1 dC/dz r(1-r^2) dr.

Both are kept because their mutual agreement under refinement is one of the
consistency checks of the scheme.

Operators are applied in face-difference form throughout, so constant data
reproduces itself bitwise (exact fixed points, no drift).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from .model import FluidField, Grid, InitialData, SpeciesParams, WallField


@dataclass(frozen=True)
class RadialOperator:
    """Rows of the marching matrix [(1-r^2)/dz I - L_r] for one diffusivity.

    lower/diag/upper are the tridiagonal coefficients over the nr+1 nodes
    including the symmetry row at the axis and the Dirichlet row at r = 1.
    weights is the nodal quadrature weight r (1 - r^2).  The factored form
    (drop the Dirichlet unknown, rescale by cell volumes) is symmetric
    positive definite and is Cholesky-factored once per march.
    """

    beta: float
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    weights: np.ndarray
    face_r: np.ndarray
    cho_factor: np.ndarray

    @classmethod
    def build(cls, grid: Grid, beta: float) -> "RadialOperator":
        if beta <= 0.0:
            raise ValueError(f"beta = {beta} must be positive")
        nr, dr, dz = grid.nr, grid.dr, grid.dz
        r = grid.r
        conv = (1.0 - r * r) / dz
        face_r = (np.arange(nr) + 0.5) * dr

        lower = np.zeros(nr + 1)
        diag = np.zeros(nr + 1)
        upper = np.zeros(nr + 1)

        # axis row: finite-volume symmetry closure
        diag[0] = conv[0] + 4.0 * beta / dr**2
        upper[0] = -4.0 * beta / dr**2
        # interior rows
        j = np.arange(1, nr)
        lower[j] = -beta * face_r[j - 1] / (r[j] * dr**2)
        upper[j] = -beta * face_r[j] / (r[j] * dr**2)
        diag[j] = conv[j] - lower[j] - upper[j]
        # Dirichlet trace row at r = 1
        diag[nr] = 1.0

        # volume-scaled symmetric reduction over the nr interior unknowns
        vol = np.empty(nr)
        vol[0] = dr * dr / 8.0
        vol[1:] = r[1:nr] * dr
        k_diag = np.empty(nr)
        k_diag[0] = face_r[0] / dr
        k_diag[1:] = (face_r[: nr - 1] + face_r[1:nr]) / dr
        k_sup = -face_r[: nr - 1] / dr
        a_diag = vol * conv[:nr] + beta * k_diag
        a_sup = beta * k_sup

        ab = np.zeros((2, nr))
        ab[1, :] = a_diag
        ab[0, 1:] = a_sup
        try:
            cho = cholesky_banded(ab, lower=False)
        except LinAlgError as exc:  # cannot happen for beta > 0: SPD by design
            raise RuntimeError(
                f"radial marching matrix lost positive definiteness (beta={beta})"
            ) from exc

        return cls(
            beta=beta,
            lower=lower,
            diag=diag,
            upper=upper,
            weights=grid.radial_weight(),
            face_r=face_r,
            cho_factor=cho,
        )

    def m_matrix_ok(self) -> bool:
        """Off-diagonals nonpositive, rows weakly diagonally dominant."""
        offdiag_ok = bool(np.all(self.lower <= 0.0) and np.all(self.upper <= 0.0))
        dom = self.diag - (np.abs(self.lower) + np.abs(self.upper))
        return offdiag_ok and bool(np.all(self.diag > 0.0)) and bool(np.all(dom >= -1e-14))


def march_fluid(
    wall: WallField,
    init: InitialData,
    params: Sequence[SpeciesParams],
    grid: Grid,
) -> FluidField:
    """March every species down the cylinder against the given wall trace.

    Returns the field at the wall's time level.  The z = 0 column equals the
    inlet samples (except the corner node, which belongs to the trace), and
    the r = 1 row equals the wall vector bitwise.
    """
    ns = len(params)
    nr, nz = grid.nr, grid.nz
    if wall.values.shape != (ns, nz + 1):
        raise ValueError(f"wall shape {wall.values.shape} != {(ns, nz + 1)}")
    if init.inlet.shape != (ns, nr + 1):
        raise ValueError(f"inlet shape {init.inlet.shape} != {(ns, nr + 1)}")

    values = np.empty((ns, nr + 1, nz + 1))
    values[:, :, 0] = init.inlet

    # species with equal diffusivity share one factorization and are solved
    # as a multi right-hand-side batch
    groups: dict[float, list[int]] = {}
    for i, s in enumerate(params):
        groups.setdefault(s.beta_f, []).append(i)

    dr = grid.dr
    for beta, idx in groups.items():
        op = RadialOperator.build(grid, beta)
        fr = op.face_r
        wvals = wall.values[idx]
        pad = np.empty((len(idx), nr + 1))
        for k in range(1, nz + 1):
            pad[:, :nr] = values[idx, :nr, k - 1]
            pad[:, nr] = wvals[:, k]
            diff = fr * (pad[:, 1:] - pad[:, :-1])
            kc = np.empty((len(idx), nr))
            kc[:, 0] = -diff[:, 0] / dr
            kc[:, 1:] = (diff[:, :-1] - diff[:, 1:]) / dr
            rhs = -beta * kc
            delta = cho_solve_banded((op.cho_factor, False), rhs.T)
            values[idx, :nr, k] = pad[:, :nr] + delta.T

    values[:, nr, :] = wall.values  # trace, bitwise (owns the z = 0 corner)
    return FluidField(values=values, time_tag=wall.time_tag)


def wall_flux_gradient(
    field: FluidField, grid: Grid, params: Sequence[SpeciesParams]
) -> np.ndarray:
    """dC/dr at r = 1 per species and z node, one-sided second order.

    Stencil (3 C_nr - 4 C_{nr-1} + C_{nr-2}) / (2 dr) written in difference
    form so constant fields give exactly zero.
    """
    nr = grid.nr
    if nr < 2:
        raise ValueError("gradient extraction needs nr >= 2")
    v = field.values
    d1 = v[:, nr, :] - v[:, nr - 1, :]
    d2 = v[:, nr - 1, :] - v[:, nr - 2, :]
    return (3.0 * d1 - d2) / (2.0 * grid.dr)


def wall_flux_integral(
    field: FluidField, grid: Grid, params: Sequence[SpeciesParams]
) -> np.ndarray:
    """dC/dr at r = 1 via (1/beta) int_0^1 dC/dz r(1-r^2) dr.

    Centered z-differences inside, one-sided at the ends, trapezoid in r.
    """
    nz = grid.nz
    if nz < 2:
        raise ValueError("integral extraction needs nz >= 2")
    v = field.values
    dz = grid.dz
    dcdz = np.empty_like(v)
    dcdz[:, :, 1:-1] = (v[:, :, 2:] - v[:, :, :-2]) / (2.0 * dz)
    dcdz[:, :, 0] = (v[:, :, 1] - v[:, :, 0]) / dz
    dcdz[:, :, -1] = (v[:, :, -1] - v[:, :, -2]) / dz

    trap = np.full(grid.nr + 1, grid.dr)
    trap[0] = trap[-1] = grid.dr / 2.0
    wq = grid.radial_weight() * trap
    flux = np.einsum("ijk,j->ik", dcdz, wq)
    betas = np.array([s.beta_f for s in params])
    return flux / betas[:, None]
