"""Runtime checkers for the qualitative properties of computed trajectories.

These turn the a-priori statements about the continuous solution into
assertions over solver output: nonnegativity, the upper envelope for
consumed species, the lower bound and exponential envelope for produced
species, and the affine-in-time growth of the surface energy.  The schemes
in this package are monotone, so a violation beyond the small default
tolerance indicates a bug rather than discretization error.

Checkers only need per-snapshot reductions (wall vectors, bulk min/max,
station energies); they never hold full bulk fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import FluidField, InitialData, SpeciesParams, WallField

DEFAULT_TOL = 1e-8
_EXP_CLAMP = 700.0  # exp argument above this overflows float64


@dataclass(frozen=True)
class BoundEnvelope:
    """Data-derived bounds: per-species sup/inf of the initial profiles.

    a_i0_max and A_i0 are the same number under two names because the upper
    envelope of consumed species and the exponential envelope of produced
    species both start from max(sup inlet, sup wall_init).
    """

    species: tuple[str, ...]
    A_i0: np.ndarray
    a_i0_min: np.ndarray
    a_i0_max: np.ndarray
    lam: float


def build_envelope(initial: InitialData, lam: float) -> BoundEnvelope:
    sup = np.maximum(initial.inlet.max(axis=1), initial.wall_init.max(axis=1))
    inf = np.minimum(initial.inlet.min(axis=1), initial.wall_init.min(axis=1))
    if np.any(inf > sup):
        raise ValueError("initial data with inf > sup")
    return BoundEnvelope(
        species=tuple(f"s{i}" for i in range(initial.inlet.shape[0])),
        A_i0=sup.copy(),
        a_i0_min=inf,
        a_i0_max=sup.copy(),
        lam=float(lam),
    )


@dataclass(frozen=True)
class NonnegViolation:
    species: int
    where: str  # "fluid" or "wall"
    index: tuple[int, ...]
    value: float


@dataclass(frozen=True)
class NonnegReport:
    passed: bool
    violation_count: int
    violations: tuple[NonnegViolation, ...]  # capped listing, worst first

    MAX_LISTED = 32

    @classmethod
    def merge(cls, reports: Sequence["NonnegReport"]) -> "NonnegReport":
        count = sum(r.violation_count for r in reports)
        listed = [v for r in reports for v in r.violations]
        listed.sort(key=lambda v: v.value)
        return cls(
            passed=count == 0,
            violation_count=count,
            violations=tuple(listed[: cls.MAX_LISTED]),
        )


def check_nonnegativity(
    fluid: FluidField, wall: WallField, tol: float = DEFAULT_TOL
) -> NonnegReport:
    """List every grid point more negative than -tol."""
    if tol < 0.0:
        raise ValueError("tol must be >= 0")
    violations: list[NonnegViolation] = []
    fv = fluid.values
    for i, j, k in zip(*np.nonzero(fv < -tol)):
        violations.append(
            NonnegViolation(int(i), "fluid", (int(j), int(k)), float(fv[i, j, k]))
        )
    wv = wall.values
    for i, k in zip(*np.nonzero(wv < -tol)):
        violations.append(NonnegViolation(int(i), "wall", (int(k),), float(wv[i, k])))
    violations.sort(key=lambda v: v.value)
    return NonnegReport(
        passed=not violations,
        violation_count=len(violations),
        violations=tuple(violations[: NonnegReport.MAX_LISTED]),
    )


@dataclass(frozen=True)
class EnvelopeCheck:
    species: str
    item: str  # "upper_bound" | "lower_bound" | "exp_bound"
    passed: bool
    worst: float  # most violating margin, 0 when clean
    t_worst: Optional[float]


def check_envelopes(
    trajectory: Sequence,
    envelope: BoundEnvelope,
    params: Sequence[SpeciesParams],
    tol: float = DEFAULT_TOL,
) -> list[EnvelopeCheck]:
    """Per-species verdicts for the data-derived bounds along a trajectory.

    Consumed species (delta = -1) must stay below A_i0; produced species
    (delta = +1) must stay above their initial infimum and below
    a_i0_max * exp(lambda t).  Snapshots provide wall vectors and bulk
    min/max, which is exactly the information the bounds constrain.
    """
    checks: list[EnvelopeCheck] = []
    lam = envelope.lam
    for i, s in enumerate(params):
        if s.delta == -1:
            worst, t_at = 0.0, None
            cap = float(envelope.A_i0[i]) + tol
            for snap in trajectory:
                high = max(float(snap.fluid_max[i]), float(snap.wall[i].max()))
                gap = high - cap
                if gap > worst:
                    worst, t_at = gap, snap.time
            checks.append(
                EnvelopeCheck(s.name, "upper_bound", worst <= 0.0, worst, t_at)
            )
        else:
            worst, t_at = 0.0, None
            floor = float(envelope.a_i0_min[i]) - tol
            for snap in trajectory:
                low = min(float(snap.fluid_min[i]), float(snap.wall[i].min()))
                gap = floor - low
                if gap > worst:
                    worst, t_at = gap, snap.time
            checks.append(
                EnvelopeCheck(s.name, "lower_bound", worst <= 0.0, worst, t_at)
            )

            worst, t_at = 0.0, None
            a0 = float(envelope.a_i0_max[i])
            for snap in trajectory:
                bound = a0 * math.exp(min(lam * snap.time, _EXP_CLAMP)) + tol
                high = max(float(snap.fluid_max[i]), float(snap.wall[i].max()))
                gap = high - bound
                if gap > worst:
                    worst, t_at = gap, snap.time
            checks.append(
                EnvelopeCheck(s.name, "exp_bound", worst <= 0.0, worst, t_at)
            )
    return checks


@dataclass(frozen=True)
class EnergyGrowthReport:
    """Surface energy E_is(t) = int C_is^2 dz with its affine envelope,
    plus the time-integrated bulk energies per axial station."""

    times: tuple[float, ...]
    wall_energy: np.ndarray       # (ns, nt)
    slope: np.ndarray             # (ns,) envelope slope a
    intercept: np.ndarray         # (ns,) envelope intercept b = E(0)
    fluid_station_energy: np.ndarray  # (ns, nz+1): int_0^T station energy dt

    def envelope_dominates(self) -> bool:
        t = np.asarray(self.times)
        bound = self.slope[:, None] * t[None, :] + self.intercept[:, None]
        return bool(np.all(self.wall_energy <= bound + 1e-12))

    def to_dict(self) -> dict:
        return {
            "times": list(self.times),
            "wall_energy": self.wall_energy.tolist(),
            "slope": self.slope.tolist(),
            "intercept": self.intercept.tolist(),
            "fluid_station_energy": self.fluid_station_energy.tolist(),
        }


def energy_growth_report(trajectory: Sequence) -> EnergyGrowthReport:
    """Fit the minimal affine envelope a t + b over the wall energy series.

    b is pinned to the initial energy and a = max_k (E(t_k) - b) / t_k, the
    smallest slope whose line dominates every sample.
    """
    if len(trajectory) < 2:
        raise ValueError("energy growth needs at least two time levels")
    times = np.array([snap.time for snap in trajectory])
    walls = np.stack([snap.wall for snap in trajectory], axis=-1)  # (ns, nz+1, nt)
    nn = walls.shape[1]
    dz = 1.0 / (nn - 1)
    trap = np.full(nn, dz)
    trap[0] = trap[-1] = dz / 2.0
    energy = np.einsum("izt,z->it", walls * walls, trap)

    intercept = energy[:, 0].copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = (energy[:, 1:] - intercept[:, None]) / times[None, 1:]
    slope = np.maximum(ratios.max(axis=1), 0.0)

    station = np.zeros_like(trajectory[0].station_energy)
    for a, b in zip(trajectory[:-1], trajectory[1:]):
        station += (b.time - a.time) * a.station_energy

    return EnergyGrowthReport(
        times=tuple(float(t) for t in times),
        wall_energy=energy,
        slope=slope,
        intercept=intercept,
        fluid_station_energy=station,
    )
