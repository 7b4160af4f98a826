import math

import numpy as np
import pytest

from graetzcat.coupler import CouplerSettings, Snapshot, run_simulation
from graetzcat.model import FluidField, InitialData, WallField
from graetzcat.qualcheck import (
    build_envelope,
    check_envelopes,
    check_nonnegativity,
    energy_growth_report,
)
from graetzcat.model import SpeciesParams

from conftest import constant_config


def snap(t, wall, fmin, fmax, station=None):
    wall = np.asarray(wall, dtype=float)
    ns, nn = wall.shape
    if station is None:
        station = np.zeros((ns, nn))
    return Snapshot(
        time=t,
        wall=wall,
        fluid_min=np.asarray(fmin, dtype=float),
        fluid_max=np.asarray(fmax, dtype=float),
        station_energy=station,
        rates_sup=0.0,
        wall_rate_sup=0.0,
        iterations=1,
        residuals=(0.0,),
    )


class TestNonnegativity:
    def test_positive_fields_pass(self):
        f = FluidField(np.full((1, 5, 5), 0.3), 0.0)
        w = WallField(np.full((1, 5), 0.2), 0.0)
        rep = check_nonnegativity(f, w)
        assert rep.passed and rep.violation_count == 0

    def test_tiny_negative_within_tolerance(self):
        vals = np.full((1, 5, 5), 0.3)
        vals[0, 2, 2] = -1e-9
        rep = check_nonnegativity(FluidField(vals, 0.0), WallField(np.zeros((1, 5)), 0.0))
        assert rep.passed

    def test_real_negative_reported_with_location(self):
        vals = np.full((1, 5, 5), 0.3)
        vals[0, 3, 1] = -1e-3
        rep = check_nonnegativity(FluidField(vals, 0.0), WallField(np.zeros((1, 5)), 0.0))
        assert not rep.passed
        v = rep.violations[0]
        assert (v.species, v.where, v.index) == (0, "fluid", (3, 1))
        assert v.value == pytest.approx(-1e-3)

    def test_wall_violation_located(self):
        wall = np.zeros((2, 7))
        wall[1, 4] = -0.5
        rep = check_nonnegativity(FluidField(np.zeros((2, 3, 7)), 0.0), WallField(wall, 0.0))
        assert not rep.passed
        assert rep.violations[0].where == "wall"
        assert rep.violations[0].index == (4,)

    def test_bad_tol_rejected(self):
        with pytest.raises(ValueError):
            check_nonnegativity(
                FluidField(np.zeros((1, 3, 3)), 0.0), WallField(np.zeros((1, 3)), 0.0), tol=-1.0
            )


class TestEnvelopes:
    def params(self):
        return (
            SpeciesParams("down", 1.0, 1.0, 1.0, -1),
            SpeciesParams("up", 1.0, 1.0, 1.0, 1),
        )

    def envelope(self, lam=0.0):
        init = InitialData(
            inlet=np.array([[0.02, 0.02], [0.5, 0.5]]),
            wall_init=np.array([[0.01, 0.01, 0.01], [0.5, 0.5, 0.5]]),
        )
        return build_envelope(init, lam)

    def test_build_envelope_values(self):
        env = self.envelope()
        assert env.A_i0[0] == 0.02
        assert env.a_i0_min[1] == 0.5
        assert np.array_equal(env.A_i0, env.a_i0_max)

    def test_consumed_species_upper_bound(self):
        env = self.envelope()
        traj = [snap(0.0, [[0.01] * 3, [0.5] * 3], [0.0, 0.5], [0.02, 0.5])]
        checks = check_envelopes(traj, env, self.params())
        by = {(c.species, c.item): c for c in checks}
        assert by[("down", "upper_bound")].passed
        traj = [snap(1.0, [[0.05, 0.01, 0.01], [0.5] * 3], [0.0, 0.5], [0.02, 0.5])]
        c = {(c.species, c.item): c for c in check_envelopes(traj, env, self.params())}
        bad = c[("down", "upper_bound")]
        assert not bad.passed and bad.t_worst == 1.0

    def test_zero_rate_exp_envelope_is_the_constant_bound(self):
        env = self.envelope(lam=0.0)
        high = 0.5 + 5e-9
        traj = [snap(9.0, [[0.0] * 3, [0.5, 0.5, high]], [0.0, 0.5], [0.0, high])]
        c = {(c.species, c.item): c for c in check_envelopes(traj, env, self.params())}
        assert c[("up", "exp_bound")].passed  # within tol of a_i0_max
        traj = [snap(9.0, [[0.0] * 3, [0.5, 0.5, 0.51]], [0.0, 0.5], [0.0, 0.51])]
        c = {(c.species, c.item): c for c in check_envelopes(traj, env, self.params())}
        assert not c[("up", "exp_bound")].passed

    def test_produced_species_lower_bound_equality(self):
        env = self.envelope()
        traj = [snap(t, [[0.0] * 3, [0.5] * 3], [0.0, 0.5], [0.0, 0.5]) for t in (0.0, 1.0)]
        c = {(c.species, c.item): c for c in check_envelopes(traj, env, self.params())}
        assert c[("up", "lower_bound")].passed
        assert c[("up", "lower_bound")].worst == 0.0

    def test_exponential_growth_respected(self):
        env = self.envelope(lam=1.0)
        # produced species reaching a_i0_max * e^{t} stays legal
        high = 0.5 * math.exp(1.0) - 1e-6
        traj = [snap(1.0, [[0.0] * 3, [high] * 3], [0.0, 0.0], [0.0, high])]
        c = {(c.species, c.item): c for c in check_envelopes(traj, env, self.params())}
        assert c[("up", "exp_bound")].passed

    def test_monotone_in_tolerance(self):
        env = self.envelope()
        traj = [snap(0.5, [[0.021, 0.01, 0.01], [0.5] * 3], [0.0, 0.5], [0.021, 0.5])]
        tight = check_envelopes(traj, env, self.params(), tol=1e-8)
        loose = check_envelopes(traj, env, self.params(), tol=1e-2)
        for a, b in zip(tight, loose):
            if a.passed:
                assert b.passed

    def test_overflow_safe_for_huge_lambda(self):
        env = self.envelope(lam=80.0)
        traj = [snap(60.0, [[0.0] * 3, [0.6] * 3], [0.0, 0.0], [0.0, 0.6])]
        c = {(c.species, c.item): c for c in check_envelopes(traj, env, self.params())}
        assert c[("up", "exp_bound")].passed  # bound is astronomically large


class TestEnergyGrowth:
    def test_constant_run_has_zero_slope(self):
        cfg = constant_config(t_end=0.1, levels=(0.4, 0.9))
        _, traj = run_simulation(cfg, CouplerSettings())
        rep = energy_growth_report(traj)
        assert np.all(rep.slope == 0.0)
        assert rep.intercept[0] == pytest.approx(0.16, rel=1e-12)
        assert rep.envelope_dominates()

    def test_envelope_dominates_by_construction(self):
        rng = np.random.default_rng(12)
        traj = [
            snap(t, rng.uniform(0.0, 1.0, (1, 9)), [0.0], [1.0])
            for t in np.linspace(0.0, 2.0, 15)
        ]
        rep = energy_growth_report(traj)
        assert rep.envelope_dominates()

    def test_consumed_species_cap(self, scenario_run):
        cfg, _, report, traj, _ = scenario_run
        rep = energy_growth_report(traj)
        # consumed species: energy never exceeds A0^2, so does the envelope
        a0 = 0.02
        t_end = traj[-1].time
        assert rep.slope[0] * t_end + rep.intercept[0] <= a0**2 + 1e-8

    def test_scenario_fit_well_posed(self, scenario_run):
        _, _, _, traj, _ = scenario_run
        rep = energy_growth_report(traj)
        assert np.all(np.isfinite(rep.slope))
        assert rep.envelope_dominates()

    def test_needs_two_levels(self):
        with pytest.raises(ValueError):
            energy_growth_report([snap(0.0, [[1.0, 1.0]], [1.0], [1.0])])


class TestEnvelopeFromSolverOutput:
    def test_consumed_sup_never_grows(self, scenario_run):
        # recomputing the bound from any later snapshot of a consumed
        # species never exceeds the initial one
        cfg, _, report, traj, _ = scenario_run
        for i, s in enumerate(cfg.species):
            if s.delta != -1:
                continue
            a0 = max(cfg.initial.inlet[i].max(), cfg.initial.wall_init[i].max())
            for snap_ in traj:
                later = max(float(snap_.fluid_max[i]), float(snap_.wall[i].max()))
                assert later <= a0 + 1e-8
