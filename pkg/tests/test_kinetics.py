import dataclasses

import numpy as np
import pytest

from graetzcat.kinetics import (
    KineticsModel,
    co_oxidation,
    estimate_lipschitz,
    eval_rates,
    linear_consumption,
    verify_hypotheses,
    zero_model,
)
from graetzcat.model import SpeciesParams


def consuming(n):
    return tuple(SpeciesParams(f"s{i}", 1.0, 1.0, 1.0, -1) for i in range(n))


CO_OX_PARAMS = (
    SpeciesParams("CO", 1.0, 1.0, 1.0, -1),
    SpeciesParams("O2", 1.0, 1.0, 1.0, -1),
    SpeciesParams("CO2", 1.0, 1.0, 1.0, 1),
    SpeciesParams("T", 1.0, 1.0, 1.0, 1),
)


class TestEvalRates:
    def test_zero_model(self):
        m = zero_model(3)
        assert np.all(eval_rates(m, np.array([0.1, -0.5, 2.0])) == 0.0)

    def test_mass_action_example(self):
        m = co_oxidation(prefactor=1.0, activation_temp=0.0, heat_release=7.0)
        r = eval_rates(m, np.array([0.02, 0.05, 0.0, 500.0]))
        assert r[0] == pytest.approx(0.001, abs=1e-15)
        assert r[1] == pytest.approx(0.001, abs=1e-15)
        assert r[2] == pytest.approx(0.001, abs=1e-15)
        assert r[3] == pytest.approx(0.007, abs=1e-15)

    def test_absent_reactant_silences_consumers(self):
        m = co_oxidation(prefactor=400.0, activation_temp=3000.0, heat_release=150.0)
        r = eval_rates(m, np.array([0.0, 0.05, 0.01, 500.0]))
        assert np.all(r == 0.0)

    def test_clipping_idempotence(self):
        m = co_oxidation(prefactor=2.0, activation_temp=100.0, heat_release=1.0)
        rng = np.random.default_rng(0)
        x = rng.uniform(-1.0, 1.0, (200, 4)) * np.array([0.1, 0.1, 0.1, 600.0])
        assert np.array_equal(eval_rates(m, x), eval_rates(m, np.maximum(x, 0.0)))

    def test_non_finite_input_names_the_species(self):
        m = zero_model(3)
        with pytest.raises(ValueError, match="species index 1"):
            eval_rates(m, np.array([0.0, np.nan, 1.0]))

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            eval_rates(zero_model(3), np.zeros(4))


class TestVerifyHypotheses:
    def test_zero_model_passes_everything(self):
        rep = verify_hypotheses(zero_model(2), consuming(2), seed=1)
        assert rep.all_pass
        assert rep.samples_used >= 1000

    def test_linear_consumption_passes(self):
        # H3 sum collapses to sum (x_i - y_i)^2 >= 0 when all species consume
        rep = verify_hypotheses(linear_consumption(3), consuming(3), seed=2)
        assert rep.all_pass

    def test_broken_model_flagged_with_location(self):
        def rate(x):
            out = np.zeros_like(x)
            out[..., 1] = -1.0
            return out

        bad = KineticsModel("bad", 2, rate, (np.zeros(2), np.ones(2)))
        rep = verify_hypotheses(bad, consuming(2), seed=3)
        assert not rep.h1_pass
        assert rep.worst_h1.species == 1
        assert rep.worst_h1.magnitude == pytest.approx(1.0)

    def test_h2_violation_detected(self):
        # a consumer that keeps reacting with its own species absent
        def rate(x):
            out = np.zeros_like(x)
            out[..., 0] = x[..., 1]
            return out

        m = KineticsModel("sticky", 2, rate, (np.zeros(2), np.ones(2)))
        rep = verify_hypotheses(m, consuming(2), seed=4)
        assert not rep.h2_pass
        assert rep.worst_h2.species == 0

    def test_h3_violation_detected_for_antidissipative_law(self):
        def rate(x):  # produced species whose rate grows with other species
            out = np.zeros_like(x)
            out[..., 1] = x[..., 0]
            return out

        params = (
            SpeciesParams("a", 1.0, 1.0, 1.0, -1),
            SpeciesParams("b", 1.0, 1.0, 1.0, 1),
        )
        rep = verify_hypotheses(KineticsModel("p", 2, rate, (np.zeros(2), np.ones(2))), params, seed=5)
        assert not rep.h3_pass

    def test_shipped_surrogate_h1_h2(self, scenario):
        cfg, _ = scenario
        rep = verify_hypotheses(cfg.kinetics, cfg.species, seed=0)
        assert rep.h1_pass
        assert rep.h2_pass
        # Active production is irreconcilable with the monotonicity
        # hypothesis: any channel with delta = +1 whose rate moves with the
        # state admits pairs driving the weighted sum negative.  The sampler
        # must find and report this rather than hide it.
        assert not rep.h3_pass
        assert rep.worst_h3.magnitude > 1e-6

    def test_determinism(self):
        a = verify_hypotheses(linear_consumption(3), consuming(3), seed=9)
        b = verify_hypotheses(linear_consumption(3), consuming(3), seed=9)
        assert dataclasses.asdict(a) == dataclasses.asdict(b)

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValueError):
            verify_hypotheses(zero_model(2), consuming(3), seed=0)


class TestEstimateLipschitz:
    def test_linear_map(self):
        def rate(x):
            out = np.zeros_like(x)
            out[..., 0] = 2.0 * x[..., 0]
            return out

        m = KineticsModel("lin", 2, rate, (np.zeros(2), np.ones(2)))
        k, lam = estimate_lipschitz(m, seed=0)
        assert 2.0 <= lam <= 2.5

    def test_zero_model_is_exactly_zero(self):
        _, lam = estimate_lipschitz(zero_model(4), seed=0)
        assert lam == 0.0

    def test_monotone_in_sample_count(self):
        m = co_oxidation(prefactor=400.0, activation_temp=3000.0, heat_release=150.0)
        k1, _ = estimate_lipschitz(m, seed=5, samples=16384)
        k2, _ = estimate_lipschitz(m, seed=5, samples=32768)
        assert np.all(k2 >= k1)

    def test_against_dense_lattice_sweep(self):
        # brute-force difference quotients along lattice edges
        box_hi = np.array([0.1, 0.1, 0.1, 600.0])
        m = co_oxidation(1.0, 3000.0, 1.0, box_hi=box_hi)
        n = 24
        axes = [np.linspace(0.0, h, n) for h in box_hi]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        rates = m.rate(grid)
        brute = 0.0
        for ax in range(4):
            dx = box_hi[ax] / (n - 1)
            brute = max(brute, float((np.abs(np.diff(rates, axis=ax)) / dx).max()))
        _, lam = estimate_lipschitz(m, seed=0)
        raw = lam / 1.25
        assert abs(raw - brute) / brute < 0.10
