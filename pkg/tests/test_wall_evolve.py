import numpy as np
import pytest

from graetzcat.model import SpeciesParams, WallField
from graetzcat.wall_evolve import WallStepInput, step_wall


def params(theta=1.0, gamma=1.0, delta=1, n=1):
    return tuple(SpeciesParams(f"s{i}", 1.0, gamma, theta, delta) for i in range(n))


def zeros(ns, nn):
    return np.zeros((ns, nn))


def trapz_z(values):
    nn = values.shape[-1]
    w = np.full(nn, 1.0 / (nn - 1))
    w[0] = w[-1] = 0.5 / (nn - 1)
    return values @ w


class TestStepWall:
    def test_constants_are_bitwise_fixed_points(self):
        wall = WallField(np.full((2, 33), 7.25), 0.0)
        out = step_wall(WallStepInput(wall, zeros(2, 33), zeros(2, 33), 0.01, params(n=2)))
        assert np.array_equal(out.values, wall.values)
        assert out.time_tag == 0.01

    def test_heat_eigenmode_decay(self):
        nz, dt, steps = 128, 1e-4, 1000
        z = np.linspace(0.0, 1.0, nz + 1)
        wall = WallField(np.cos(np.pi * z)[None, :].copy(), 0.0)
        zero = zeros(1, nz + 1)
        p = params(theta=1.0)
        for _ in range(steps):
            wall = step_wall(WallStepInput(wall, zero, zero, dt, p))
        amp = float(wall.values[0, 0])
        assert amp == pytest.approx(np.exp(-np.pi**2 * 0.1), abs=2e-2)
        # and the fully discrete eigenvalue reproduces the step map exactly
        sigma = 2.0 * (1.0 - np.cos(np.pi / nz)) * nz**2
        assert amp == pytest.approx((1.0 + dt * sigma) ** (-steps), abs=1e-12)

    def test_pure_reaction_decay(self):
        p = params(theta=0.0, delta=1)
        wall = WallField(np.ones((1, 11)), 0.0)
        for _ in range(100):
            rates = -wall.values.copy()
            wall = step_wall(WallStepInput(wall, zeros(1, 11), rates, 0.01, p))
        assert wall.values[0, 0] == pytest.approx(np.exp(-1.0), abs=1e-2)

    def test_mass_conservation_per_step(self):
        rng = np.random.default_rng(4)
        wall = WallField(rng.uniform(0.0, 5.0, (1, 65)), 0.0)
        p = params(theta=0.7)
        for _ in range(50):
            before = trapz_z(wall.values)
            wall = step_wall(WallStepInput(wall, zeros(1, 65), zeros(1, 65), 0.01, p))
            after = trapz_z(wall.values)
            assert abs(after - before) <= 1e-12 * max(1.0, abs(before))

    def test_comparison_principle(self):
        rng = np.random.default_rng(5)
        wall = WallField(rng.uniform(-2.0, 3.0, (1, 33)), 0.0)
        p = params(theta=1.3)
        lo, hi = wall.values.min(), wall.values.max()
        for _ in range(20):
            wall = step_wall(WallStepInput(wall, zeros(1, 33), zeros(1, 33), 0.05, p))
            assert wall.values.min() >= lo - 1e-12
            assert wall.values.max() <= hi + 1e-12
            lo, hi = wall.values.min(), wall.values.max()

    def test_affine_superposition(self):
        rng = np.random.default_rng(6)
        nn = 41
        p = params(theta=0.9, gamma=2.0, delta=-1)

        def step(w, f, r):
            return step_wall(
                WallStepInput(WallField(w, 0.0), f, r, 0.02, p)
            ).values

        w1, w2 = rng.standard_normal((2, 1, nn))
        f1, f2 = rng.standard_normal((2, 1, nn))
        r1, r2 = rng.standard_normal((2, 1, nn))
        combined = step(w1 + w2, f1 + f2, r1 + r2)
        # affine in (wall, flux, rates): the homogeneous parts superpose
        zero = step(zeros(1, nn), zeros(1, nn), zeros(1, nn))
        split = step(w1, f1, r1) + step(w2, f2, r2) - zero
        assert np.allclose(combined, split, atol=1e-12)

    def test_flux_sign_and_gamma(self):
        # positive wall gradient of the bulk drains the surface
        p = (SpeciesParams("s", 1.0, 3.0, 0.0, 1),)
        wall = WallField(np.full((1, 9), 2.0), 0.0)
        flux = np.full((1, 9), 0.5)
        out = step_wall(WallStepInput(wall, flux, zeros(1, 9), 0.1, p))
        assert np.allclose(out.values, 2.0 - 0.1 * 3.0 * 0.5)

    def test_bad_dt_rejected(self):
        wall = WallField(np.ones((1, 9)), 0.0)
        with pytest.raises(ValueError):
            step_wall(WallStepInput(wall, zeros(1, 9), zeros(1, 9), 0.0, params()))

    def test_shape_mismatch_rejected(self):
        wall = WallField(np.ones((1, 9)), 0.0)
        with pytest.raises(ValueError):
            step_wall(WallStepInput(wall, zeros(1, 8), zeros(1, 9), 0.1, params()))
