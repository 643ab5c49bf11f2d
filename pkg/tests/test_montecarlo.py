"""Monte Carlo estimator: path generation, determinism, and statistics."""
import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from wce_maxwell.chaos import BasisSpec, MultiIndex
from wce_maxwell.config import parse_config
from wce_maxwell.models import FieldState, TimeGrid, initial_profile
from wce_maxwell.montecarlo import (
    _sample_generator,
    mc_run,
    wiener_from_spectral,
    wiener_increments,
)
from wce_maxwell.moments import discrete_energy, energy_reference
from wce_maxwell.propagator import solve_coefficient

TIME = TimeGrid(horizon=1.0, steps=1000)


class TestWienerIncrements:
    def test_shape_and_determinism(self):
        a = wiener_increments(7, 3, TIME, 2)
        b = wiener_increments(7, 3, TIME, 2)
        assert a.shape == (1000, 2)
        np.testing.assert_array_equal(a, b)

    def test_distinct_samples_differ(self):
        a = wiener_increments(7, 3, TIME, 1)
        b = wiener_increments(7, 4, TIME, 1)
        assert not np.array_equal(a, b)

    def test_variance_concentration(self):
        # 1e5 increments at dt = 1e-3: sample variance within [0.97, 1.03]*dt.
        time = TimeGrid(horizon=100.0, steps=100000)
        draws = wiener_increments(11, 0, time, 1)[:, 0]
        var = draws.var(ddof=1)
        assert 0.97 * time.dt <= var <= 1.03 * time.dt


class TestWienerSpectral:
    def test_zero_time(self):
        xi = np.ones((1, 8))
        assert wiener_from_spectral(xi, 0.0, BasisSpec(1.0))[0] == 0.0

    def test_horizon_value_from_first_mode(self):
        # At t = T only p=1 contributes, with weight sqrt(T) = 1.
        for I in (1, 4, 32):
            xi = np.zeros((1, I))
            xi[0, 0] = 1.3
            xi[0, 1:] = 2.0  # must not matter at t = T
            value = wiener_from_spectral(xi, 1.0, BasisSpec(1.0))[0]
            assert value == pytest.approx(1.3, abs=1e-12)

    def test_partial_sums_cauchy(self):
        # Fourier-cosine tail decay: unit-coefficient partial sums at t=0.5
        # contract as the basis doubles.
        spec = BasisSpec(1.0)
        xi = np.ones((1, 128))
        v32 = wiener_from_spectral(xi[:, :32], 0.5, spec)[0]
        v64 = wiener_from_spectral(xi[:, :64], 0.5, spec)[0]
        v128 = wiener_from_spectral(xi, 0.5, spec)[0]
        assert abs(v128 - v64) < abs(v64 - v32)
        assert abs(v128 - v64) < 2e-3

    def test_distributional_consistency_with_increments(self):
        # Paths built from spectral draws (I=512) and from summed increments
        # agree in distribution at four interior times (two-sample KS below
        # the 1% critical value over 2000 paired samples).
        spec = BasisSpec(1.0)
        n = 2000
        times = (0.25, 0.5, 0.75, 1.0)
        from_inc = np.empty((n, 4))
        from_spec = np.empty((n, 4))
        for j in range(n):
            cumulative = np.cumsum(wiener_increments(5, j, TIME, 1)[:, 0])
            xi = _sample_generator(777, j).standard_normal((1, 512))
            for m, t in enumerate(times):
                from_inc[j, m] = cumulative[int(t * TIME.steps) - 1]
                from_spec[j, m] = wiener_from_spectral(xi, t, spec)[0]
        critical = 1.628 * math.sqrt(2.0 / n)
        for m in range(4):
            statistic = ks_2samp(from_inc[:, m], from_spec[:, m]).statistic
            assert statistic < critical


class TestMcRun:
    @staticmethod
    def _cfg(doc):
        cfg = parse_config(doc)
        return cfg.model_variant(), cfg.grid(), cfg.time_grid()

    def test_degenerate_noise_exact(self):
        # With sigma = 0 all samples coincide with the deterministic solve and
        # the k-th sample moment is its k-fold product, bitwise.
        model, grid, time = self._cfg("model = 1d\ncells = 64\nsteps = 200")
        result = mc_run(model, grid, time, (0.0,), samples=8, master_seed=7)
        det = solve_coefficient(MultiIndex(), model, grid, time, (0.0,)).final_state.data
        powers = [det, det * det, det * det * det, det * det * det * det]
        for order, power in enumerate(powers):
            np.testing.assert_array_equal(result.moments[order], power)

    def test_worker_count_bitwise_independence(self):
        model, grid, time = self._cfg("model = 1d\ncells = 48\nsteps = 100")
        one = mc_run(model, grid, time, (1.0,), samples=1100, master_seed=9, workers=1)
        four = mc_run(model, grid, time, (1.0,), samples=1100, master_seed=9, workers=4)
        np.testing.assert_array_equal(one.moments, four.moments)
        np.testing.assert_array_equal(one.energy_mean, four.energy_mean)
        assert one.final_energy_std_error == four.final_energy_std_error

    def test_fixed_seed_reproducible(self):
        model, grid, time = self._cfg("model = 1d\ncells = 48\nsteps = 100")
        a = mc_run(model, grid, time, (1.0,), samples=300, master_seed=3)
        b = mc_run(model, grid, time, (1.0,), samples=300, master_seed=3)
        np.testing.assert_array_equal(a.moments, b.moments)

    def test_mean_energy_law(self):
        # MC mean energy at t=1 within 3 standard errors of the linear law.
        model, grid, time = self._cfg("model = 1d")
        result = mc_run(model, grid, time, (1.0,), samples=2000, master_seed=12345)
        phi0 = discrete_energy(FieldState(model, grid, initial_profile(model, grid)))
        target = energy_reference(1.0, model, (1.0,), grid.volume, phi0)
        assert abs(result.energy_mean[-1] - target) <= 3.0 * result.final_energy_std_error

    def test_sample_count_validated(self):
        model, grid, time = self._cfg("model = 1d\ncells = 48\nsteps = 100")
        with pytest.raises(ValueError):
            mc_run(model, grid, time, (1.0,), samples=0, master_seed=0)
