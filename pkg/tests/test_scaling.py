import numpy as np
import pytest

from intrinsic import (
    DataError,
    DegenerateExponentError,
    GeneratorKind,
    GeneratorSpec,
    InsufficientEventsError,
    InsufficientTailError,
    UnderdeterminedFitError,
    dc_count_law,
    fit_power_law,
    generate_pareto,
    generate_series,
    overshoot_law,
    tail_exponent,
)
from intrinsic.scaling import LawSample, ThresholdGrid
from conftest import make_series, random_walk_series
from reference import naive_avg_overshoot, naive_count_dc

GRID_X = np.geomspace(0.0005, 0.05, 12)


class TestFitPowerLaw:
    def test_recovers_exact_law(self):
        x = np.geomspace(0.001, 0.05, 12)
        y = (x / 0.05) ** -2.0
        fit = fit_power_law(list(zip(x, y)))
        assert fit.E == pytest.approx(-2.0, abs=1e-9)
        assert fit.C == pytest.approx(0.05, rel=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.n_points == 12

    def test_exactness_over_random_parameter_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            c = float(np.exp(rng.uniform(np.log(1e-4), np.log(1e2))))
            e = float(rng.uniform(0.2, 4.0)) * (1.0 if rng.random() < 0.5 else -1.0)
            y = (GRID_X / c) ** e
            fit = fit_power_law(list(zip(GRID_X, y)))
            residuals = np.log(y) - (fit.E * np.log(GRID_X) + fit.log_intercept)
            assert np.max(np.abs(residuals)) < 1e-9
            assert fit.E == pytest.approx(e, abs=1e-9)
            assert np.log(fit.C) == pytest.approx(np.log(c), abs=1e-9)

    def test_flat_data_is_degenerate(self):
        with pytest.raises(DegenerateExponentError):
            fit_power_law([(0.001, 7.0), (0.01, 7.0), (0.1, 7.0)])

    def test_underdetermined(self):
        with pytest.raises(UnderdeterminedFitError):
            fit_power_law([(0.01, 2.0)])
        with pytest.raises(UnderdeterminedFitError):
            fit_power_law([(0.01, 2.0), (0.01, 3.0)])

    def test_rejects_nonpositive_samples(self):
        with pytest.raises(DataError):
            fit_power_law([(0.01, 0.0), (0.02, 1.0)])
        with pytest.raises(DataError):
            fit_power_law([(-0.01, 1.0), (0.02, 1.0)])

    def test_noisy_law_recovery_spread(self):
        # multiplicative noise of 5 percent; exponent recovered within 0.05
        # across one thousand seeded replays
        master = np.random.default_rng(2024)
        seeds = master.integers(0, 2**63, 1000)
        worst = 0.0
        for seed in seeds:
            rng = np.random.default_rng(int(seed))
            y = (GRID_X / 0.012) ** -1.7 * np.exp(0.05 * rng.standard_normal(12))
            fit = fit_power_law(list(zip(GRID_X, y)))
            worst = max(worst, abs(fit.E + 1.7))
        assert worst < 0.05

    def test_argument_scaling_moves_c_only(self):
        rng = np.random.default_rng(5)
        y = (GRID_X / 0.01) ** 1.3 * np.exp(0.01 * rng.standard_normal(12))
        base = fit_power_law(list(zip(GRID_X, y)))
        for lam in (0.5, 3.0, 250.0):
            scaled = fit_power_law(list(zip(lam * GRID_X, y)))
            assert scaled.E == pytest.approx(base.E, rel=1e-12)
            assert scaled.C == pytest.approx(lam * base.C, rel=1e-9)

    def test_permutation_invariance_is_exact(self):
        rng = np.random.default_rng(6)
        y = (GRID_X / 0.02) ** -1.1 * np.exp(0.1 * rng.standard_normal(12))
        samples = [LawSample(float(a), float(b)) for a, b in zip(GRID_X, y)]
        base = fit_power_law(samples)
        for _ in range(5):
            perm = list(samples)
            rng.shuffle(perm)
            other = fit_power_law(perm)
            assert other.E == base.E
            assert other.C == base.C
            assert other.r_squared == base.r_squared


class TestThresholdGrid:
    def test_default_grid(self):
        grid = ThresholdGrid.default()
        assert len(grid) == 12
        assert grid.thresholds[0] == pytest.approx(0.0005)
        assert grid.thresholds[-1] == pytest.approx(0.05)

    def test_log_spacing(self):
        grid = ThresholdGrid.log_spaced(0.001, 0.1, 5)
        ratios = grid.thresholds[1:] / grid.thresholds[:-1]
        assert ratios == pytest.approx(np.full(4, ratios[0]))

    def test_validation(self):
        with pytest.raises(DataError):
            ThresholdGrid([0.01, 0.01])
        with pytest.raises(DataError):
            ThresholdGrid([0.02, 0.01])
        with pytest.raises(DataError):
            ThresholdGrid([0.0, 0.01])
        with pytest.raises(DataError):
            ThresholdGrid([0.01, 1.0])
        with pytest.raises(DataError):
            ThresholdGrid.log_spaced(0.01, 0.001, 5)
        with pytest.raises(DataError):
            ThresholdGrid.log_spaced(0.001, 0.01, 1)


class TestEventCountLaw:
    def test_constant_series_insufficient(self):
        with pytest.raises(InsufficientEventsError):
            dc_count_law(make_series([5.0] * 1000))

    def test_gbm_counts_decrease_and_fit_tightly(self):
        series = generate_series(
            GeneratorSpec(GeneratorKind.GEOMETRIC_BROWNIAN_MOTION, n=10**6, seed=21, sigma=1e-4)
        )
        result = dc_count_law(series, ThresholdGrid.log_spaced(0.0005, 0.02, 12))
        counts = [s.y for s in result.samples]
        assert all(a > b for a, b in zip(counts, counts[1:]))
        assert result.fit.r_squared > 0.99
        assert result.fit.E < 0.0

    def test_min_count_excludes_sparse_thresholds(self):
        series = generate_series(
            GeneratorSpec(GeneratorKind.GEOMETRIC_BROWNIAN_MOTION, n=50_000, seed=2, sigma=1e-4)
        )
        strict = dc_count_law(series, min_count=50)
        assert all(s.y >= 50 for s in strict.samples)

    def test_samples_match_counts_exactly(self, rng):
        series = random_walk_series(rng, n=5000, sigma=0.004)
        grid = ThresholdGrid.log_spaced(0.001, 0.02, 6)
        result = dc_count_law(series, grid, min_count=1)
        for s in result.samples:
            assert s.y == naive_count_dc(series.time, series.price, s.x)


class TestOvershootLaw:
    def test_sawtooth_has_no_positive_overshoot(self):
        series = generate_series(
            GeneratorSpec(GeneratorKind.SAWTOOTH, n=200, seed=0, amplitude=0.01)
        )
        with pytest.raises(InsufficientEventsError):
            overshoot_law(series, ThresholdGrid([0.01, 0.02]), min_count=1)

    def test_matches_reference_bit_for_bit(self, rng):
        series = random_walk_series(rng, n=10_000, sigma=0.003)
        grid = ThresholdGrid.log_spaced(0.001, 0.01, 8)
        result = overshoot_law(series, grid, min_count=1)
        for s in result.samples:
            assert s.y == naive_avg_overshoot(series.time, series.price, s.x)

    def test_gbm_overshoot_tracks_threshold(self):
        series = generate_series(
            GeneratorSpec(GeneratorKind.GEOMETRIC_BROWNIAN_MOTION, n=300_000, seed=8, sigma=1e-4)
        )
        result = overshoot_law(series, ThresholdGrid.log_spaced(0.0005, 0.005, 6))
        for s in result.samples:
            assert 0.8 <= s.y / s.x <= 1.2
        assert result.fit.E == pytest.approx(1.0, abs=0.2)


class TestTailExponent:
    def test_hill_on_exact_pareto(self):
        x = generate_pareto(GeneratorSpec(GeneratorKind.PARETO_SAMPLES, n=10**5, seed=0, alpha=2.5))
        est = tail_exponent(x, 1.0, "hill")
        assert est.alpha == pytest.approx(2.5, abs=0.03)
        assert est.stderr == pytest.approx(1.5 / np.sqrt(10**5), rel=0.1)
        assert est.n_tail == 10**5

    def test_ccdf_on_exact_pareto(self):
        x = generate_pareto(GeneratorSpec(GeneratorKind.PARETO_SAMPLES, n=10**5, seed=0, alpha=2.5))
        est = tail_exponent(x, 1.0, "ccdf")
        assert est.method == "ccdf"
        assert est.alpha == pytest.approx(2.5, abs=0.1)

    def test_insufficient_tail(self):
        with pytest.raises(InsufficientTailError):
            tail_exponent(np.linspace(0.1, 0.9, 100), 1.0)
        with pytest.raises(InsufficientTailError):
            tail_exponent(np.full(9, 2.0), 1.0)

    def test_joint_rescale_is_exact_for_powers_of_two(self):
        x = generate_pareto(GeneratorSpec(GeneratorKind.PARETO_SAMPLES, n=2000, seed=4, alpha=3.0))
        base = tail_exponent(x, 1.0, "hill")
        for k in (0.25, 2.0, 4096.0):
            scaled = tail_exponent(k * x, k * 1.0, "hill")
            assert scaled.alpha == base.alpha

    def test_joint_rescale_approx_for_arbitrary_factor(self):
        x = generate_pareto(GeneratorSpec(GeneratorKind.PARETO_SAMPLES, n=2000, seed=4, alpha=3.0))
        base = tail_exponent(x, 1.0, "hill")
        scaled = tail_exponent(3.7 * x, 3.7, "hill")
        assert scaled.alpha == pytest.approx(base.alpha, rel=1e-12)

    def test_bad_arguments(self):
        x = np.linspace(1.0, 2.0, 100)
        with pytest.raises(DataError):
            tail_exponent(x, 0.0)
        with pytest.raises(DataError):
            tail_exponent(x, 1.0, method="mle")

    def test_hill_boundary_count(self):
        x = np.geomspace(1.0, 10.0, 10)
        est = tail_exponent(x, 1.0, "hill")
        assert est.n_tail == 10
        with pytest.raises(InsufficientTailError):
            tail_exponent(x[:-1], 1.0, "hill")
