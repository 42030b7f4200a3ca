"""
Unit tests for scalability-parameter regression.
"""
import numpy as np
import pytest

from src.tools.errors import DomainError, InsufficientDataError
from src.tools.fitting import (
    FitSettings,
    ThroughputSample,
    fit_amdahl,
    fit_ideal,
    fit_model,
    fit_usl,
    normalize,
    predict,
    predict_residence,
    select_model,
)
from src.tools.models import ModelParams, usl_capacity

P_VALUES = [1, 2, 4, 8, 16, 32, 64]


def synthetic(sigma, kappa, p_values=P_VALUES):
    params = ModelParams(sigma, kappa)
    return [(p, float(usl_capacity(params, p))) for p in p_values]


@pytest.fixture
def usl_points():
    return synthetic(0.02, 0.0001)


class TestNormalize:
    """Tests for conversion of samples to relative capacity."""

    def test_uses_p_one_sample(self):
        samples = [ThroughputSample(1, 50.0), ThroughputSample(4, 150.0)]
        points, baseline = normalize(samples)
        assert baseline == 50.0
        assert points == [(1, 1.0), (4, 3.0)]

    def test_explicit_baseline(self):
        points, baseline = normalize([ThroughputSample(2, 30.0), ThroughputSample(4, 40.0)], baseline=20.0)
        assert baseline == 20.0
        assert points == [(2, 1.5), (4, 2.0)]

    def test_missing_baseline(self):
        with pytest.raises(DomainError):
            normalize([ThroughputSample(2, 30.0)])

    def test_repeated_p_one_is_averaged(self):
        points, baseline = normalize([ThroughputSample(1, 9.0), ThroughputSample(1, 11.0)])
        assert baseline == 10.0
        assert points == [(1, 1.0)]

    def test_duplicate_p(self):
        with pytest.raises(DomainError):
            normalize([ThroughputSample(1, 1.0), ThroughputSample(2, 2.0), ThroughputSample(2, 2.1)])

    @pytest.mark.parametrize("p,x", [(0, 1.0), (1.5, 1.0), (2, 0.0), (2, -3.0)])
    def test_invalid_samples(self, p, x):
        with pytest.raises(DomainError):
            ThroughputSample(p, x)


class TestFitUSL:
    """Tests for the two-parameter fit."""

    def test_noiseless_recovery(self, usl_points):
        result = fit_usl(usl_points)
        assert result.params.sigma == pytest.approx(0.02, rel=1e-6)
        assert result.params.kappa == pytest.approx(0.0001, rel=1e-6)
        assert result.r_squared == pytest.approx(1.0)
        assert result.converged
        assert result.p_star.location == pytest.approx(np.sqrt(0.98 / 0.0001), rel=1e-6)

    def test_auto_selects_usl(self, usl_points):
        result = fit_model(usl_points)
        assert result.model_choice == "usl"
        assert result.model == "usl"

    def test_linear_data_selects_ideal(self):
        result = fit_model([(p, float(p)) for p in P_VALUES])
        assert result.model_choice == "ideal"
        assert result.params == ModelParams(0.0, 0.0)
        assert result.p_star is None

    def test_amdahl_data_has_zero_kappa(self):
        result = fit_model(synthetic(0.1, 0.0))
        assert result.params.kappa == 0.0
        assert result.params.sigma == pytest.approx(0.1, rel=1e-6)
        assert result.model_choice == "amdahl"
        assert result.p_star is None

    def test_pure_coherency_data(self):
        result = fit_usl(synthetic(0.0, 0.001))
        assert result.params.sigma == pytest.approx(0.0, abs=1e-9)
        assert result.params.kappa == pytest.approx(0.001, rel=1e-6)

    def test_noisy_replicates(self):
        rng = np.random.default_rng(2024)
        clean = np.asarray([c for _, c in synthetic(0.02, 0.0001)])
        sigmas, kappas = [], []
        for _ in range(50):
            noisy = clean * (1 + 0.01 * rng.standard_normal(len(clean)))
            noisy = noisy / noisy[0]
            result = fit_usl(list(zip(P_VALUES, noisy)))
            sigmas.append(result.params.sigma)
            kappas.append(result.params.kappa)
        assert np.median(sigmas) == pytest.approx(0.02, rel=0.2)
        assert np.median(kappas) == pytest.approx(0.0001, rel=0.2)

    def test_scale_equivariance(self):
        samples = [ThroughputSample(p, 250.0 * c) for p, c in synthetic(0.05, 0.0005)]
        # a power-of-two factor keeps the normalized capacities bit-identical
        scaled = [ThroughputSample(s.p, 2.0 ** -10 * s.x) for s in samples]
        first = fit_usl(normalize(samples)[0])
        second = fit_usl(normalize(scaled)[0])
        assert first.params.sigma == pytest.approx(second.params.sigma, rel=1e-10)
        assert first.params.kappa == pytest.approx(second.params.kappa, rel=1e-10)
        assert first.p_star.location == pytest.approx(second.p_star.location, rel=1e-10)
        assert first.p_star.p_opt == second.p_star.p_opt
        assert first.r_squared == pytest.approx(second.r_squared, rel=1e-10)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            fit_usl([(1, 1.0), (2, 1.9)])

    def test_unknown_model(self, usl_points):
        with pytest.raises(DomainError):
            fit_model(usl_points, "quadratic")

    def test_x1_is_echoed(self, usl_points):
        assert fit_usl(usl_points, x1=123.0).x1_used == 123.0

    def test_residual_vector(self, usl_points):
        result = fit_usl(usl_points)
        assert len(result.residuals) == len(usl_points)
        assert max(abs(r) for r in result.residuals) < 1e-6

    def test_identifiability_warning(self):
        # kappa p(p-1) stays under 0.4% of the denominator up to p = 8
        result = fit_usl(synthetic(0.1, 1e-4, list(range(1, 9))))
        assert result.params.kappa == pytest.approx(1e-4, rel=1e-4)
        assert any("kappa" in warning for warning in result.warnings)

    def test_no_identifiability_warning_when_kappa_dominates(self, usl_points):
        assert not any("kappa" in warning for warning in fit_usl(usl_points).warnings)

    def test_to_dict(self, usl_points):
        data = fit_usl(usl_points).to_dict()
        assert set(data["scores"]) == {"ideal", "amdahl", "usl"}
        assert data["p_star"]["p_opt"] == 99


class TestNestedFits:
    """Tests for the ideal and Amdahl fits and their ordering."""

    def test_fit_amdahl_two_points(self):
        result = fit_amdahl([(1, 1.0), (2, 2.0 / 1.1)])
        assert result.params.sigma == pytest.approx(0.1, rel=1e-6)

    def test_fit_ideal_single_point(self):
        result = fit_ideal([(1, 1.0)])
        assert result.params == ModelParams(0.0, 0.0)

    @pytest.mark.parametrize("sigma,kappa", [(0.0, 0.0), (0.1, 0.0), (0.02, 0.0001), (0.3, 0.01), (0.0, 0.002)])
    def test_rss_nesting(self, sigma, kappa):
        rng = np.random.default_rng(11)
        points = [(p, c * (1 + 0.02 * rng.standard_normal())) for p, c in synthetic(sigma, kappa)]
        _, scores = select_model(points)
        assert scores["usl"].rss <= scores["amdahl"].rss <= scores["ideal"].rss

    def test_three_amdahl_points_select_amdahl(self):
        points = [(p, 1.0 / (0.1 + 0.9 / p)) for p in (1, 2, 4)]
        choice, scores = select_model(points)
        assert choice == "amdahl"
        assert scores["usl"].aicc == float("inf")
        assert scores["usl"].to_dict()["aicc"] is None
        result = fit_model(points, "auto")
        assert result.model == "amdahl"
        assert result.params.kappa == 0.0
        assert result.params.sigma == pytest.approx(0.1, rel=1e-6)


class TestPredict:
    """Tests for throughput prediction."""

    def test_ideal_rows(self):
        prediction = predict(ModelParams(0.0, 0.0), 1.0, [1, 2, 3, 4])
        assert prediction.rows == [(1, 1.0, 1.0), (2, 2.0, 2.0), (3, 3.0, 3.0), (4, 4.0, 4.0)]
        assert prediction.p_star is None

    def test_amdahl_row(self):
        prediction = predict(ModelParams(0.1, 0.0), 100.0, [11])
        p, capacity, x = prediction.rows[0]
        assert p == 11
        assert capacity == pytest.approx(5.5)
        assert x == pytest.approx(550.0)

    def test_pstar_annotation(self):
        prediction = predict(ModelParams(0.0, 0.01), 1.0, range(1, 11))
        assert prediction.p_star.p_opt == 10
        assert not prediction.retrograde

    def test_retrograde_flag(self):
        prediction = predict(ModelParams(0.0, 0.01), 1.0, [5, 20])
        assert prediction.retrograde
        assert prediction.warnings

    def test_invalid_baseline(self):
        with pytest.raises(DomainError):
            predict(ModelParams(0.1, 0.0), 0.0, [1])

    def test_residence(self):
        rows = predict_residence(ModelParams(0.1, 0.0), 0.1, 9.0, [1, 10])
        assert rows[0][2] == pytest.approx(1.0)
        # X(10) = 0.1 * 10 / 1.9, R = p / X - Z
        assert rows[1][2] == pytest.approx(10 / (1 / 1.9) - 9.0)
