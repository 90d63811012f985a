"""Rate optimization and the energy metrics."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from _oracles import best_rate_dense_grid
from conftest import make_config
from hetnet.config import default_raw
from hetnet.coverage import d2d_coverage_curve
from hetnet.errors import (
    DomainError,
    InvalidRange,
    MissingParameter,
    UnboundedObjective,
)
from hetnet.metrics import (
    PowerModel,
    average_sum_rate,
    best_constant_rate,
    energy_efficiency,
    optimal_d2d_density,
    power_model_from_raw,
    total_power,
)


class TestPowerModel:
    def test_from_raw_defaults(self):
        pm = power_model_from_raw(default_raw())
        assert (pm.eta, pm.c_0, pm.c_1, pm.c_2) == (0.3, 5.0, 0.5, 0.1)

    def test_missing_keys_listed(self):
        with pytest.raises(MissingParameter, match="c_1.*eta"):
            power_model_from_raw({"c_0": 5.0, "c_2": 0.1})

    @pytest.mark.parametrize("field,value", [
        ("eta", 0.0), ("eta", 1.5), ("c_0", -1.0), ("c_2", math.inf)])
    def test_validation(self, field, value):
        kwargs = {"eta": 0.3, "c_0": 5.0, "c_1": 0.5, "c_2": 0.1, field: value}
        with pytest.raises(InvalidRange):
            PowerModel(**kwargs)


class TestBestConstantRate:
    def test_exponential_coverage_has_lambertw_optimum(self, cfg_base):
        # cov(beta) = exp(-beta)  =>  beta* = exp(W(1)) - 1
        result = best_constant_rate(cfg_base, "d2d", lambda b: np.exp(-b))
        beta_star = math.exp(float(special.lambertw(1.0).real)) - 1.0
        assert result.beta_star == pytest.approx(beta_star, rel=1e-4)
        expected_rate = cfg_base.bandwidth * math.log2(1.0 + beta_star) \
            * math.exp(-beta_star)
        assert result.rate == pytest.approx(expected_rate, rel=1e-6)
        assert result.coverage == pytest.approx(math.exp(-beta_star), rel=1e-4)

    def test_matches_dense_grid_oracle_on_real_curve(self, cfg_base):
        fn = lambda b: d2d_coverage_curve(cfg_base, b)
        result = best_constant_rate(cfg_base, "d2d", fn)
        beta_ref, rate_ref = best_rate_dense_grid(cfg_base.bandwidth, fn)
        assert result.rate >= rate_ref * (1.0 - 1e-6)
        assert result.beta_star == pytest.approx(beta_ref, rel=2e-3)

    def test_refinement_beats_coarse_grid(self, cfg_base):
        fn = lambda b: np.exp(-0.37 * b ** 1.1)
        result = best_constant_rate(cfg_base, "d2d", fn)
        coarse_grid = np.logspace(-4, 6, 251)
        coarse_best = float(np.max(
            cfg_base.bandwidth * np.log2(1 + coarse_grid) * fn(coarse_grid)))
        assert result.rate >= coarse_best

    def test_unbounded_objective(self, cfg_base):
        with pytest.raises(UnboundedObjective):
            best_constant_rate(cfg_base, "d2d", lambda b: np.ones_like(b))

    def test_bad_tier_and_bad_fn(self, cfg_base):
        with pytest.raises(InvalidRange):
            best_constant_rate(cfg_base, "uplink", lambda b: np.exp(-b))
        with pytest.raises(InvalidRange):
            best_constant_rate(cfg_base, "d2d", lambda b: np.exp(-b)[:-3])


class TestSumRateAndPower:
    def test_average_sum_rate_combines_tiers(self, cfg_base):
        from hetnet.metrics import RateResult

        rate_c = RateResult(beta_star=1.0, rate=10e6, coverage=0.5)
        rate_d = RateResult(beta_star=1.0, rate=3e6, coverage=0.5)
        n_pairs = cfg_base.lambda_d * math.pi * cfg_base.radius ** 2
        expected = cfg_base.n_cue * 10e6 + n_pairs * 3e6
        assert average_sum_rate(cfg_base, rate_c, rate_d) == pytest.approx(
            expected, rel=1e-15)

    def test_total_power_frozen_value(self):
        cfg = make_config(u_c=14, t_c=70, lambda_d=1e-4)
        pm = power_model_from_raw(default_raw())
        assert total_power(cfg, pm) == 61.48353873657587

    def test_total_power_decomposition(self, cfg_base):
        pm = PowerModel(eta=0.5, c_0=2.0, c_1=0.25, c_2=0.05)
        n_pairs = cfg_base.lambda_d * math.pi * cfg_base.radius ** 2
        expected = (cfg_base.p_c + n_pairs * cfg_base.p_d) / 0.5 \
            + 2.0 + 20 * 0.25 + (4 + 2 * n_pairs) * 0.05
        assert total_power(cfg_base, pm) == pytest.approx(expected, rel=1e-15)

    def test_energy_efficiency(self):
        assert energy_efficiency(10.0, 5.0) == 2.0
        with pytest.raises(DomainError):
            energy_efficiency(10.0, 0.0)
        with pytest.raises(DomainError):
            energy_efficiency(10.0, math.inf)


class TestOptimalDensity:
    def test_frozen_value_at_unit_threshold(self, cfg_base):
        assert optimal_d2d_density(cfg_base, 1.0) == 0.00010744496201115042

    def test_threshold_scaling(self, cfg_base):
        mu = 2.0 / cfg_base.alpha_d
        base = optimal_d2d_density(cfg_base, 1.0)
        assert optimal_d2d_density(cfg_base, 8.0) == pytest.approx(
            base * 8.0 ** (-mu), rel=1e-14)

    def test_maximizes_area_rate(self, cfg_base):
        # lambda * coverage(lambda) is single-peaked; the closed form must
        # beat its neighbours on a fine grid
        beta = 1.0
        star = optimal_d2d_density(cfg_base, beta)

        def area_rate(lam: float) -> float:
            cfg = make_config(lambda_d=lam)
            return lam * float(d2d_coverage_curve(cfg, beta))

        assert area_rate(star) > area_rate(star * 1.05)
        assert area_rate(star) > area_rate(star / 1.05)

    def test_domain(self, cfg_base):
        with pytest.raises(DomainError):
            optimal_d2d_density(cfg_base, 0.0)
        with pytest.raises(DomainError):
            optimal_d2d_density(cfg_base, -1.0)
