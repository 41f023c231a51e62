import math

import numpy as np
import pytest

from conftest import make_sample
from oracles import mz_statistic_lp
from qfopt import (EvalSample, MbbConfig, SingularDesignError, ValidationError, emit_report,
                   fit_mz, mz_statistic, mz_test)
from qfopt.mbb import keyed_rng
from qfopt.mz import MzEngine
from qfopt.qr import QrFit
from qfopt.results import critical_values, p_value
from qfopt.simlab import AR1, SimConfig, simulate_sample

# statistic of make_sample() from LP-based fits (HiGHS), frozen
LP_STATISTIC = 296.2668549401512


def _fit(alpha, beta):
    return QrFit(np.array([alpha, beta]), 0.5, 1, 0.0, True, 0, 0.0)


class TestStatistic:
    def test_null_point(self):
        stat, contrib = mz_statistic({(0.5, 1): _fit(0.0, 1.0)}, 100)
        assert stat == 0.0 and contrib == {(0.5, 1): 0.0}

    def test_arithmetic(self):
        stat, _ = mz_statistic({(0.5, 1): _fit(0.1, 1.2)}, 100)
        assert stat == pytest.approx(5.0, rel=1e-12)

    def test_matches_lp_oracle(self, ar_sample):
        assert MzEngine(ar_sample).statistic == pytest.approx(LP_STATISTIC, rel=1e-9)
        assert mz_statistic_lp(ar_sample) == pytest.approx(LP_STATISTIC, rel=1e-12)

    def test_contributions_add_up(self, ar_sample):
        eng = MzEngine(ar_sample)
        assert math.fsum(eng.contributions.values()) == pytest.approx(eng.statistic, rel=1e-12)
        assert set(eng.contributions) == {(t, h) for t in (0.25, 0.5, 0.75) for h in (1, 2, 3, 4)}

    def test_bootstrap_centering(self, ar_sample):
        eng = MzEngine(ar_sample)
        assert eng.draw(np.arange(ar_sample.P)) == 0.0


class TestFitMz:
    def test_large_sample_null(self):
        s = simulate_sample(SimConfig(AR1(), 10000, 1, (0.5,), MbbConfig(4, 1, 0), 100),
                            keyed_rng(3, 3))
        fit = fit_mz(s, 0, 1)
        assert abs(fit.alpha) < 0.05 and abs(fit.beta - 1) < 0.05

    def test_constant_forecast(self):
        s = EvalSample(np.arange(30.0), np.ones((1, 1, 30)), [0.5])
        with pytest.raises(SingularDesignError):
            fit_mz(s, 0, 1)

    def test_unknown_horizon(self, ar_sample):
        with pytest.raises(ValidationError):
            fit_mz(ar_sample, 0, 9)


class TestCriticalValues:
    def test_order_statistic(self):
        boot = np.arange(1.0, 1001.0)
        cv = critical_values(boot)
        assert cv == {0.90: 900.0, 0.95: 950.0, 0.99: 990.0}

    def test_odd_count(self):
        cv = critical_values(np.arange(1.0, 1999.5))
        assert cv[0.95] == 1900.0  # ceil(0.95 * 1999)

    def test_p_value_convention(self):
        boot = np.arange(1.0, 1001.0)
        assert p_value(990.5, boot) == 0.01
        assert p_value(990.0, boot) == 0.011
        assert p_value(0.0, boot) == 1.0


class TestMzTest:
    def test_result_fields(self, ar_sample, small_cfg):
        res = mz_test(ar_sample, small_cfg)
        assert res.kappa == 24 and res.P == ar_sample.P
        assert res.bootstrap_statistics.shape == (49,)
        assert 0.0 <= res.p_value <= 1.0
        assert res.critical_values[0.90] <= res.critical_values[0.95] <= res.critical_values[0.99]
        assert res.p_value == np.mean(res.bootstrap_statistics >= res.statistic)

    def test_deterministic(self, ar_sample, small_cfg):
        a = emit_report(mz_test(ar_sample, small_cfg))
        b = emit_report(mz_test(ar_sample, small_cfg, workers=3))
        assert a == b

    def test_rejects_miscalibrated(self):
        s = make_sample(P=480, b_tilde=0.95)
        assert mz_test(s, MbbConfig(4, 99, 1)).p_value <= 0.02

    def test_short_sample(self):
        s = make_sample(P=19)
        with pytest.raises(ValidationError):
            mz_test(s, MbbConfig(4, 9, 1))

    def test_wrong_type(self, aug_sample, small_cfg):
        with pytest.raises(ValidationError):
            mz_test(aug_sample, small_cfg)

    def test_miscalibration_raises_mean_statistic(self):
        means = []
        for bt in (0.6, 0.7, 0.8, 0.9):
            stats = [MzEngine(make_sample(P=480, b_tilde=bt, seed=s)).statistic for s in range(20)]
            means.append(np.mean(stats))
        assert np.all(np.diff(means) > 0)
