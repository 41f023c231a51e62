"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line that is printed in the terminal
summary (and immediately with ``-s``).  The Monte Carlo criteria are marked
``slow`` but run by default; together they take several minutes.
"""

import json
import math

import numpy as np
import pytest

from conftest import make_sample
from oracles import qr_lp, qr_vertex_objective
from qfopt import (ADL11, AR1, GARCH11, EvalSample, MbbConfig, MultiSeriesSample, SimConfig,
                   amz_test, emit_mz_plotdata, emit_report, emit_summary_table, fit_mz, mh_test,
                   mmz_table, mmz_test, mz_test, qr_fit, run_size_power)
from qfopt.io import parse_report_csv
from qfopt.mbb import keyed_rng
from qfopt.simlab import simulate_sample

M = 1999
LEVELS = (0.25, 0.5, 0.75)
GARCH_TRUE = (0.0, 0.05, 0.1, 0.85)
GARCH_MISSPEC = (0.0, 0.05, 0.45, 0.4)
GARCH_LEVELS = (0.01, 0.025, 0.05)

LINES = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    LINES.append(line)
    print("\n" + line)
    return ok


def study(dgp, P, l, test="mz", replications=M, **kw):
    cfg = SimConfig(dgp, P, mbb=MbbConfig(l, 1, 0), replications=replications, **kw)
    return run_size_power(cfg, test)


def garch_study(b_tilde):
    cfg = SimConfig(GARCH11(GARCH_TRUE, b_tilde), 3000, 1, GARCH_LEVELS, MbbConfig(10, 1, 0), M)
    return run_size_power(cfg, "mz")


@pytest.mark.slow
class TestMonteCarlo:
    def test_01_mz_size(self):
        rate = study(AR1(0.6, 0.6), 240, 4).rejection_rate
        assert record(1, abs(rate - 0.051) <= 0.025,
                      f"MZ size AR(1) P=240 l=4 M={M}: {rate:.4f} (target 0.051 +- 0.025)")

    def test_02_mz_power(self):
        rates = {l: study(AR1(0.6, 0.8), 480, l).rejection_rate for l in (4, 8, 12)}
        text = " ".join(f"l={l}:{r:.4f}" for l, r in rates.items())
        assert record(2, min(rates.values()) >= 0.99, f"MZ power b~=0.8 P=480 {text} (>= 0.99)")

    def test_03_garch_size(self):
        rate = garch_study(GARCH_TRUE).rejection_rate
        assert record(3, abs(rate - 0.028) <= 0.02,
                      f"MZ size GARCH P=3000 l=10: {rate:.4f} (target 0.028 +- 0.02)")

    def test_04_garch_power(self):
        rate = garch_study(GARCH_MISSPEC).rejection_rate
        assert record(4, rate >= 0.95, f"MZ power GARCH misspecified variance: {rate:.4f} (>= 0.95)")

    def test_05_amz(self):
        size = study(ADL11(0.6, 0.0), 480, 4, "amz").rejection_rate
        power = study(ADL11(0.6, 0.5), 240, 4, "amz").rejection_rate
        ok = abs(size - 0.052) <= 0.025 and power >= 0.93
        assert record(5, ok, f"AMZ size P=480: {size:.4f} (0.052 +- 0.025), "
                             f"power P=240: {power:.4f} (>= 0.93)")

    def test_08_mh(self):
        null = study(AR1(), 240, 4, "mh", replications=500).rejection_rate
        swap = study(AR1(), 480, 4, "mh", replications=500, swap_horizons=True).rejection_rate
        res = mh_test(slack_sample(), MbbConfig(4, 199, 0))
        slack = res.statistic == 0.0 and res.p_value == 1.0
        ok = null <= 0.07 and swap >= 0.8 and slack
        assert record(8, ok, f"MH null rejection {null:.4f} (<= 0.07), swapped P=480 "
                             f"{swap:.4f} (>= 0.8), slack limit stat={res.statistic} "
                             f"p={res.p_value}")


def slack_sample(P=240):
    """Median forecasts whose error scale grows steeply with the horizon."""
    rng = keyed_rng(5, 5)
    y = rng.standard_normal(P)
    scales = np.array([0.1, 1.0, 2.0, 3.0])
    fc = y[None, None, :] + scales[None, :, None] * rng.standard_normal((1, 4, P))
    return EvalSample(y, fc, [0.5])


def qr_instances(n=200):
    rng = np.random.default_rng(2024)
    for i in range(n):
        d = int(rng.integers(1, 4))
        P = int(rng.integers(d + 1, 51))
        tau = float(rng.choice([0.05, 0.25, 0.5, 0.9]))
        X = np.column_stack([np.ones(P), rng.standard_normal((P, d - 1))])
        y = X @ rng.normal(size=d) + rng.standard_t(3, P)
        yield i, X, y, tau


def test_06_qr_oracle():
    worst = 0.0
    for _, X, y, tau in qr_instances():
        fit = qr_fit(X, y, tau)
        _, lp = qr_lp(X, y, tau)
        oracle = qr_vertex_objective(X, y, tau) if X.shape[0] <= 20 else lp
        worst = max(worst, abs(fit.objective - oracle), abs(fit.objective - lp))
    assert record(6, worst <= 1e-8, f"QR objective vs vertex/LP oracle, 200 instances: "
                                    f"max gap {worst:.2e} (<= 1e-8)")


@pytest.fixture(scope="module")
def all_results():
    cfg = MbbConfig(4, 99, 3)
    base = make_sample(P=160)
    other = make_sample(P=160, b_tilde=0.4, seed=2)
    multi = MultiSeriesSample((base, EvalSample(other.y, other.forecasts, other.levels,
                                                name="b")))
    return {
        "mz": mz_test(base, cfg),
        "amz": amz_test(make_sample(P=160, with_z=True), cfg),
        "mmz": mmz_test(multi, cfg),
        "mh": mh_test(base, cfg),
        "mh multi": mh_test(multi, cfg),
    }


def test_07_contribution_identity(all_results):
    worst = 0.0
    for res in all_results.values():
        total = math.fsum(res.contributions.values())
        worst = max(worst, abs(total - res.statistic) / max(abs(res.statistic), 1e-300))
    assert record(7, worst <= 1e-9, f"sum of contributions vs statistic over "
                                    f"{len(all_results)} results: rel err {worst:.1e} (<= 1e-9)")


def test_09_determinism():
    cfg = MbbConfig(4, 59, 11)
    base = make_sample(P=120)
    aug = make_sample(P=120, with_z=True)
    multi = MultiSeriesSample((base, EvalSample(aug.y, aug.forecasts, aug.levels, name="b")))
    runs = [(mz_test, base), (amz_test, aug), (mmz_test, multi), (mh_test, base)]
    same = True
    for fn, sample in runs:
        for fmt in ("json", "csv"):
            reports = {emit_report(fn(sample, cfg, workers=w), fmt) for w in (1, 1, 4)}
            same &= len(reports) == 1
    sim = SimConfig(AR1(), 120, mbb=MbbConfig(4, 1, 11), replications=100)
    a, b = run_size_power(sim, "mz"), run_size_power(sim, "mz", workers=4)
    same &= a.statistics.tobytes() == b.statistics.tobytes()
    same &= a.bootstrap_statistics.tobytes() == b.bootstrap_statistics.tobytes()
    assert record(9, same, "byte-identical reports across reruns and worker counts 1/4")


def test_10_layouts_and_garch_pattern(all_results):
    problems = []
    summary, header, rows = parse_report_csv(emit_report(all_results["mz"], "csv"))
    if summary[0] != ["", "Stat", "90%", "95%", "99%", "p-value"]:
        problems.append("summary header")
    if header != ["", "tau=0.25", "tau=0.5", "tau=0.75", "Sum"] or rows[-1][0] != "Sum":
        problems.append("contribution matrix")
    data = json.loads(emit_report(all_results["mh"], "json"))
    if set(data["contributions"][0]) != {"tau", "h_short", "h_long", "value"}:
        problems.append("mh json keys")

    multi = MultiSeriesSample((make_sample(P=80), EvalSample(*_yfl(make_sample(P=80, seed=9)),
                                                             name="b")))
    table = emit_summary_table(mmz_table(multi, MbbConfig(4, 19, 0))).decode().splitlines()
    if [r.split(",")[0] for r in table] != ["", "Joint", "0", "b"]:
        problems.append("joint/individual summary")

    cfg = SimConfig(GARCH11(GARCH_TRUE, GARCH_MISSPEC), 3000, 1, GARCH_LEVELS,
                    MbbConfig(10, 1, 0), M)
    fits = [fit_mz(simulate_sample(cfg, keyed_rng(11, i)), 0, 1) for i in range(5)]
    plot = emit_mz_plotdata(simulate_sample(cfg, keyed_rng(11, 0)), fits[0]).decode().splitlines()
    if plot[0] != "forecast,realization,fitted_line_value,diagonal_value" or len(plot) != 3001:
        problems.append("plot data")
    pattern = all(f.alpha < 0 and f.beta < 1 for f in fits)
    if not pattern:
        problems.append("MZ line pattern")
    coef = " ".join(f"({f.alpha:.2f},{f.beta:.2f})" for f in fits)
    assert record(10, not problems, f"report layouts and GARCH tau=0.01 MZ lines {coef} "
                                    f"intercept<0 slope<1" + (f" problems: {problems}"
                                                              if problems else ""))


def _yfl(sample):
    return sample.y, sample.forecasts, sample.levels
