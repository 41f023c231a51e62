"""Augmented and multi-series MZ tests."""

from .errors import ValidationError
from .mz import _run
from .samples import AugmentedSample, MultiSeriesSample


def amz_test(sample, cfg, *, workers=1):
    """MZ test with extra regressors whose coefficients must all be zero.

    Each (level, horizon) regression uses ``(1, forecast, z[:, h, :])``; the
    moments are the intercept, slope minus one and every ``z`` coefficient.
    With ``q = 0`` the result equals :func:`qfopt.mz.mz_test`.
    """
    if not isinstance(sample, AugmentedSample):
        raise ValidationError("amz_test expects an AugmentedSample")
    return _run("amz", sample, cfg, workers)


def mmz_test(sample, cfg, *, workers=1):
    """Joint MZ test across the series of a :class:`MultiSeriesSample`.

    Bootstrap draws resample whole cross-series rows. Contributions are keyed
    ``(series, tau, h)``; see :func:`series_contributions` for per-series sums.
    """
    if not isinstance(sample, MultiSeriesSample):
        raise ValidationError("mmz_test expects a MultiSeriesSample")
    return _run("mmz", sample, cfg, workers)


def series_contributions(result):
    """Sum a multi-series result's contributions by series name."""
    out = {}
    for (name, *_), value in result.contributions.items():
        out[name] = out.get(name, 0.0) + value
    return out


def mmz_table(sample, cfg, *, workers=1):
    """Joint test plus one single-series MZ test per series.

    Returns a list of ``(label, TestResult)`` with the joint row first.
    """
    from .mz import mz_test

    rows = [("Joint", mmz_test(sample, cfg, workers=workers))]
    for s in sample.series:
        rows.append((s.name, mz_test(s, cfg, workers=workers)))
    return rows
