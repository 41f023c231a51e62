"""Multi-horizon, multi-quantile Mincer-Zarnowitz autocalibration test.

For every (level, horizon) cell the realisation is quantile-regressed on an
intercept and the forecast (plus optional augmenting regressors). Under
autocalibration the intercept is 0 and the slope is 1; the statistic is
``P`` times the sum of squared deviations from those values.
"""

import math

import numpy as np

from .errors import ValidationError
from .mbb import MbbConfig  # noqa: F401  (re-exported for convenience)
from .qr import qr_fit
from .results import finish, run_draws
from .samples import AugmentedSample, EvalSample, MultiSeriesSample, require_length


def _horizon_index(sample, h):
    hits = np.flatnonzero(sample.horizons == int(h))
    if hits.size == 0:
        raise ValidationError(f"horizon {h} not in {sample.horizons.tolist()}")
    return int(hits[0])


def _design(sample, k, j):
    fc = sample.forecasts[k, j]
    cols = [np.ones(sample.P), fc]
    if isinstance(sample, AugmentedSample):
        cols.extend(sample.z[:, j, i] for i in range(sample.q))
    return np.column_stack(cols)


def fit_mz(sample, k, h):
    """Quantile MZ regression for level index ``k`` and horizon value ``h``.

    With an :class:`AugmentedSample` the augmenting regressors for that
    horizon are appended to the design.
    """
    if not 0 <= k < sample.K:
        raise ValidationError(f"level index {k} out of range for K={sample.K}")
    j = _horizon_index(sample, h)
    return qr_fit(_design(sample, k, j), sample.y, sample.levels[k], horizon=sample.horizons[j])


def moments(fit):
    """Deviations from the null: intercept, slope - 1, then any extra coefficients."""
    m = np.array(fit.coefficients, dtype=float)
    m[1] -= 1.0
    return m


def mz_statistic(fits, P):
    """Statistic and per-cell contributions from already fitted regressions.

    Parameters
    ----------
    fits : dict
        Cell key -> :class:`~qfopt.qr.QrFit`.
    P : int
        Evaluation sample length.

    Returns
    -------
    statistic : float
    contributions : dict
        Cell key -> ``P * sum(moments**2)``; their exact sum is the statistic.
    """
    contributions = {key: P * math.fsum(moments(fit) ** 2) for key, fit in fits.items()}
    return math.fsum(contributions.values()), contributions


class MzEngine:
    """Full-sample fits plus cheap evaluation of bootstrap draws.

    Works for single, augmented and multi-series samples; cell keys are
    ``(tau, h)`` for one series and ``(series, tau, h)`` otherwise.
    """

    def __init__(self, sample):
        require_length(sample)
        self.P = sample.P
        multi = isinstance(sample, MultiSeriesSample)
        series = sample.series if multi else (sample,)
        self.cells = []
        for s in series:
            for k, tau in enumerate(s.levels):
                for j, h in enumerate(s.horizons):
                    key = (float(tau), int(h))
                    if multi:
                        key = (s.name,) + key
                    self.cells.append((key, _design(s, k, j), s.y, float(tau), int(h)))
        self.fits = {key: qr_fit(X, y, tau, h) for key, X, y, tau, h in self.cells}
        self.statistic, self.contributions = mz_statistic(self.fits, self.P)
        self.kappa = sum(f.coefficients.size for f in self.fits.values())
        self._coef = [self.fits[key].coefficients for key, *_ in self.cells]

    def draw(self, idx):
        """Bootstrap statistic for one index vector, centred at the full-sample fits."""
        parts = []
        for (key, X, y, tau, h), base in zip(self.cells, self._coef):
            fit = qr_fit(X[idx], y[idx], tau, h)
            parts.append(math.fsum((fit.coefficients - base) ** 2))
        return self.P * math.fsum(parts)

    def coefficients(self):
        return {key: tuple(float(c) for c in fit.coefficients) for key, fit in self.fits.items()}


def _run(name, sample, cfg, workers):
    engine = MzEngine(sample)
    boot, failures = run_draws(engine.draw, engine.P, cfg, workers)
    return finish(name, engine.statistic, engine.contributions, engine.kappa, engine.P, cfg,
                  boot, failures, engine.coefficients())


def mz_test(sample, cfg, *, workers=1):
    """Block-bootstrap MZ autocalibration test.

    Parameters
    ----------
    sample : EvalSample
    cfg : MbbConfig
    workers : int, optional
        Threads used for bootstrap draws; the result does not depend on it.

    Returns
    -------
    TestResult
    """
    if not isinstance(sample, EvalSample):
        raise ValidationError("mz_test expects an EvalSample")
    return _run("mz", sample, cfg, workers)
