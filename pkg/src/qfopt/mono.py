"""Test that expected quantile loss does not fall as the horizon grows.

Moments are mean loss differences (longer minus shorter horizon) for every
level and horizon pair; the null says all are nonnegative. The statistic
sums squared negative parts of HAC-studentised means. Bootstrap draws use a
block variance and keep only moments that are close to binding.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ValidationError
from .qr import pinball_loss
from .results import finish, run_draws
from .samples import MultiSeriesSample, as_series_list

log = logging.getLogger(__name__)

MIN_P = 20
SCALE_TOL = 1e-10


@dataclass(frozen=True)
class HacConfig:
    """Bartlett-kernel bandwidth; ``None`` means "use the block length"."""

    bandwidth: int = None

    def __post_init__(self):
        if self.bandwidth is not None:
            if int(self.bandwidth) != self.bandwidth or self.bandwidth < 0:
                raise ValidationError(f"bandwidth must be a nonnegative integer, got {self.bandwidth}")
            object.__setattr__(self, "bandwidth", int(self.bandwidth))

    def resolve(self, block_length):
        return block_length if self.bandwidth is None else self.bandwidth


@dataclass(frozen=True, eq=False)
class LossDiffPanel:
    """Loss differences, one row per ``keys`` entry and one column per period."""

    keys: tuple
    values: np.ndarray

    @property
    def kappa(self):
        return len(self.keys)

    @property
    def P(self):
        return self.values.shape[1]


def loss_differences(sample):
    """Pinball-loss differences for every level and pair of horizons ``h_i < h_j``.

    Row ``(tau, h_i, h_j)`` holds ``loss(h_j) - loss(h_i)``; under the null its
    mean is nonnegative. A multi-series sample stacks the per-series panels
    with keys ``(series, tau, h_i, h_j)``.
    """
    multi = isinstance(sample, MultiSeriesSample)
    keys, rows = [], []
    for s in as_series_list(sample):
        if s.H < 2:
            raise ValidationError(f"the monotonicity test needs at least two horizons, got H={s.H}")
        for k, tau in enumerate(s.levels):
            losses = [pinball_loss(s.y - s.forecasts[k, j], tau) for j in range(s.H)]
            for i in range(s.H):
                for j in range(i + 1, s.H):
                    key = (float(tau), int(s.horizons[i]), int(s.horizons[j]))
                    keys.append((s.name,) + key if multi else key)
                    rows.append(losses[j] - losses[i])
    return LossDiffPanel(tuple(keys), np.ascontiguousarray(rows, dtype=float))


def _check_bandwidth(P, bandwidth):
    if not 2 * bandwidth < P:
        raise ValidationError(f"HAC bandwidth {bandwidth} too large for P={P} (need P > 2*bandwidth)")


def _degenerate(rows, sd):
    # rounding leaves tiny positive variances on constant or single-block rows
    rows = np.atleast_2d(rows)
    return (np.ptp(rows, axis=1) == 0.0) | (sd <= SCALE_TOL * rows.std(axis=1))


def _hac(series, bandwidth):
    if np.ptp(series) == 0.0:
        return 0.0, False
    value = float(kernels.hac_bartlett(np.ascontiguousarray(series, dtype=float), int(bandwidth)))
    if value < 0.0:
        return 0.0, True
    return value, False


def hac_variance(series, cfg=HacConfig(0)):
    """Bartlett long-run variance with weights ``1 - k/(s+1)``.

    The sum over periods is trimmed by the bandwidth at both ends and divided
    by ``P``. A negative estimate is clipped to 0 and logged.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim != 1 or not np.all(np.isfinite(series)):
        raise ValidationError("series must be a finite vector")
    bandwidth = cfg.resolve(0) if isinstance(cfg, HacConfig) else int(cfg)
    _check_bandwidth(series.size, bandwidth)
    value, clipped = _hac(series, bandwidth)
    if clipped:
        log.warning("negative HAC estimate clipped to zero")
    return value


def gms_threshold(P):
    """Moment-selection cutoff ``sqrt(2 ln ln P / P)``."""
    return math.sqrt(2.0 * math.log(math.log(P)) / P)


class MhEngine:
    """Full-sample statistic plus bootstrap draws for the monotonicity test."""

    def __init__(self, sample, block_length, hac=HacConfig()):
        if sample.P < MIN_P:
            raise ValidationError(f"evaluation sample too short for testing: P={sample.P} < {MIN_P}")
        self.panel = loss_differences(sample)
        self.P = P = self.panel.P
        self.block_length = int(block_length)
        bandwidth = hac.resolve(self.block_length)
        _check_bandwidth(P, bandwidth)
        self.diagnostics = []
        values = self.panel.values
        self.mean = values.mean(axis=1)
        var = np.empty(self.panel.kappa)
        for s in range(self.panel.kappa):
            var[s], clipped = _hac(values[s], bandwidth)
            if clipped:
                self.diagnostics.append(f"negative HAC variance clipped to 0 for {self.panel.keys[s]}")
        self.sigma = np.sqrt(var)
        self.active = ~_degenerate(values, self.sigma)
        for s in np.flatnonzero(~self.active):
            self.diagnostics.append(f"zero variance, moment excluded: {self.panel.keys[s]}")
        tstat = np.zeros_like(self.mean)
        tstat[self.active] = math.sqrt(P) * self.mean[self.active] / self.sigma[self.active]
        self.tstat = tstat
        self.contributions = {key: float(min(t, 0.0) ** 2) if a else 0.0
                              for key, t, a in zip(self.panel.keys, tstat, self.active)}
        self.statistic = math.fsum(self.contributions.values())
        ratio = np.full_like(self.mean, np.inf)
        ratio[self.active] = self.mean[self.active] / self.sigma[self.active]
        self.selected = self.active & (ratio <= gms_threshold(P))

    @property
    def kappa(self):
        return self.panel.kappa

    def draw(self, idx):
        if not self.selected.any():
            return 0.0
        sub = np.ascontiguousarray(self.panel.values[self.selected][:, idx])
        mean_b = sub.mean(axis=1)
        sd_b = np.sqrt(kernels.block_variance(sub, self.block_length))
        ok = ~_degenerate(sub, sd_b)
        z = math.sqrt(self.P) * (mean_b[ok] - self.mean[self.selected][ok]) / sd_b[ok]
        return math.fsum(np.minimum(z, 0.0) ** 2)


def mh_test(sample, cfg, hac=HacConfig(), *, workers=1):
    """Bootstrap test of weakly increasing expected loss across horizons.

    Parameters
    ----------
    sample : EvalSample or MultiSeriesSample
        Needs at least two horizons.
    cfg : MbbConfig
    hac : HacConfig, optional
        Bandwidth for the full-sample variance; defaults to the block length.

    Returns
    -------
    TestResult
        Contributions are keyed ``(tau, h_i, h_j)``.
    """
    engine = MhEngine(sample, cfg.block_length, hac)
    boot, failures = run_draws(engine.draw, engine.P, cfg, workers)
    return finish("mh", engine.statistic, engine.contributions, engine.kappa, engine.P, cfg,
                  boot, failures, diagnostics=engine.diagnostics)
