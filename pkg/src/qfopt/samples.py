"""Containers for evaluation samples.

All containers are immutable; ``take(indices)`` returns a copy whose row ``t``
is row ``indices[t]`` of the original, across every array it holds.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .qr import check_levels

MIN_P = 20


def _finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")


@dataclass(frozen=True, eq=False)
class EvalSample:
    """Realisations and the (level x horizon x time) forecast array of one series.

    ``forecasts[k, j, t]`` is the forecast for ``y[t]`` at level ``levels[k]``
    made ``horizons[j]`` periods earlier.
    """

    y: np.ndarray
    forecasts: np.ndarray
    levels: np.ndarray
    horizons: np.ndarray = None
    name: str = "0"

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        fc = np.asarray(self.forecasts, dtype=float)
        levels = check_levels(self.levels)
        if y.ndim != 1:
            raise ValidationError("y must be one-dimensional")
        if fc.ndim != 3 or fc.shape[0] != levels.size or fc.shape[2] != y.size:
            raise ValidationError(
                f"forecasts must have shape (K={levels.size}, H, P={y.size}), got {fc.shape}"
            )
        if self.horizons is None:
            horizons = np.arange(1, fc.shape[1] + 1)
        else:
            horizons = np.asarray(self.horizons, dtype=int).ravel()
        if horizons.size != fc.shape[1] or np.any(horizons < 1) or np.any(np.diff(horizons) <= 0):
            raise ValidationError(f"horizons must be {fc.shape[1]} increasing positive integers")
        _finite("y", y)
        _finite("forecasts", fc)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "forecasts", fc)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "horizons", horizons)

    @property
    def P(self):
        return self.y.size

    @property
    def K(self):
        return self.levels.size

    @property
    def H(self):
        return self.horizons.size

    def take(self, indices):
        return EvalSample(self.y[indices], self.forecasts[:, :, indices], self.levels,
                          self.horizons, self.name)

    def rows(self):
        """Row tuples ``(y_t, forecasts[..., t])`` flattened, shape (P, 1 + K*H)."""
        flat = self.forecasts.reshape(-1, self.P).T
        return np.column_stack([self.y, flat])


@dataclass(frozen=True, eq=False)
class AugmentedSample:
    """An :class:`EvalSample` plus augmenting regressors ``z[t, j, :]``.

    ``z[t, j]`` must hold information available at ``t - horizons[j]``; only the
    shape is checked here.
    """

    base: EvalSample
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim == 2:
            z = z[:, :, None]
        if z.ndim != 3 or z.shape[:2] != (self.base.P, self.base.H):
            raise ValidationError(
                f"z must have shape (P={self.base.P}, H={self.base.H}, q), got {z.shape}"
            )
        _finite("z", z)
        object.__setattr__(self, "z", z)

    @property
    def q(self):
        return self.z.shape[2]

    def __getattr__(self, item):
        # y, forecasts, levels, horizons, P, K, H, name come from the base sample
        if item in ("base", "z"):
            raise AttributeError(item)
        return getattr(self.base, item)

    def take(self, indices):
        return AugmentedSample(self.base.take(indices), self.z[indices])

    def rows(self):
        return np.column_stack([self.base.rows(), self.z.reshape(self.P, -1)])


@dataclass(frozen=True, eq=False)
class MultiSeriesSample:
    """G series observed over a shared time index with a common level/horizon grid."""

    series: tuple = field(default_factory=tuple)

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise ValidationError("a multi-series sample needs at least one series")
        first = series[0]
        for s in series[1:]:
            if s.P != first.P:
                raise ValidationError("all series must share the evaluation length P")
            if not (np.array_equal(s.levels, first.levels)
                    and np.array_equal(s.horizons, first.horizons)):
                raise ValidationError("all series must share quantile levels and horizons")
        names = [s.name for s in series]
        if len(set(names)) != len(names):
            raise ValidationError(f"series names must be unique: {names}")
        object.__setattr__(self, "series", series)

    @property
    def G(self):
        return len(self.series)

    @property
    def P(self):
        return self.series[0].P

    @property
    def levels(self):
        return self.series[0].levels

    @property
    def horizons(self):
        return self.series[0].horizons

    def take(self, indices):
        return MultiSeriesSample(tuple(s.take(indices) for s in self.series))

    def rows(self):
        return np.column_stack([s.rows() for s in self.series])


def as_series_list(sample):
    if isinstance(sample, MultiSeriesSample):
        return list(sample.series)
    return [sample]


def require_length(sample, minimum=MIN_P):
    if sample.P < minimum:
        raise ValidationError(f"evaluation sample too short for testing: P={sample.P} < {minimum}")
