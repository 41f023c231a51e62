"""Monte Carlo size and power studies with one bootstrap draw per replication.

Each replication simulates a fresh sample, computes the test statistic and a
single bootstrap statistic. The critical value is the empirical quantile of
the bootstrap statistics across replications.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_discrete_lyapunov
from scipy.special import ndtri, stdtrit

from ._backend import kernels
from .errors import BootstrapFailure, ValidationError
from .mbb import STREAM_SIMULATION, MbbConfig, draw_block_indices, keyed_rng
from .mono import HacConfig, MhEngine
from .mz import MzEngine
from .qr import check_levels, check_tau
from .results import REFIT_ERRORS, MAX_ATTEMPTS, MAX_FAILURE_SHARE, order_statistic_level

log = logging.getLogger(__name__)

GARCH_BURN_IN = 500
TESTS = ("mz", "amz", "mh")


def normal_ppf(tau):
    """Standard normal quantile function."""
    return ndtri(tau)


def t_ppf(tau, dof):
    """Quantile function of Student's t with ``dof`` degrees of freedom."""
    tau = np.asarray(tau, dtype=float)
    out = np.where(tau == 0.5, 0.0, stdtrit(dof, tau))
    return float(out) if out.ndim == 0 else out


def t_scale(dof, standardized):
    """Factor mapping a raw t draw to unit variance (1 when not standardising)."""
    return math.sqrt((dof - 2.0) / dof) if standardized else 1.0


def _check_ar(b, name="b"):
    if not abs(b) < 1.0:
        raise ValidationError(f"|{name}| must be < 1 for a stationary AR(1), got {b}")


# --- data generating processes -------------------------------------------------


@dataclass(frozen=True)
class AR1:
    """Unit-variance AR(1) truth with forecasts built from ``b_tilde``."""

    b: float = 0.6
    b_tilde: float = 0.6

    def __post_init__(self):
        _check_ar(self.b)
        _check_ar(self.b_tilde, "b_tilde")


@dataclass(frozen=True)
class ADL11:
    """y driven by its own lag and the lag of an AR(1) ``z``.

    ``d=None`` sets the ``z`` persistence equal to ``b``; ``b_tilde=None`` uses
    the population projection slope of ``y_t`` on ``y_{t-1}``.
    """

    b: float = 0.6
    c: float = 0.5
    b_tilde: float = None
    d: float = None

    def __post_init__(self):
        _check_ar(self.b)
        _check_ar(self.z_persistence, "d")
        if self.b_tilde is not None:
            _check_ar(self.b_tilde, "b_tilde")

    @property
    def z_persistence(self):
        return self.b if self.d is None else self.d

    @property
    def forecast_slope(self):
        return adl_projection(self.b, self.c, self.z_persistence) if self.b_tilde is None else self.b_tilde


@dataclass(frozen=True)
class GARCH11:
    """GARCH(1,1) with Student-t innovations; parameters are (mean, const, arch, garch).

    With ``standardized`` the t draws are rescaled to unit variance, so the
    recursion value is the conditional variance of ``y``.
    """

    b: tuple = (0.0, 0.05, 0.1, 0.85)
    b_tilde: tuple = (0.0, 0.05, 0.1, 0.85)
    dof: float = 30.0
    standardized: bool = True

    def __post_init__(self):
        for name in ("b", "b_tilde"):
            p = tuple(float(v) for v in getattr(self, name))
            if len(p) != 4:
                raise ValidationError(f"{name} needs four GARCH parameters")
            if p[1] <= 0 or p[2] < 0 or p[3] < 0:
                raise ValidationError(f"{name}: variance parameters must be nonnegative, constant > 0")
            object.__setattr__(self, name, p)
        if not self.b[2] + self.b[3] < 1.0:
            raise ValidationError("GARCH requires arch + garch < 1 for stationarity")
        if not self.dof > 2:
            raise ValidationError("Student-t degrees of freedom must exceed 2")


def adl_stationary_cov(b, c, d):
    """Stationary covariance of ``(y_t, z_t)`` with unit-variance-scaled shocks."""
    F = np.array([[b, c], [0.0, d]])
    Q = np.diag([1.0 - b * b, 1.0 - d * d])
    return F, solve_discrete_lyapunov(F, Q)


def adl_projection(b, c, d):
    """Population slope of ``y_t`` on ``y_{t-1}`` alone."""
    F, S = adl_stationary_cov(b, c, d)
    return float((F @ S)[0, 0] / S[0, 0])


def simulate_ar1(b, n, rng):
    """AR(1) path of length ``n`` with unit stationary variance.

    Shocks have variance ``1 - b**2``; the first value is drawn from the
    stationary N(0, 1).
    """
    _check_ar(b)
    y0 = rng.standard_normal()
    eps = rng.standard_normal(n) * math.sqrt(1.0 - b * b)
    return kernels.ar_filter(eps, float(b), float(y0))


def simulate_adl(b, c, d, n, rng):
    """Paths ``(y, z)`` of length ``n``: ``y_t = b y_{t-1} + c z_{t-1} + e_t``.

    ``z`` is an AR(1) with persistence ``d`` and unit variance. Draws for
    ``y`` come first so ``c = 0`` reproduces :func:`simulate_ar1` exactly.
    """
    _check_ar(b)
    _check_ar(d, "d")
    _, S = adl_stationary_cov(b, c, d)
    L = np.linalg.cholesky(S)
    u_y = rng.standard_normal()
    eps = rng.standard_normal(n) * math.sqrt(1.0 - b * b)
    u_z = rng.standard_normal()
    nu = rng.standard_normal(n) * math.sqrt(1.0 - d * d)
    y0 = L[0, 0] * u_y
    z0 = L[1, 0] * u_y + L[1, 1] * u_z
    z = kernels.ar_filter(nu, float(d), float(z0))
    innov = eps.copy()
    innov[1:] += c * z[:-1]
    y = kernels.ar_filter(innov, float(b), float(y0))
    return y, z


def simulate_garch(params, n, rng, dof=30.0, burn_in=GARCH_BURN_IN, standardized=True):
    """GARCH(1,1) returns and variance recursion, burn-in discarded.

    The recursion starts at ``b1 / (1 - b2 - b3)``. Innovations are Student-t
    draws, rescaled to unit variance when ``standardized``.
    """
    b0, b1, b2, b3 = (float(v) for v in params)
    if not b2 + b3 < 1.0:
        raise ValidationError("GARCH requires arch + garch < 1 for stationarity")
    eps = rng.standard_t(dof, n + burn_in) * t_scale(dof, standardized)
    y, sig2 = kernels.garch_path(eps, b0, b1, b2, b3, b1 / (1.0 - b2 - b3))
    return y[burn_in:], sig2[burn_in:]


def ar1_quantile_forecasts(series, b_tilde, h, tau):
    """``b_tilde**h * y + sqrt(1 - b_tilde**(2h)) * z_tau`` elementwise.

    ``series`` holds the values the forecast is conditioned on.
    """
    _check_ar(b_tilde, "b_tilde")
    tau = check_tau(tau)
    scale = math.sqrt(1.0 - b_tilde ** (2 * h))
    return b_tilde ** h * np.asarray(series, dtype=float) + scale * normal_ppf(tau)


def garch_quantile_forecasts(y_lag, sigma2_lag, params, tau, dof=30.0, standardized=True):
    """One-step quantile ``b0 + sqrt(b1 + b2 y_lag**2 + b3 sigma2_lag) * q(tau)``.

    ``q`` is the innovation quantile (raw or unit-variance t).
    """
    b0, b1, b2, b3 = (float(v) for v in params)
    tau = check_tau(tau)
    q = t_ppf(tau, dof) * t_scale(dof, standardized)
    return b0 + np.sqrt(b1 + b2 * np.square(y_lag) + b3 * np.asarray(sigma2_lag)) * q


# --- sample construction -------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """One cell of a size/power study.

    ``swap_horizons`` exchanges the shortest- and longest-horizon forecasts,
    which produces a loss profile that falls with the horizon.
    """

    dgp: object
    P: int
    H: int = 4
    levels: tuple = (0.25, 0.5, 0.75)
    mbb: MbbConfig = field(default_factory=lambda: MbbConfig(4, 1, 0))
    replications: int = 1999
    nominal_size: float = 0.05
    swap_horizons: bool = False
    hac: HacConfig = field(default_factory=HacConfig)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(v) for v in check_levels(self.levels)))
        if not isinstance(self.dgp, (AR1, ADL11, GARCH11)):
            raise ValidationError(f"unknown DGP {self.dgp!r}")
        if self.replications < 100:
            raise ValidationError(f"need at least 100 replications, got {self.replications}")
        if not 0.0 < self.nominal_size < 1.0:
            raise ValidationError("nominal size must lie in (0, 1)")
        if self.H < 1 or self.P < 1:
            raise ValidationError("P and H must be positive")
        if isinstance(self.dgp, GARCH11) and self.H != 1:
            raise ValidationError("GARCH forecasts are one-step only (H = 1)")
        self.mbb.check_length(self.P)


def _ar_forecasts(path, P, H, levels, b_tilde):
    # targets are the last P values; the h-step forecast uses the value h periods back
    n = path.size
    fc = np.empty((len(levels), H, P))
    for j, h in enumerate(range(1, H + 1)):
        lagged = path[n - P - h:n - h]
        for k, tau in enumerate(levels):
            fc[k, j] = ar1_quantile_forecasts(lagged, b_tilde, h, tau)
    return fc


def simulate_sample(cfg, rng, with_z=False):
    """Draw one evaluation sample for ``cfg``.

    Returns an :class:`EvalSample`, or an :class:`AugmentedSample` carrying
    ``z_{t-h}`` when ``with_z`` is set (AR1 and ADL11 only).
    """
    from .samples import AugmentedSample, EvalSample

    dgp, P, H, levels = cfg.dgp, cfg.P, cfg.H, cfg.levels
    if isinstance(dgp, GARCH11):
        if with_z:
            raise ValidationError("the GARCH design has no augmenting regressor")
        y, sig2 = simulate_garch(dgp.b, P + 1, rng, dgp.dof, standardized=dgp.standardized)
        fc = np.stack([garch_quantile_forecasts(y[:-1], sig2[:-1], dgp.b_tilde, tau, dgp.dof,
                                                dgp.standardized)
                       for tau in levels])[:, None, :]
        return EvalSample(y[1:], fc, levels)
    n = P + H + 1
    if isinstance(dgp, AR1):
        y, z = simulate_adl(dgp.b, 0.0, dgp.b, n, rng)
        slope = dgp.b_tilde
    else:
        y, z = simulate_adl(dgp.b, dgp.c, dgp.z_persistence, n, rng)
        slope = dgp.forecast_slope
    fc = _ar_forecasts(y, P, H, levels, slope)
    if cfg.swap_horizons and H >= 2:
        fc[:, [0, H - 1]] = fc[:, [H - 1, 0]]
    sample = EvalSample(y[n - P:], fc, levels)
    if not with_z:
        return sample
    zl = np.stack([z[n - P - h:n - h] for h in range(1, H + 1)], axis=1)
    return AugmentedSample(sample, zl[:, :, None])


# --- warp-speed harness --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SizePowerReport:
    """Rejection frequency of one warp-speed study."""

    test: str
    rejection_rate: float
    rejections: int
    replications: int
    critical_value: float
    statistics: np.ndarray
    bootstrap_statistics: np.ndarray
    failed_replications: int
    config: SimConfig

    def p_values(self):
        """Per-replication p-values against the pooled bootstrap distribution."""
        boot = np.sort(self.bootstrap_statistics)
        below = np.searchsorted(boot, self.statistics, side="left")
        return (boot.size - below) / boot.size


def _engine(test, sample, cfg):
    if test in ("mz", "amz"):
        return MzEngine(sample)
    return MhEngine(sample, cfg.mbb.block_length, cfg.hac)


def replicate(cfg, test, m):
    """Statistic and one bootstrap statistic for replication ``m``.

    Returns ``(stat, boot_stat, failed_attempts)``.
    """
    for attempt in range(MAX_ATTEMPTS):
        rng = keyed_rng(cfg.mbb.seed, STREAM_SIMULATION, m, attempt)
        sample = simulate_sample(cfg, rng, with_z=(test == "amz"))
        try:
            engine = _engine(test, sample, cfg)
            idx = draw_block_indices(cfg.P, cfg.mbb, m, attempt)
            return engine.statistic, engine.draw(idx), attempt
        except REFIT_ERRORS as err:
            log.debug("replication %d attempt %d failed: %s", m, attempt, err)
    raise BootstrapFailure(f"replication {m} failed {MAX_ATTEMPTS} times in a row")


def run_size_power(cfg, test="mz", *, workers=1):
    """Warp-speed rejection frequency of ``test`` in ``{"mz", "amz", "mh"}``.

    The rejection rule is ``statistic > critical value``, where the critical
    value is the ``ceil((1 - a) M)``-th smallest bootstrap statistic.
    """
    if test not in TESTS:
        raise ValidationError(f"test must be one of {TESTS}, got {test!r}")
    if test == "mh" and cfg.H < 2:
        raise ValidationError("the monotonicity test needs H >= 2")
    M = cfg.replications
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(lambda m: replicate(cfg, test, m), range(M)))
    else:
        out = [replicate(cfg, test, m) for m in range(M)]
    stats = np.array([o[0] for o in out])
    boot = np.array([o[1] for o in out])
    failures = sum(o[2] for o in out)
    if failures > MAX_FAILURE_SHARE * M:
        raise BootstrapFailure(f"{failures} of {M} replications had to be redrawn")
    cv = float(np.sort(boot)[order_statistic_level(1.0 - cfg.nominal_size, M) - 1])
    rejections = int(np.count_nonzero(stats > cv))
    return SizePowerReport(test, rejections / M, rejections, M, cv, stats, boot, failures, cfg)


def size_power_table(reports):
    """CSV text with block lengths as rows and sample sizes as columns.

    Parameters
    ----------
    reports : dict
        ``(block_length, P) -> SizePowerReport``.
    """
    lengths = sorted({l for l, _ in reports})
    sizes = sorted({p for _, p in reports})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + [f"P={p}" for p in sizes])
    for l in lengths:
        row = [f"l={l}"]
        for p in sizes:
            rep = reports.get((l, p))
            row.append("" if rep is None else f"{rep.rejection_rate:.3f}")
        writer.writerow(row)
    return buf.getvalue()
