"""Test result container and the shared bootstrap driver."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BootstrapFailure, ConvergenceError, SingularDesignError
from .mbb import draw_block_indices

log = logging.getLogger(__name__)

LEVELS = (0.90, 0.95, 0.99)
MAX_FAILURE_SHARE = 0.01
MAX_ATTEMPTS = 20

# refit problems that justify replacing a draw
REFIT_ERRORS = (ConvergenceError, SingularDesignError)


@dataclass(frozen=True, eq=False)
class TestResult:
    """Outcome of one bootstrap test.

    ``contributions`` maps a cell key (for example ``(tau, h)`` or
    ``(series, tau, h)``) to its share of ``statistic``; the shares add up to
    the statistic.
    """

    __test__ = False  # keep pytest from collecting this class

    test: str
    statistic: float
    critical_values: dict
    p_value: float
    contributions: dict
    kappa: int
    P: int
    block_length: int
    draws: int
    seed: int
    coefficients: dict = field(default_factory=dict)
    bootstrap_statistics: np.ndarray = None
    failed_draws: int = 0
    diagnostics: tuple = ()

    def rejects(self, level=0.95):
        return self.statistic > self.critical_values[level]


def order_statistic_level(level, n):
    """1-based rank ``ceil(level * n)``, guarded against float noise."""
    return max(1, min(n, math.ceil(round(level * n, 9))))


def critical_values(boot, levels=LEVELS):
    ordered = np.sort(np.asarray(boot, dtype=float))
    n = ordered.size
    return {lev: float(ordered[order_statistic_level(lev, n) - 1]) for lev in levels}


def p_value(statistic, boot):
    boot = np.asarray(boot, dtype=float)
    return float(np.count_nonzero(boot >= statistic)) / boot.size


def run_draws(draw_stat, P, cfg, workers=1):
    """Evaluate ``draw_stat(indices)`` for draws ``0..B-1``.

    A draw whose refit raises is replaced by the next attempt for the same
    draw id. Results are stored by draw id, so the output does not depend on
    ``workers``.

    Returns
    -------
    stats : ndarray, shape (B,)
    failures : int
        Number of replaced attempts.
    """
    cfg.check_length(P)

    def one(b):
        for attempt in range(MAX_ATTEMPTS):
            idx = draw_block_indices(P, cfg, b, attempt)
            try:
                return draw_stat(idx), attempt
            except REFIT_ERRORS as err:
                log.debug("draw %d attempt %d failed: %s", b, attempt, err)
        raise BootstrapFailure(f"draw {b} failed {MAX_ATTEMPTS} times in a row")

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(one, range(cfg.draws)))
    else:
        out = [one(b) for b in range(cfg.draws)]
    stats = np.array([s for s, _ in out], dtype=float)
    failures = sum(a for _, a in out)
    if failures > MAX_FAILURE_SHARE * cfg.draws:
        raise BootstrapFailure(
            f"{failures} of {cfg.draws} bootstrap draws had to be replaced "
            f"(limit {MAX_FAILURE_SHARE:.0%})"
        )
    if failures:
        log.info("%d bootstrap draws replaced after refit failures", failures)
    return stats, failures


def finish(name, statistic, contributions, kappa, P, cfg, boot, failures,
           coefficients=None, diagnostics=()):
    return TestResult(
        test=name,
        statistic=float(statistic),
        critical_values=critical_values(boot),
        p_value=p_value(statistic, boot),
        contributions=dict(contributions),
        kappa=int(kappa),
        P=int(P),
        block_length=cfg.block_length,
        draws=cfg.draws,
        seed=cfg.seed,
        coefficients=dict(coefficients or {}),
        bootstrap_statistics=np.asarray(boot, dtype=float),
        failed_draws=int(failures),
        diagnostics=tuple(diagnostics),
    )
