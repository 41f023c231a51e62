"""Pinball loss and exact linear quantile regression."""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ConvergenceError, SingularDesignError, ValidationError

GAP_TOL = 1e-8
MAX_ITER = 200
STEP = 0.99995


def check_tau(tau):
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise ValidationError(f"quantile level must lie in (0, 1), got {tau}")
    return tau


def check_levels(levels):
    """Validate a collection of quantile levels and return it as an array."""
    arr = np.asarray(levels, dtype=float).ravel()
    if arr.size == 0:
        raise ValidationError("at least one quantile level is required")
    for tau in arr:
        check_tau(tau)
    if np.any(np.diff(arr) <= 0):
        raise ValidationError(f"quantile levels must be strictly increasing: {arr.tolist()}")
    return arr


def pinball_loss(u, tau):
    """Tick loss ``u * (tau - 1{u < 0})``, elementwise for arrays."""
    tau = check_tau(tau)
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("pinball loss is undefined for non-finite residuals")
    out = arr * (tau - (arr < 0.0))
    return float(out) if out.ndim == 0 else out


def mean_pinball(X, y, coef, tau):
    u = y - X @ coef
    return float(np.mean(u * (tau - (u < 0.0))))


@dataclass(frozen=True)
class QrFit:
    """One fitted quantile regression.

    ``coefficients`` is ordered (intercept, forecast slope, augmenting
    coefficients...). ``objective`` is the mean pinball loss at the returned
    coefficients.
    """

    coefficients: np.ndarray
    tau: float
    horizon: int
    objective: float
    converged: bool
    iterations: int
    gap: float

    @property
    def alpha(self):
        return float(self.coefficients[0])

    @property
    def beta(self):
        return float(self.coefficients[1])

    @property
    def gamma(self):
        return self.coefficients[2:]


def _polish(X, y, coef, tau, objective):
    # Snap the interior-point limit onto the basic solution through the d
    # best-fitting points when that is at least as good.
    d = X.shape[1]
    resid = np.abs(y - X @ coef)
    idx = np.argpartition(resid, d - 1)[:d] if d < y.shape[0] else np.arange(d)
    xb = X[idx]
    if np.linalg.cond(xb) > 1e12:
        return coef, objective
    cand = np.linalg.solve(xb, y[idx])
    cand_obj = mean_pinball(X, y, cand, tau)
    if cand_obj <= objective + 1e-13 * (1.0 + abs(objective)):
        return cand, cand_obj
    return coef, objective


def qr_fit(X, y, tau, horizon=1, *, gap_tol=GAP_TOL, max_iter=MAX_ITER, check_rank=True):
    """Minimise mean pinball loss of ``y - X b`` over ``b``.

    Solved with a Frisch-Newton primal-dual interior point method; the loop
    stops once the duality gap, on the mean-loss scale, is below ``gap_tol``.
    The limit is then snapped to the adjacent basic solution if that does not
    increase the objective.

    Raises
    ------
    SingularDesignError
        ``X`` is not of full column rank (e.g. a constant forecast column).
    ConvergenceError
        The iteration cap was reached; ``err.best`` holds the last iterate.
    """
    tau = check_tau(tau)
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValidationError(f"shape mismatch: X {X.shape}, y {y.shape}")
    n, d = X.shape
    if n <= d:
        raise ValidationError(f"need more observations than regressors (P={n}, d={d})")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValidationError("design and response must be finite")
    if check_rank and np.linalg.matrix_rank(X) < d:
        raise SingularDesignError(f"design matrix of shape {X.shape} is rank deficient")

    coef, iters, gap, status = kernels.fn_solve(X, y, tau, gap_tol * n, max_iter, STEP)
    if status == 2:
        if iters == 0:
            raise SingularDesignError("normal equations are not positive definite")
        raise ConvergenceError(f"lost positive definiteness after {iters} iterations")
    objective = mean_pinball(X, y, coef, tau)
    if status == 1:
        best = QrFit(coef, tau, horizon, objective, False, int(iters), float(gap) / n)
        raise ConvergenceError(
            f"no convergence in {max_iter} iterations (gap {gap / n:.3g})", best=best
        )
    coef, objective = _polish(X, y, coef, tau, objective)
    return QrFit(coef, tau, int(horizon), objective, True, int(iters), float(gap) / n)
