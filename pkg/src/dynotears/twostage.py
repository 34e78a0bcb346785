"""Two-stage estimator: reduced-form VAR by least squares, then a static fit on residuals.

The reduced form is X = Y B + e with B_l = A_l (I - W)^-1 and
e = Z (I - W)^-1, so e = e W + Z and the static solver applied to e
estimates W. The lag weights are then recovered as A_l = B_l (I - W).
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .solver import SolverConfig, _check_design, fit

logger = logging.getLogger(__name__)

UNDERDETERMINED = "underdetermined reduced-form VAR (n <= p*d): residuals are ~0 and W is unreliable"


@dataclass
class ReducedVarFit:
    B: np.ndarray
    residuals: np.ndarray
    rank: int
    warnings: list = field(default_factory=list)


def fit_reduced_var(X, Y):
    """Least-squares B = argmin ||X - Y B||_F (minimum-norm when rank deficient)."""
    X, Y = _check_design(X, Y)
    n, pd = Y.shape
    if pd == 0:
        return ReducedVarFit(B=np.zeros((0, X.shape[1])), residuals=X.copy(), rank=0)
    B, _, rank, _ = np.linalg.lstsq(Y, X, rcond=None)
    warnings = []
    if n <= pd:
        logger.warning(UNDERDETERMINED)
        warnings.append(UNDERDETERMINED)
    return ReducedVarFit(B=B, residuals=X - Y @ B, rank=int(rank), warnings=warnings)


def estimate_intra_from_residuals(e, lambda_w=None, config=None):
    """Static (p = 0) fit of the residual matrix; returns the full FitResult.

    ``lambda_w`` overrides the value in ``config`` when given.
    """
    config = config or SolverConfig()
    if lambda_w is not None:
        config = SolverConfig.from_dict({**config.to_dict(), "lambda_w": lambda_w})
    return fit(e, None, config)


def recover_inter(B, W):
    """A_l = B_l (I - W) for every lag block of the stacked (p*d, d) matrix B."""
    B = np.asarray(B, dtype=float)
    W = np.asarray(W, dtype=float)
    d = W.shape[0]
    if W.shape != (d, d) or (B.size and (B.ndim != 2 or B.shape[1] != d or B.shape[0] % d)):
        raise InvalidInputError(f"shape mismatch: B {B.shape}, W {W.shape}")
    if B.size == 0:
        return np.zeros((0, d))
    return B @ (np.eye(d) - W)


def fit_two_stage(X, Y, config=None):
    """Two-stage estimate of (W, A). ``lambda_a`` is unused; ``tau_a`` still applies.

    The recovered A uses W after thresholding; the static fit has already
    checked that W for cycles.
    """
    config = config or SolverConfig()
    X, Y = _check_design(X, Y)
    var = fit_reduced_var(X, Y)
    static = estimate_intra_from_residuals(var.residuals, config=config)
    A_raw = recover_inter(var.B, static.W)
    static.A = np.where(np.abs(A_raw) < config.tau_a, 0.0, A_raw)
    static.A_raw = A_raw
    static.method = "two_stage"
    static.warnings = list(var.warnings) + list(static.warnings)
    return static
