"""One-stage estimator: penalised least squares over (W, A) with h(W) = 0.

The equality constraint is handled by an augmented Lagrangian. Each
subproblem is smooth once W and A are split into non-negative parts
(W = W+ - W-, A = A+ - A-), which turns the l1 penalty into a linear term
and leaves simple bound constraints for L-BFGS-B.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import scipy.optimize as sopt

from .acyclicity import h_and_grad, is_acyclic_exact
from .exceptions import ConstraintViolationError, InvalidInputError, SolverFailureError

logger = logging.getLogger(__name__)

PRESETS = {
    # hyperparameters used for the n=500 and n=50 simulation regimes
    "n500": {"lambda_w": 0.05, "lambda_a": 0.05, "tau_w": 0.3, "tau_a": 0.1},
    "n50": {"lambda_w": 0.2, "lambda_a": 0.2, "tau_w": 0.3, "tau_a": 0.2},
}


@dataclass(frozen=True)
class SolverConfig:
    lambda_w: float = 0.05
    lambda_a: float = 0.05
    tau_w: float = 0.3
    tau_a: float = 0.1
    h_tol: float = 1e-8
    rho_init: float = 1.0
    rho_mult: float = 10.0
    rho_max: float = 1e16
    h_decrease_factor: float = 0.25
    max_outer_iters: int = 100
    max_inner_iters: int = 1000
    inner_grad_tol: float = 1e-6
    lbfgs_memory: int = 10
    free_diagonal: bool = True

    def __post_init__(self):
        for name in ("lambda_w", "lambda_a", "tau_w", "tau_a"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be non-negative")
        for name in ("h_tol", "rho_init", "rho_mult", "rho_max", "inner_grad_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")
        if not 0 < self.h_decrease_factor < 1:
            raise InvalidInputError("h_decrease_factor must lie in (0, 1)")
        for name in ("max_outer_iters", "max_inner_iters", "lbfgs_memory"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be a positive integer")

    @classmethod
    def from_preset(cls, name, **overrides):
        if name not in PRESETS:
            raise InvalidInputError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return cls(**{**PRESETS[name], **overrides})

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in doc.items() if k in names})


@dataclass
class FitResult:
    """Thresholded estimates plus the raw solver output.

    ``A`` and ``A_raw`` are stacked (p*d, d); use :meth:`lags` for a
    (p, d, d) view. ``objective_trace`` holds one (outer iteration, f, h)
    tuple per accepted augmented-Lagrangian step, where f is the penalised
    least-squares objective without the constraint terms.
    """

    W: np.ndarray
    A: np.ndarray
    W_raw: np.ndarray
    A_raw: np.ndarray
    h_final: float
    objective_trace: list
    converged: bool
    rho_final: float = 0.0
    alpha_final: float = 0.0
    objective_final: float = float("nan")
    method: str = "one_stage"
    warnings: list = field(default_factory=list)

    @property
    def d(self):
        return self.W.shape[0]

    @property
    def p(self):
        return self.A.shape[0] // self.d

    @property
    def outer_iters(self):
        return len(self.objective_trace)

    def lags(self, raw=False):
        A = self.A_raw if raw else self.A
        return A.reshape(self.p, self.d, self.d)

    def diagnostics(self):
        out = {
            "h_final": self.h_final,
            "converged": self.converged,
            "outer_iters": self.outer_iters,
            "objective": self.objective_final,
            "rho_final": self.rho_final,
            "method": self.method,
        }
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def _check_design(X, Y):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidInputError(f"X must be a non-empty (n, d) array, got shape {X.shape}")
    n, d = X.shape
    if Y is None:
        Y = np.zeros((n, 0))
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != n or Y.shape[1] % d:
        raise InvalidInputError(f"Y must have shape (n, p*d) with n={n}, d={d}; got {Y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise InvalidInputError("X and Y must be finite (NaN or inf found)")
    return X, Y


def loss_and_grads(W, A, X, Y):
    """Least-squares loss (1/2n)||X - XW - YA||_F^2 and its gradients.

    Returns:
        loss (float), gW (np.ndarray [d, d]), gA (np.ndarray [p*d, d])
    """
    X, Y = _check_design(X, Y)
    n, d = X.shape
    W = np.asarray(W, dtype=float)
    A = np.asarray(A, dtype=float).reshape(Y.shape[1], d)
    if W.shape != (d, d):
        raise InvalidInputError(f"W must have shape ({d}, {d}), got {W.shape}")
    return _loss(W, A, X, Y)


def _loss(W, A, X, Y):
    n = X.shape[0]
    R = X - X @ W - Y @ A
    loss = 0.5 / n * float(np.sum(R * R))
    return loss, -(X.T @ R) / n, -(Y.T @ R) / n


def augmented_objective_and_grads(W, A, X, Y, lambda_w, lambda_a, rho, alpha):
    """Augmented objective F = f + (rho/2) h^2 + alpha h.

    f is the least-squares loss plus ``lambda_w ||W||_1 + lambda_a ||A||_1``.
    The returned gradients are those of the smooth part (everything except
    the l1 terms); on the split variables the l1 terms add ``+lambda`` to
    every coordinate, see :class:`SplitObjective`.
    """
    if rho < 0:
        raise InvalidInputError("rho must be non-negative")
    X, Y = _check_design(X, Y)
    W = np.asarray(W, dtype=float)
    A = np.asarray(A, dtype=float).reshape(Y.shape[1], X.shape[1])
    loss, gW, gA = loss_and_grads(W, A, X, Y)
    h, gh = h_and_grad(W)
    F = loss + lambda_w * np.abs(W).sum() + lambda_a * np.abs(A).sum() + 0.5 * rho * h * h + alpha * h
    return F, gW + (rho * h + alpha) * gh, gA


class SplitObjective:
    """F as a function of the flat vector theta = [W+, W-, A+, A-] >= 0."""

    def __init__(self, X, Y, lambda_w, lambda_a, rho, alpha):
        self.X, self.Y = X, Y
        self.d = X.shape[1]
        self.pd = Y.shape[1]
        self.lambda_w, self.lambda_a = lambda_w, lambda_a
        self.rho, self.alpha = rho, alpha
        self.n_evals = 0

    @property
    def size(self):
        return 2 * self.d * (self.d + self.pd)

    def unpack(self, theta):
        d, pd = self.d, self.pd
        nw, na = d * d, pd * d
        Wp = theta[:nw].reshape(d, d)
        Wm = theta[nw:2 * nw].reshape(d, d)
        Ap = theta[2 * nw:2 * nw + na].reshape(pd, d)
        Am = theta[2 * nw + na:].reshape(pd, d)
        return Wp, Wm, Ap, Am

    def to_weights(self, theta):
        Wp, Wm, Ap, Am = self.unpack(theta)
        return Wp - Wm, Ap - Am

    def value(self, theta):
        return self(theta)[0]

    def __call__(self, theta):
        self.n_evals += 1
        W, A = self.to_weights(theta)
        loss, gW, gA = _loss(W, A, self.X, self.Y)
        h, gh = h_and_grad(W)
        nw = self.d * self.d
        F = (loss + 0.5 * self.rho * h * h + self.alpha * h
             + self.lambda_w * theta[:2 * nw].sum() + self.lambda_a * theta[2 * nw:].sum())
        gW = gW + (self.rho * h + self.alpha) * gh
        grad = np.concatenate([
            (gW + self.lambda_w).ravel(), (self.lambda_w - gW).ravel(),
            (gA + self.lambda_a).ravel(), (self.lambda_a - gA).ravel(),
        ])
        return F, grad


def projected_grad_norm(grad, theta):
    """Infinity norm of the gradient projected onto the feasible set theta >= 0."""
    pg = np.where(theta > 0, grad, np.minimum(grad, 0.0))
    return float(np.max(np.abs(pg), initial=0.0))


def inner_solve(objective, theta0, config, bounds_upper=None):
    """Minimise ``objective`` over theta >= 0 with L-BFGS-B.

    Args:
        objective: callable theta -> (value, gradient).
        theta0 (np.ndarray): non-negative starting point.
        config (SolverConfig): supplies iteration cap, gradient tolerance
            and L-BFGS memory.
        bounds_upper (np.ndarray): optional per-coordinate upper bounds; a
            zero bound pins that coordinate at 0.

    Returns:
        np.ndarray: theta with objective(theta) <= objective(theta0).
    """
    theta0 = np.asarray(theta0, dtype=float)
    if np.any(theta0 < 0):
        raise InvalidInputError("split variables must be non-negative")

    def fun(theta):
        val, grad = objective(theta)
        if not np.isfinite(val) or not np.all(np.isfinite(grad)):
            raise SolverFailureError("objective returned a non-finite value",
                                     {"value": val, "theta_norm": float(np.linalg.norm(theta))})
        return val, grad

    f0, _ = fun(theta0)
    upper = np.inf if bounds_upper is None else bounds_upper
    sol = sopt.minimize(
        fun, theta0, jac=True, method="L-BFGS-B",
        bounds=sopt.Bounds(0.0, upper),
        options={"maxiter": config.max_inner_iters, "gtol": config.inner_grad_tol,
                 "maxcor": config.lbfgs_memory},
    )
    theta = np.maximum(sol.x, 0.0)
    if fun(theta)[0] > f0:
        return theta0
    return theta


def _collapse_splits(theta, objective):
    # subtracting min(x+, x-) from both parts keeps W, A and cannot raise the l1 term
    Wp, Wm, Ap, Am = objective.unpack(theta.copy())
    m = np.minimum(Wp, Wm)
    Wp -= m
    Wm -= m
    m = np.minimum(Ap, Am)
    Ap -= m
    Am -= m
    return np.concatenate([Wp.ravel(), Wm.ravel(), Ap.ravel(), Am.ravel()])


def threshold(W_raw, A_raw, tau_w, tau_a):
    """Zero entries with |w| < tau (entries equal to tau are kept).

    Raises:
        ConstraintViolationError: if the thresholded W still has a cycle.
    """
    if tau_w < 0 or tau_a < 0:
        raise InvalidInputError("thresholds must be non-negative")
    W = np.where(np.abs(W_raw) < tau_w, 0.0, W_raw)
    A = np.where(np.abs(A_raw) < tau_a, 0.0, A_raw)
    if not is_acyclic_exact(W):
        raise ConstraintViolationError(
            f"thresholded W (tau_w={tau_w}) contains a directed cycle; tighten h_tol or raise tau_w")
    return W, A


def fit(X, Y=None, config=None):
    """Estimate intra-slice W and inter-slice A from the lagged design.

    Args:
        X (np.ndarray): [n, d] current slices.
        Y (np.ndarray): [n, p*d] lagged slices; None or zero columns for the
            static (p = 0) problem.
        config (SolverConfig): penalties, thresholds and schedule constants.

    Returns:
        FitResult
    """
    config = config or SolverConfig()
    X, Y = _check_design(X, Y)
    d = X.shape[1]
    objective = SplitObjective(X, Y, config.lambda_w, config.lambda_a, config.rho_init, 0.0)
    theta = np.zeros(objective.size)
    upper = None
    if not config.free_diagonal:
        upper = np.full(objective.size, np.inf)
        diag = np.arange(d) * (d + 1)
        upper[diag] = upper[d * d + diag] = 0.0
    rho, alpha, h = config.rho_init, 0.0, np.inf
    trace = []

    for it in range(config.max_outer_iters):
        start = theta
        while True:
            objective = SplitObjective(X, Y, config.lambda_w, config.lambda_a, rho, alpha)
            theta_new = _collapse_splits(inner_solve(objective, start, config, upper), objective)
            # a retry with larger rho continues from the latest iterate
            start = theta_new
            h_new = h_and_grad(objective.to_weights(theta_new)[0])[0]
            if h_new > config.h_decrease_factor * h and rho < config.rho_max:
                rho *= config.rho_mult
            else:
                break
        theta, h = theta_new, h_new
        W, A = objective.to_weights(theta)
        f_val = _penalised(W, A, X, Y, config)
        trace.append((it, f_val, h))
        logger.debug("outer %d: f=%.6g h=%.3g rho=%.1e", it, f_val, h, rho)
        alpha += rho * h
        if h <= config.h_tol or rho >= config.rho_max:
            break

    W_raw, A_raw = objective.to_weights(theta)
    converged = bool(h <= config.h_tol)
    notes = []
    if not converged:
        logger.warning("augmented Lagrangian stopped with h=%.3g > h_tol=%.1g", h, config.h_tol)
        notes.append(f"not converged: h={h:.3g} > h_tol={config.h_tol:g}")
    try:
        W, A = threshold(W_raw, A_raw, config.tau_w, config.tau_a)
    except ConstraintViolationError:
        # a cyclic W is expected when the schedule stopped early; only a
        # converged fit treats it as an error
        if converged:
            raise
        W = np.where(np.abs(W_raw) < config.tau_w, 0.0, W_raw)
        A = np.where(np.abs(A_raw) < config.tau_a, 0.0, A_raw)
        notes.append("thresholded W contains a directed cycle")
    return FitResult(
        W=W, A=A, W_raw=W_raw.copy(), A_raw=A_raw.copy(), h_final=float(h),
        objective_trace=trace, converged=converged, rho_final=float(rho), alpha_final=float(alpha),
        objective_final=float(trace[-1][1]) if trace else float("nan"), warnings=notes,
    )


def _penalised(W, A, X, Y, config):
    loss = _loss(W, A, X, Y)[0]
    return float(loss + config.lambda_w * np.abs(W).sum() + config.lambda_a * np.abs(A).sum())


def fit_dataset(data, p, config=None):
    """Build the lagged design of order p from a dataset and run :func:`fit`."""
    from .sem import build_lagged_design

    design = build_lagged_design(data, p)
    return fit(design.X, design.Y, config)


def result_to_dict(result, variable_names=None, config=None):
    """Model JSON document for a fit result."""
    return model_to_dict(result.W, result.A, variable_names, config, result.diagnostics())


def model_to_dict(W, A, variable_names=None, config=None, diagnostics=None):
    W = np.asarray(W, dtype=float)
    d = W.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, d, d)
    return {
        "d": d,
        "p": A.shape[0],
        "W": W.tolist(),
        "A": A.tolist(),
        "variable_names": list(variable_names) if variable_names is not None else [f"x{i}" for i in range(d)],
        "config": config.to_dict() if config is not None else {},
        "diagnostics": diagnostics or {},
    }


def model_from_dict(doc):
    """Parse a model JSON document into (W, A stacked (p*d, d), variable_names)."""
    try:
        d, p = int(doc["d"]), int(doc["p"])
        W = np.asarray(doc["W"], dtype=float).reshape(d, d)
        A = np.asarray(doc["A"], dtype=float).reshape(p * d, d) if p else np.zeros((0, d))
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidInputError(f"malformed model JSON: {exc}") from exc
    return W, A, doc.get("variable_names") or [f"x{i}" for i in range(d)]


def dumps_model(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
