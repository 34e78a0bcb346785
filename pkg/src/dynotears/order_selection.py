"""Autoregressive order selection by sweeping p.

Two diagnostics are computed for each candidate order: the fitted
objective, which stops improving once p exceeds the true order, and the
largest raw weight in the last lag block A_p, which becomes negligible at
the same point.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .sem import build_lagged_design
from .solver import SolverConfig, fit


@dataclass
class OrderCandidate:
    p: int
    objective: float
    max_abs_Ap: float
    converged: bool
    result: object = field(repr=False, default=None)


@dataclass
class OrderSweepResult:
    candidates: list
    recommended: int = None
    plateau_p: int = None
    magnitude_p: int = None
    note: str = ""

    def table(self):
        return [(c.p, c.objective, c.max_abs_Ap, c.p == self.recommended) for c in self.candidates]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "objective", "max_abs_Ap", "recommended"])
        for p, obj, amax, rec in self.table():
            writer.writerow([p, repr(float(obj)), repr(float(amax)), int(rec)])
        return buf.getvalue()


def sweep_order(data, p_max, config=None, plateau_tol=0.01, include_zero=True):
    """Fit orders 0..p_max (or 1..p_max) and recommend one.

    Every candidate is fitted on the same rows (t >= p_max) so that
    objectives are comparable across orders. The plateau order is the
    smallest p whose objective improves by less than ``plateau_tol``
    (relative) when moving to p+1; the magnitude order is the smallest p
    for which max|A_{p+1}| < tau_a, with A_{p+1} taken before thresholding.
    When the two disagree the plateau order is recommended and the
    disagreement is described in ``note``.

    Args:
        data (TimeSeriesDataset): observed series.
        p_max (int): largest order tried; needs p_max < T+1.
        config (SolverConfig): shared by all candidates.
        plateau_tol (float): relative objective decrease regarded as flat.
        include_zero (bool): also fit the static p = 0 model.

    Returns:
        OrderSweepResult
    """
    config = config or SolverConfig()
    if p_max < 1:
        raise InvalidInputError("p_max must be at least 1")
    if p_max >= data.T + 1:
        raise InvalidInputError(f"p_max={p_max} must be below the series length {data.T + 1}")
    candidates = []
    for p in range(0 if include_zero else 1, p_max + 1):
        design = build_lagged_design(data, p, start=p_max)
        result = fit(design.X, design.Y, config)
        amax = float(np.max(np.abs(result.lags(raw=True)[-1]))) if p > 0 else float("nan")
        candidates.append(OrderCandidate(p, result.objective_final, amax, result.converged, result))

    by_p = {c.p: c for c in candidates}
    plateau_p = magnitude_p = None
    for c in candidates:
        nxt = by_p.get(c.p + 1)
        if nxt is None:
            break
        rel = (c.objective - nxt.objective) / abs(c.objective) if c.objective else 0.0
        if plateau_p is None and rel < plateau_tol:
            plateau_p = c.p
        if magnitude_p is None and nxt.max_abs_Ap < config.tau_a:
            magnitude_p = c.p

    note = ""
    if plateau_p is None:
        note = f"objective still improving by >= {plateau_tol:g} at p_max={p_max}; no recommendation"
        recommended = None
    else:
        recommended = plateau_p
        if magnitude_p != plateau_p:
            note = f"criteria disagree: plateau suggests p={plateau_p}, lag magnitude suggests p={magnitude_p}"
        if recommended == 0:
            note = (note + "; " if note else "") + "no lagged structure detected (p=0)"
    return OrderSweepResult(candidates, recommended, plateau_p, magnitude_p, note)
