"""Structure-recovery metrics: TPR, FDR, F1, SHD, Frobenius error, AUPR/AUROC.

Graphs are passed as matrices; any nonzero entry is an edge. Intra-slice
matrices are d x d, inter-slice matrices are stacked (p*d, d) and each
(lag, source, target) entry counts as a separate edge.
"""

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import InvalidInputError


def _support(M):
    return np.asarray(M) != 0


def _pair(truth, est):
    truth, est = _support(truth), _support(est)
    if truth.shape != est.shape:
        raise InvalidInputError(f"shape mismatch: truth {truth.shape} vs estimate {est.shape}")
    return truth, est


def edge_set(M):
    """Directed edges {(i, j)} of a matrix, i.e. positions of nonzero entries."""
    return {tuple(int(v) for v in ij) for ij in np.argwhere(_support(M))}


def edges_to_matrix(edges, shape):
    M = np.zeros(shape)
    for e in edges:
        M[tuple(e)] = 1.0
    return M


def tpr_fdr(truth, est):
    """True positive rate and false discovery rate over exact directed matches.

    An empty ground truth gives tpr = 1 when the estimate is also empty and
    0 otherwise; an empty estimate gives fdr = 0.
    """
    truth, est = _pair(truth, est)
    tp = int(np.sum(truth & est))
    n_true, n_est = int(truth.sum()), int(est.sum())
    if n_true == 0:
        tpr = 1.0 if n_est == 0 else 0.0
    else:
        tpr = tp / n_true
    fdr = 0.0 if n_est == 0 else (n_est - tp) / n_est
    return tpr, fdr


def f1(truth, est):
    tpr, fdr = tpr_fdr(truth, est)
    precision, recall = 1.0 - fdr, tpr
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def shd(truth, est, intra=True):
    """Structural Hamming distance.

    For intra-slice graphs a reversed edge costs one change; per unordered
    pair {i, j} the cost is 0 if both graphs agree, 2 when one graph has
    both directions and the other none, and 1 otherwise. Inter-slice edges
    cannot be reversed, so the distance is the number of differing entries.
    """
    truth, est = _pair(truth, est)
    if not intra:
        return int(np.sum(truth != est))
    if truth.shape[0] != truth.shape[1]:
        raise InvalidInputError("intra-slice SHD needs square matrices")
    diag = int(np.sum(np.diag(truth) != np.diag(est)))
    upper = np.triu_indices(truth.shape[0], k=1)
    t_fwd, t_bwd = truth[upper], truth.T[upper]
    e_fwd, e_bwd = est[upper], est.T[upper]
    same = (t_fwd == e_fwd) & (t_bwd == e_bwd)
    t_both_vs_e_none = t_fwd & t_bwd & ~e_fwd & ~e_bwd
    e_both_vs_t_none = e_fwd & e_bwd & ~t_fwd & ~t_bwd
    cost = np.where(same, 0, np.where(t_both_vs_e_none | e_both_vs_t_none, 2, 1))
    return int(cost.sum()) + diag


def frobenius_diff(M_truth, M_est):
    M_truth = np.asarray(M_truth, dtype=float)
    M_est = np.asarray(M_est, dtype=float)
    if M_truth.shape != M_est.shape:
        raise InvalidInputError(f"shape mismatch: {M_truth.shape} vs {M_est.shape}")
    return float(np.linalg.norm(M_truth - M_est))


def combined_score(W, A):
    """Element-wise score |W| + sum_l |A_l| used for a single ranked edge list."""
    W = np.abs(np.asarray(W, dtype=float))
    A = np.abs(np.asarray(A, dtype=float)).reshape(-1, *W.shape)
    return W + A.sum(axis=0)


def aupr_auroc(score, truth_binary, exclude_diagonal=True):
    """Areas under the precision-recall and ROC curves of a score matrix.

    Candidates are ranked by decreasing score; tied scores enter as one
    threshold step. AUPR sums precision times recall increments over the
    steps (step-wise interpolation), AUROC integrates TPR against FPR with
    the trapezoidal rule.
    """
    score = np.asarray(score, dtype=float)
    truth = _support(truth_binary)
    if score.shape != truth.shape:
        raise InvalidInputError(f"shape mismatch: {score.shape} vs {truth.shape}")
    if np.any(score < 0):
        raise InvalidInputError("scores must be non-negative")
    mask = np.ones(score.shape, dtype=bool)
    if exclude_diagonal and score.ndim == 2 and score.shape[0] == score.shape[1]:
        np.fill_diagonal(mask, False)
    s, y = score[mask], truth[mask]
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0:
        raise InvalidInputError("AUPR/AUROC undefined: ground truth has no edges")
    if n_neg == 0:
        raise InvalidInputError("AUROC undefined: ground truth has no non-edges")

    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # last index of each run of tied scores
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp = np.cumsum(y)[ends].astype(float)
    fp = (ends + 1) - tp
    recall = tp / n_pos
    precision = tp / (ends + 1)
    aupr = float(np.sum(np.diff(np.r_[0.0, recall]) * precision))
    tpr = np.r_[0.0, recall]
    fpr = np.r_[0.0, fp / n_neg]
    auroc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2))
    return aupr, auroc


@dataclass
class MetricReport:
    intra_tpr: float
    intra_fdr: float
    intra_f1: float
    intra_shd: int
    intra_fro: float
    inter_tpr: float
    inter_fdr: float
    inter_f1: float
    inter_shd: int
    inter_fro: float

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_header(self):
        return ",".join(self.to_dict())

    def to_csv_row(self):
        buf = io.StringIO()
        csv.writer(buf, lineterminator="").writerow(self.to_dict().values())
        return buf.getvalue()


def evaluate(W_true, A_true, W_est, A_est):
    """Intra- and inter-slice metrics of an estimate against ground truth."""
    W_true = np.asarray(W_true, dtype=float)
    A_true = np.asarray(A_true, dtype=float).reshape(-1, W_true.shape[0])
    A_est = np.asarray(A_est, dtype=float).reshape(-1, W_true.shape[0])
    intra = tpr_fdr(W_true, W_est)
    inter = tpr_fdr(A_true, A_est)
    return MetricReport(
        intra_tpr=intra[0], intra_fdr=intra[1], intra_f1=f1(W_true, W_est),
        intra_shd=shd(W_true, W_est), intra_fro=frobenius_diff(W_true, W_est),
        inter_tpr=inter[0], inter_fdr=inter[1], inter_f1=f1(A_true, A_est),
        inter_shd=shd(A_true, A_est, intra=False), inter_fro=frobenius_diff(A_true, A_est),
    )


def combined_f1(W_true, A_true, W_est, A_est):
    """F1 over the union of intra- and inter-slice edges."""
    W_true = np.asarray(W_true, dtype=float)
    d = W_true.shape[0]
    truth = np.concatenate([W_true, np.asarray(A_true, dtype=float).reshape(-1, d)])
    est = np.concatenate([np.asarray(W_est, dtype=float), np.asarray(A_est, dtype=float).reshape(-1, d)])
    return f1(truth, est)


def combined_shd(W_a, A_a, W_b, A_b):
    d = np.asarray(W_a).shape[0]
    return shd(W_a, W_b) + shd(np.asarray(A_a).reshape(-1, d), np.asarray(A_b).reshape(-1, d), intra=False)
