"""Trace-exponential acyclicity function and an exact graph-traversal check."""

import numpy as np
import scipy.linalg as slin

from .exceptions import InvalidInputError


def _as_square(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return M


def matrix_exponential(M):
    """Return e^M (scaling-and-squaring with a degree-13 Padé approximant)."""
    return slin.expm(_as_square(M))


def h_and_grad(W):
    """Evaluate h(W) = tr(e^{W∘W}) - d and its gradient.

    The exponential is computed once and reused for the gradient,
    ``grad = (e^{W∘W})^T ∘ 2W``.

    Args:
        W (np.ndarray): [d, d] weighted adjacency matrix.

    Returns:
        h (float): zero iff the support of W is acyclic.
        grad (np.ndarray): [d, d] gradient of h with respect to W.
    """
    W = _as_square(W, "W")
    E = slin.expm(W * W)
    h = float(np.trace(E)) - W.shape[0]
    return h, E.T * W * 2.0


def h_value(W):
    return h_and_grad(W)[0]


def topological_order(W, zero_tol=0.0):
    """Kahn's algorithm on the support of W; returns None if a cycle exists.

    Edge i -> j whenever |W[i, j]| > zero_tol. Self-loops count as cycles.
    """
    W = np.asarray(W, dtype=float)
    adj = np.abs(W) > zero_tol
    d = adj.shape[0]
    indeg = adj.sum(axis=0).astype(int)
    stack = [j for j in range(d) if indeg[j] == 0]
    order = []
    while stack:
        i = stack.pop()
        order.append(i)
        for j in np.flatnonzero(adj[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                stack.append(int(j))
    if len(order) != d:
        return None
    return order


def is_acyclic_exact(W, zero_tol=0.0):
    """True iff the directed graph {i -> j : |W_ij| > zero_tol} has no cycle."""
    if zero_tol < 0:
        raise InvalidInputError("zero_tol must be non-negative")
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidInputError(f"W must be square, got shape {W.shape}")
    return topological_order(W, zero_tol) is not None
