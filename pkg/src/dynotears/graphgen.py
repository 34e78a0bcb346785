"""Ground-truth graph generators for intra-slice DAGs and inter-slice lag graphs.

All randomness goes through ``numpy.random.Generator`` (PCG64 bit generator),
so a fixed seed reproduces the same graphs on every platform.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import InvalidSpecError

INTRA_MODELS = ("ER", "BA")
INTER_MODELS = ("ER", "SBM")

INTRA_WEIGHT_RANGE = (0.5, 2.0)
INTER_WEIGHT_RANGE = (0.3, 0.5)


@dataclass
class GraphSpec:
    """Parameters of one random graph model.

    ``model`` is ER/BA for intra-slice graphs and ER/SBM for inter-slice
    graphs. ``k`` is the target mean degree (intra, counting both
    directions) or mean in-degree per lag (inter).
    """

    model: str = "ER"
    d: int = 5
    k: float = 1.0
    p: int = 1
    eta: float = 1.0
    sbm_ratio: float = 0.3
    seed: int = 0
    weight_range: tuple = field(default=None)

    def __post_init__(self):
        self.model = str(self.model).upper()
        if self.d < 1:
            raise InvalidSpecError("d must be positive")
        if self.k < 0:
            raise InvalidSpecError("k must be non-negative")
        if self.p < 0:
            raise InvalidSpecError("p must be non-negative")
        if self.eta < 1:
            raise InvalidSpecError("eta must be >= 1")
        if self.weight_range is not None:
            lo, hi = self.weight_range
            if not 0 < lo < hi:
                raise InvalidSpecError("weight range must satisfy 0 < low < high")
            self.weight_range = (float(lo), float(hi))

    def rng(self):
        return np.random.default_rng(self.seed)

    def to_dict(self):
        out = asdict(self)
        if self.weight_range is None:
            del out["weight_range"]
        else:
            out["weight_range"] = list(self.weight_range)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        known = {"model", "d", "k", "p", "eta", "sbm_ratio", "seed", "weight_range"}
        unknown = set(doc) - known
        if unknown:
            raise InvalidSpecError(f"unknown GraphSpec keys: {sorted(unknown)}")
        doc = dict(doc)
        if doc.get("weight_range") is not None:
            doc["weight_range"] = tuple(doc["weight_range"])
        try:
            return cls(**doc)
        except TypeError as exc:
            raise InvalidSpecError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _permute(B, rng):
    perm = rng.permutation(B.shape[0])
    return B[np.ix_(perm, perm)]


def _er_lower(d, k, rng):
    if d == 1:
        return np.zeros((1, 1))
    prob = k / (d - 1)
    B = rng.random((d, d)) < prob
    return np.tril(B, k=-1).astype(float)


def _ba_dag(d, k, rng):
    B = np.zeros((d, d))
    if k == 0:
        return B
    m = max(1, math.ceil(k / 2))
    degree = np.zeros(d)
    for new in range(m, d):
        weights = np.where(degree[:new] > 0, degree[:new], 1.0)
        n_targets = min(m, new)
        targets = rng.choice(new, size=n_targets, replace=False, p=weights / weights.sum())
        B[new, targets] = 1.0
        degree[targets] += 1
        degree[new] += n_targets
    return B


def gen_intra_dag(spec, rng=None):
    """Sample a binary DAG with randomly permuted node order.

    ER draws the strictly lower triangle with probability k/(d-1). BA grows
    the graph node by node, each new node sending ceil(k/2) edges to
    existing nodes chosen proportionally to their degree (degree-0 nodes
    get weight 1).
    """
    if spec.model not in INTRA_MODELS:
        raise InvalidSpecError(f"intra-slice model must be one of {INTRA_MODELS}, got {spec.model}")
    if spec.k > max(spec.d - 1, 0):
        raise InvalidSpecError(f"mean degree k={spec.k} exceeds d-1={spec.d - 1}")
    rng = spec.rng() if rng is None else rng
    if spec.model == "ER":
        B = _er_lower(spec.d, spec.k, rng)
    else:
        B = _ba_dag(spec.d, spec.k, rng)
    return _permute(B, rng)


def sbm_probabilities(d, k, ratio):
    """Within/across block edge probabilities giving mean in-degree k per lag."""
    s1 = math.ceil(d / 2)
    s2 = d - s1
    denom = s1 * s1 + s2 * s2 + 2.0 * ratio * s1 * s2
    p_in = k * d / denom
    return p_in, ratio * p_in


def sbm_blocks(d):
    return np.arange(d) >= math.ceil(d / 2)


def gen_inter_slice(spec, rng=None):
    """Sample p binary d x d lag matrices, returned with shape (p, d, d)."""
    if spec.model not in INTER_MODELS:
        raise InvalidSpecError(f"inter-slice model must be one of {INTER_MODELS}, got {spec.model}")
    rng = spec.rng() if rng is None else rng
    d, p = spec.d, spec.p
    if spec.model == "ER":
        prob = np.full((d, d), spec.k / d)
    else:
        p_in, p_out = sbm_probabilities(d, spec.k, spec.sbm_ratio)
        block = sbm_blocks(d)
        prob = np.where(block[:, None] == block[None, :], p_in, p_out)
    if prob.max(initial=0.0) > 1:
        raise InvalidSpecError(f"edge probability {prob.max():.3f} exceeds 1 for k={spec.k}, d={d}")
    return (rng.random((p, d, d)) < prob).astype(float)


def _signed_uniform(mask, low, high, rng):
    mag = rng.uniform(low, high, size=mask.shape)
    sign = np.where(rng.random(mask.shape) < 0.5, -1.0, 1.0)
    return np.where(mask != 0, sign * mag, 0.0)


def assign_intra_weights(g, rng, weight_range=INTRA_WEIGHT_RANGE):
    """Weights uniform on [-high, -low] ∪ [low, high] on the edges of g."""
    low, high = weight_range
    return _signed_uniform(np.asarray(g), low, high, rng)


def assign_inter_weights(g, eta, rng, weight_range=INTER_WEIGHT_RANGE):
    """Weight lag l edges from ±[low, high] scaled by eta^-(l-1).

    Args:
        g (np.ndarray): [p, d, d] binary lag graphs.
        eta (float): decay base, >= 1.

    Returns:
        np.ndarray: stacked [p*d, d] matrix A = [A_1; ...; A_p].
    """
    if eta < 1:
        raise InvalidSpecError("eta must be >= 1")
    g = np.asarray(g, dtype=float)
    p, d, _ = g.shape
    low, high = weight_range
    lags = np.empty_like(g)
    for lag in range(p):
        alpha = eta ** (-lag)
        lags[lag] = _signed_uniform(g[lag], low * alpha, high * alpha, rng)
    return lags.reshape(p * d, d)


def random_dag_weights(spec, rng=None):
    """Convenience: binary DAG plus intra-slice weights from one generator."""
    rng = spec.rng() if rng is None else rng
    g = gen_intra_dag(spec, rng)
    return assign_intra_weights(g, rng, spec.weight_range or INTRA_WEIGHT_RANGE)


def random_inter_weights(spec, rng=None):
    rng = spec.rng() if rng is None else rng
    g = gen_inter_slice(spec, rng)
    return assign_inter_weights(g, spec.eta, rng, spec.weight_range or INTER_WEIGHT_RANGE)
