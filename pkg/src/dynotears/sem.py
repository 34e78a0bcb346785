"""Linear SVAR simulation and the lagged regression design.

Convention used throughout: rows are observations, ``X = X W + Y A + Z``,
with ``A`` stacked as ``[A_1; ...; A_p]`` of shape (p*d, d). ``W[i, j] != 0``
is the edge i -> j within a slice; ``A_l[i, j] != 0`` is the edge from
variable i at time t-l to variable j at time t.
"""

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as slin

from .acyclicity import topological_order
from .exceptions import InvalidInputError

NOISE_FAMILIES = ("gaussian", "exponential")


@dataclass
class NoiseSpec:
    family: str = "gaussian"
    scale: float = 1.0

    def __post_init__(self):
        self.family = self.family.lower()
        if self.family not in NOISE_FAMILIES:
            raise InvalidInputError(f"noise family must be one of {NOISE_FAMILIES}")
        if not self.scale > 0:
            raise InvalidInputError("noise scale must be positive")

    def sample(self, rng, size):
        if self.family == "gaussian":
            return rng.normal(0.0, self.scale, size=size)
        # exponential noise, shifted to zero mean
        return rng.exponential(self.scale, size=size) - self.scale


@dataclass
class TimeSeriesDataset:
    """M independent series, each with T+1 slices of d variables."""

    values: np.ndarray
    variable_names: list = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 2:
            self.values = self.values[None]
        if self.values.ndim != 3 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise InvalidInputError(f"values must have shape (M, T+1, d), got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("dataset contains non-finite values")
        if self.variable_names is None:
            self.variable_names = [f"x{i}" for i in range(self.d)]
        self.variable_names = [str(v) for v in self.variable_names]
        if len(self.variable_names) != self.d:
            raise InvalidInputError("variable_names length does not match d")

    @property
    def M(self):
        return self.values.shape[0]

    @property
    def T(self):
        return self.values.shape[1] - 1

    @property
    def d(self):
        return self.values.shape[2]

    def to_csv(self, path_or_buf=None):
        """Write ``series_id,time,<vars>`` rows sorted by (series_id, time)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["series_id", "time", *self.variable_names])
        for m in range(self.M):
            for t in range(self.T + 1):
                writer.writerow([m, t, *(repr(float(v)) for v in self.values[m, t])])
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path_or_buf):
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf, encoding="utf-8") as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:2] != ["series_id", "time"] or len(rows[0]) < 3:
            raise InvalidInputError("dataset CSV header must start with series_id,time")
        names = rows[0][2:]
        series = {}
        try:
            for row in rows[1:]:
                if not row:
                    continue
                if len(row) != len(names) + 2:
                    raise InvalidInputError(f"malformed CSV row: {row}")
                series.setdefault(row[0], []).append((int(row[1]), [float(v) for v in row[2:]]))
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse dataset CSV: {exc}") from exc
        if not series:
            raise InvalidInputError("dataset CSV has no rows")
        blocks = []
        for sid in series:
            obs = sorted(series[sid])
            times = [t for t, _ in obs]
            if times != list(range(len(times))):
                raise InvalidInputError(f"series {sid} does not have contiguous times 0..T")
            blocks.append([v for _, v in obs])
        lengths = {len(b) for b in blocks}
        if len(lengths) != 1:
            raise InvalidInputError("all series must have the same length")
        return cls(np.array(blocks, dtype=float), names)


@dataclass
class LaggedDesign:
    X: np.ndarray
    Y: np.ndarray
    p: int

    @property
    def n(self):
        return self.X.shape[0]


def _check_lags(W, A):
    W = np.asarray(W, dtype=float)
    A = np.asarray(A, dtype=float)
    d = W.shape[0]
    if W.shape != (d, d):
        raise InvalidInputError("W must be square")
    if A.size == 0:
        A = np.zeros((0, d))
    if A.ndim != 2 or A.shape[1] != d or A.shape[0] % d:
        raise InvalidInputError(f"A must have shape (p*d, d), got {A.shape}")
    return W, A


def lag_blocks(A, d):
    """Split stacked (p*d, d) inter-slice weights into a (p, d, d) array."""
    A = np.asarray(A, dtype=float)
    return A.reshape(-1, d, d)


def simulate(W, A, M, T, noise=None, rng=None, burn_in=0):
    """Draw M series of T+1 slices from the SVAR defined by (W, A).

    The first p slices (after any burn-in) have no lagged input: they are
    drawn from the intra-slice model x = z (I - W)^-1 alone. Each slice is
    obtained by a triangular solve in a topological order of W.

    Args:
        W (np.ndarray): [d, d] acyclic intra-slice weights.
        A (np.ndarray): [p*d, d] stacked inter-slice weights.
        M (int): number of independent series.
        T (int): last time index; each series has T+1 slices.
        noise (NoiseSpec): noise family and scale (default standard Gaussian).
        rng (np.random.Generator): randomness source.
        burn_in (int): extra slices generated first and discarded.

    Returns:
        TimeSeriesDataset
    """
    W, A = _check_lags(W, A)
    noise = noise or NoiseSpec()
    rng = np.random.default_rng() if rng is None else rng
    d = W.shape[0]
    p = A.shape[0] // d
    if M < 1 or T < 0:
        raise InvalidInputError("need M >= 1 and T >= 0")
    if T + 1 <= p:
        raise InvalidInputError(f"T+1={T + 1} must exceed p={p}")
    order = topological_order(W)
    if order is None:
        raise InvalidInputError("W must be acyclic")
    radius = companion_spectral_radius(W, A)
    if radius >= 1:
        warnings.warn(f"simulated process is not stable: companion spectral radius {radius:.4f} >= 1",
                      RuntimeWarning, stacklevel=2)

    # in topological order W is strictly upper triangular, so (I - W)^T is lower
    perm = np.asarray(order)
    Wp = W[np.ix_(perm, perm)]
    Lp = (np.eye(d) - Wp).T
    lags = lag_blocks(A, d)[:, perm][:, :, perm]

    steps = burn_in + T + 1
    Z = noise.sample(rng, (steps, M, d))
    out = np.empty((steps, M, d))
    for t in range(steps):
        rhs = Z[t].copy()
        if t >= p:
            for ell in range(1, p + 1):
                rhs += out[t - ell] @ lags[ell - 1]
        out[t] = slin.solve_triangular(Lp, rhs.T, lower=True, unit_diagonal=True).T
    values = np.empty((M, T + 1, d))
    values[:, :, perm] = out[burn_in:].transpose(1, 0, 2)
    return TimeSeriesDataset(values)


def build_lagged_design(data, p, start=None):
    """Stack (X, Y) with X rows x_{m,t} and Y rows [x_{m,t-1}, ..., x_{m,t-p}].

    Args:
        data (TimeSeriesDataset): source series.
        p (int): lag order.
        start (int): first time index used for X rows; defaults to p. A
            larger value aligns designs of different orders on the same rows.
    """
    if p < 0:
        raise InvalidInputError("p must be non-negative")
    start = p if start is None else start
    if start < p:
        raise InvalidInputError("start must be >= p")
    if start >= data.T + 1:
        raise InvalidInputError(f"p={p} leaves no complete rows in series of length {data.T + 1}")
    vals = data.values
    X = vals[:, start:].reshape(-1, data.d)
    if p == 0:
        Y = np.zeros((X.shape[0], 0))
    else:
        Y = np.concatenate(
            [vals[:, start - ell:data.T + 1 - ell].reshape(-1, data.d) for ell in range(1, p + 1)],
            axis=1,
        )
    return LaggedDesign(X=np.ascontiguousarray(X), Y=np.ascontiguousarray(Y), p=p)


def companion_matrix(W, A):
    """Companion matrix of the reduced form x_t = sum_l B_l^T x_{t-l} + e_t."""
    W, A = _check_lags(W, A)
    d = W.shape[0]
    p = A.shape[0] // d
    if p == 0:
        return np.zeros((0, 0))
    inv = np.linalg.inv(np.eye(d) - W)
    C = np.zeros((d * p, d * p))
    for ell, A_l in enumerate(lag_blocks(A, d)):
        C[:d, ell * d:(ell + 1) * d] = (A_l @ inv).T
    C[d:, :-d] = np.eye(d * (p - 1))
    return C


def companion_spectral_radius(W, A):
    C = companion_matrix(W, A)
    if C.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(C))))


def stabilize(W, A, target=0.95, max_rounds=50):
    """Rescale A by target/radius until the companion spectral radius is below 1.

    A single rescale is exact for p = 1; for longer lags the radius is not
    homogeneous in A, so the rescale is repeated. Returns A unchanged when
    the process is already stable.
    """
    A = np.asarray(A, dtype=float)
    for _ in range(max_rounds):
        radius = companion_spectral_radius(W, A)
        if radius < 1:
            break
        A = A * (target / radius)
    return A
