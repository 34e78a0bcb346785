import numpy as np
import pytest

from acceptance_registry import RESULTS


def exact_moment_design(W, A, n, rng):
    """(X, Y) with X (I - W) = Y A + Z, Z^T Z / n = I and Z^T Y = 0 exactly.

    With these sample moments the population least-squares solution is
    attained on the sample, so an exact estimator recovers (W, A).
    """
    d = W.shape[0]
    pd = A.shape[0]
    G = rng.standard_normal((n, pd + d))
    Q, _ = np.linalg.qr(G)
    Y = rng.standard_normal((n, pd)) if pd == 0 else Q[:, :pd] @ rng.standard_normal((pd, pd)) * np.sqrt(n)
    Z = Q[:, pd:] * np.sqrt(n)
    X = (Y @ A + Z) @ np.linalg.inv(np.eye(d) - W)
    return X, Y


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        status, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {status:<4}  {detail}")
