import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynotears.exceptions import InvalidInputError
from dynotears.metrics import (
    MetricReport,
    aupr_auroc,
    combined_score,
    edges_to_matrix,
    evaluate,
    f1,
    frobenius_diff,
    shd,
    tpr_fdr,
)

PAIRS = [(i, j) for i in range(3) for j in range(3) if i != j]


def graph(*edges, d=3):
    # 1-based edges as in the examples
    return edges_to_matrix([(i - 1, j - 1) for i, j in edges], (d, d))


def as_key(M):
    return frozenset((i, j) for i, j in PAIRS if M[i, j])


def neighbours(g):
    for e in PAIRS:
        if e in g:
            yield g - {e}
            rev = (e[1], e[0])
            if rev not in g:
                yield (g - {e}) | {rev}
        else:
            yield g | {e}


def brute_force_shd():
    """All-pairs edit distance on 3-node digraphs by breadth-first search."""
    graphs = [frozenset(e for e, bit in zip(PAIRS, bits) if bit)
              for bits in itertools.product([0, 1], repeat=len(PAIRS))]
    dist = {}
    for src in graphs:
        seen = {src: 0}
        queue = deque([src])
        while queue:
            g = queue.popleft()
            for h in neighbours(g):
                if h not in seen:
                    seen[h] = seen[g] + 1
                    queue.append(h)
        dist[src] = seen
    return graphs, dist


class TestRates:
    def test_partial(self):
        assert tpr_fdr(graph((1, 2), (2, 3)), graph((1, 2))) == (0.5, 0.0)
        assert f1(graph((1, 2), (2, 3)), graph((1, 2))) == pytest.approx(2 / 3, abs=1e-15)

    def test_exact(self):
        g = graph((1, 2), (2, 3))
        assert tpr_fdr(g, g) == (1.0, 0.0)
        assert f1(g, g) == 1.0

    def test_reversal_is_not_a_match(self):
        assert tpr_fdr(graph((1, 2)), graph((2, 1))) == (0.0, 1.0)

    def test_empty_cases(self):
        empty = np.zeros((3, 3))
        assert tpr_fdr(empty, empty) == (1.0, 0.0)
        assert tpr_fdr(empty, graph((1, 2))) == (0.0, 1.0)
        assert f1(graph((1, 2)), empty) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            tpr_fdr(np.zeros((2, 2)), np.zeros((3, 3)))

    def test_f1_is_one_iff_equal(self):
        graphs, _ = brute_force_shd()
        for a in graphs[::5]:
            for b in graphs[::3]:
                A, B = edges_to_matrix(a, (3, 3)), edges_to_matrix(b, (3, 3))
                assert (f1(A, B) == 1.0) == (a == b)


class TestSHD:
    def test_examples(self):
        g = graph((1, 2), (2, 3))
        assert shd(g, g) == 0
        assert shd(g, graph((1, 2), (3, 2))) == 1
        assert shd(graph((1, 2)), np.zeros((3, 3))) == 1

    def test_matches_brute_force_on_all_pairs(self):
        graphs, dist = brute_force_shd()
        assert len(graphs) == 64
        for a in graphs:
            A = edges_to_matrix(a, (3, 3))
            for b in graphs:
                assert shd(A, edges_to_matrix(b, (3, 3))) == dist[a][b]

    def test_inter_counts_differences(self):
        truth = np.array([[1.0, 0.0], [0.0, 1.0]])
        est = np.array([[0.0, 1.0], [0.0, 1.0]])
        assert shd(truth, est, intra=False) == 2

    def test_symmetric(self, rng):
        for _ in range(200):
            a = (rng.random((5, 5)) < 0.3) * (1 - np.eye(5))
            b = (rng.random((5, 5)) < 0.3) * (1 - np.eye(5))
            assert shd(a, b) == shd(b, a)


class TestFrobenius:
    def test_examples(self, rng):
        M = rng.standard_normal((4, 4))
        assert frobenius_diff(M, M) == 0.0
        E = np.zeros((3, 3))
        E[1, 2] = 3.0
        assert frobenius_diff(np.zeros((3, 3)), E) == 3.0

    def test_naive_double_loop(self, rng):
        a, b = rng.standard_normal((6, 4)), rng.standard_normal((6, 4))
        total = 0.0
        for i in range(6):
            for j in range(4):
                total += (a[i, j] - b[i, j]) ** 2
        assert frobenius_diff(a, b) == pytest.approx(total ** 0.5, rel=1e-12)


class TestCurves:
    def test_perfect_ranking(self):
        aupr, auroc = aupr_auroc(np.array([0.9, 0.1]), np.array([1, 0]))
        assert aupr == pytest.approx(1.0, abs=1e-12)
        assert auroc == pytest.approx(1.0, abs=1e-12)

    def test_all_tied(self):
        aupr, auroc = aupr_auroc(np.full(6, 0.4), np.array([1, 0, 1, 0, 1, 0]))
        # one step to (recall 1, precision 1/2); ROC is the chord from (0,0) to (1,1)
        assert aupr == pytest.approx(0.5, abs=1e-12)
        assert auroc == pytest.approx(0.5, abs=1e-12)

    def test_inverted_ranking(self):
        aupr, auroc = aupr_auroc(np.array([0.1, 0.9]), np.array([1, 0]))
        assert auroc == pytest.approx(0.0, abs=1e-12)
        assert aupr == pytest.approx(0.5, abs=1e-12)

    def test_hand_integrated_mixed(self):
        # ranking: pos 0.8, neg 0.6, pos 0.4, neg 0.2
        aupr, auroc = aupr_auroc(np.array([0.8, 0.6, 0.4, 0.2]), np.array([1, 0, 1, 0]))
        assert aupr == pytest.approx(0.5 * 1 + 0.5 * (2 / 3), abs=1e-12)
        assert auroc == pytest.approx(0.75, abs=1e-12)

    def test_diagonal_excluded(self):
        score = np.array([[5.0, 0.9], [0.1, 5.0]])
        truth = np.array([[0, 1], [0, 0]])
        assert aupr_auroc(score, truth) == pytest.approx((1.0, 1.0), abs=1e-12)

    def test_undefined(self):
        with pytest.raises(InvalidInputError):
            aupr_auroc(np.ones(3), np.zeros(3))
        with pytest.raises(InvalidInputError):
            aupr_auroc(np.ones(3), np.ones(3))
        with pytest.raises(InvalidInputError):
            aupr_auroc(-np.ones(2), np.array([1, 0]))

    def test_against_sklearn(self, rng):
        sk = pytest.importorskip("sklearn.metrics")
        for _ in range(50):
            y = rng.random(40) < 0.3
            y[:2] = [True, False]
            s = np.round(rng.random(40), 1)  # coarse values to force ties
            aupr, auroc = aupr_auroc(s, y)
            assert aupr == pytest.approx(sk.average_precision_score(y, s), abs=1e-12)
            assert auroc == pytest.approx(sk.roc_auc_score(y, s), abs=1e-12)

    def test_combined_score(self):
        W = np.array([[0.0, -1.0], [0.0, 0.0]])
        A = np.array([[0.5, 0.0], [0.0, -0.2], [0.1, 0.0], [0.0, 0.0]])
        np.testing.assert_allclose(combined_score(W, A), [[0.6, 1.0], [0.0, 0.2]])


# integer scores keep the transform strictly monotone in floating point
@given(st.lists(st.integers(0, 20), min_size=4, max_size=30), st.integers(0, 2 ** 16))
@settings(max_examples=100, deadline=None)
def test_curves_invariant_under_monotone_transform(scores, seed):
    s = np.array(scores, dtype=float)
    y = np.random.default_rng(seed).random(s.size) < 0.5
    y[0], y[1] = True, False
    a = aupr_auroc(s, y)
    b = aupr_auroc(np.sqrt(s) * 3 + 1, y)
    assert a == pytest.approx(b, abs=1e-12)


class TestReport:
    def test_identity(self):
        W = graph((1, 2), (2, 3)) * 0.7
        A = graph((1, 1), (3, 2)) * 0.4
        rep = evaluate(W, A, W, A)
        assert rep.intra_f1 == rep.inter_f1 == 1.0
        assert rep.intra_shd == rep.inter_shd == 0

    def test_known_fixture(self):
        W_true = graph((1, 2), (2, 3))
        W_est = graph((1, 2), (3, 2))
        A_true = graph((1, 1), (2, 2))
        A_est = graph((1, 1))
        rep = evaluate(W_true, A_true, W_est, A_est)
        assert (rep.intra_tpr, rep.intra_fdr, rep.intra_shd) == (0.5, 0.5, 1)
        assert rep.intra_fro == pytest.approx(2 ** 0.5)
        assert (rep.inter_tpr, rep.inter_fdr, rep.inter_shd) == (0.5, 0.0, 1)
        assert rep.inter_f1 == pytest.approx(2 / 3)

    def test_csv_row(self):
        rep = MetricReport(1.0, 0.0, 1.0, 0, 0.0, 0.5, 0.25, 0.6, 2, 1.5)
        assert rep.csv_header().split(",")[0] == "intra_tpr"
        assert rep.to_csv_row().split(",") == ["1.0", "0.0", "1.0", "0", "0.0", "0.5", "0.25", "0.6", "2", "1.5"]
