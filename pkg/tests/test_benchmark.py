import json

import numpy as np
import pytest

from dynotears.benchmark import BenchSpec, SimulationSpec, default_threads, draw_graphs, generate_instance
from dynotears.exceptions import InvalidSpecError
from dynotears.graphgen import GraphSpec
from dynotears.sem import build_lagged_design, companion_spectral_radius


def dense_three_lag_spec(policy, seed=0):
    return SimulationSpec(GraphSpec("ER", d=5, k=4, p=3), GraphSpec("ER", d=5, k=1, p=3, eta=1.5),
                          n=500, seed=seed, stationarity=policy)


def test_rows_match_n():
    for M in (1, 5):
        spec = SimulationSpec(GraphSpec("ER", 4, 1, 2), GraphSpec("ER", 4, 1, 2), n=100, M=M)
        inst = generate_instance(spec)
        assert spec.T == 100 // M + 1
        assert build_lagged_design(inst.data, 2).n == 100


@pytest.mark.parametrize("policy", ["reject", "rescale"])
def test_stable_policies(policy):
    for seed in range(5):
        assert generate_instance(dense_three_lag_spec(policy, seed)).spectral_radius < 1


def test_warn_keeps_unstable_draws():
    radii = []
    for seed in range(10):
        W, A, redraws = draw_graphs(dense_three_lag_spec("warn"), np.random.default_rng(seed))
        assert redraws == 0
        radii.append(companion_spectral_radius(W, A))
    assert max(radii) >= 1


def test_seed_reproducible():
    a, b = generate_instance(dense_three_lag_spec("reject", 3)), generate_instance(dense_three_lag_spec("reject", 3))
    np.testing.assert_array_equal(a.data.values, b.data.values)
    np.testing.assert_array_equal(a.W, b.W)


def test_spec_round_trip():
    spec = dense_three_lag_spec("rescale", 2)
    assert SimulationSpec.from_json(json.dumps(spec.to_dict())) == spec


@pytest.mark.parametrize("kwargs", [{"n": 7, "M": 2}, {"stationarity": "ignore"}])
def test_invalid_simulation_spec(kwargs):
    with pytest.raises(InvalidSpecError):
        SimulationSpec(GraphSpec("ER", 3, 1), GraphSpec("ER", 3, 1), **kwargs)


def test_mismatched_dimensions():
    with pytest.raises(InvalidSpecError):
        SimulationSpec(GraphSpec("ER", 3, 1), GraphSpec("ER", 4, 1))


def test_bench_cells_and_seeds():
    bench = BenchSpec(d=[5, 10], noise=["gaussian", "exponential"], replicates=3, seed_base=7)
    cells = list(bench.cells())
    assert len(cells) == 4
    assert bench.simulation_spec(cells[0], 2).seed == 9
    with pytest.raises(InvalidSpecError):
        BenchSpec(method="three_stage")


def test_default_threads(monkeypatch):
    monkeypatch.setenv("DYNOTEARS_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("DYNOTEARS_THREADS", "many")
    assert default_threads() == 1
