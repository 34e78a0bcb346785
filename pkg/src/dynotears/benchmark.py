"""Simulation instances and replicated benchmark grids.

A :class:`SimulationSpec` fixes both graph models, the sample size and the
noise; :func:`generate_instance` turns it into ground truth plus data.
:class:`BenchSpec` describes a grid of such instances, and :func:`run_bench`
fits every replicate and returns long-format metric rows.
"""

import itertools
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import InvalidSpecError
from .graphgen import GraphSpec, random_dag_weights, random_inter_weights
from .metrics import combined_f1, evaluate
from .sem import NoiseSpec, build_lagged_design, companion_spectral_radius, simulate, stabilize
from .solver import SolverConfig, fit
from .twostage import fit_two_stage

logger = logging.getLogger(__name__)

STATIONARITY_MODES = ("warn", "rescale", "reject")
THREADS_ENV = "DYNOTEARS_THREADS"


@dataclass
class SimulationSpec:
    """Ground-truth graphs, sample size and noise for one simulated dataset.

    ``n`` is the number of usable rows after lagging. With ``M`` series each
    series gets ``n / M`` rows, so ``T = n / M + p - 1``. The top-level
    ``seed`` drives every random draw; seeds inside the graph specs are
    ignored here.

    ``stationarity`` controls unstable draws (companion spectral radius
    >= 1): ``warn`` keeps them, ``rescale`` shrinks A, ``reject`` redraws
    both graphs until the process is stable.
    """

    intra: GraphSpec
    inter: GraphSpec
    n: int = 500
    M: int = 1
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0
    burn_in: int = 0
    stationarity: str = "reject"
    max_redraws: int = 1000

    def __post_init__(self):
        if isinstance(self.intra, dict):
            self.intra = GraphSpec.from_dict(self.intra)
        if isinstance(self.inter, dict):
            self.inter = GraphSpec.from_dict(self.inter)
        if isinstance(self.noise, dict):
            self.noise = NoiseSpec(**self.noise)
        if self.intra.d != self.inter.d:
            raise InvalidSpecError("intra and inter graph specs must share d")
        if self.stationarity not in STATIONARITY_MODES:
            raise InvalidSpecError(f"stationarity must be one of {STATIONARITY_MODES}")
        if self.n < 1 or self.M < 1 or self.n % self.M:
            raise InvalidSpecError("n must be a positive multiple of M")

    @property
    def d(self):
        return self.intra.d

    @property
    def p(self):
        return self.inter.p

    @property
    def T(self):
        return self.n // self.M + self.p - 1

    def to_dict(self):
        out = asdict(self)
        out["intra"] = self.intra.to_dict()
        out["inter"] = self.inter.to_dict()
        return out

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(**doc)
        except TypeError as exc:
            raise InvalidSpecError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class Instance:
    W: np.ndarray
    A: np.ndarray
    data: object
    spectral_radius: float
    redraws: int = 0


def draw_graphs(spec, rng):
    """Weighted (W, A) for a spec, honouring its stationarity policy."""
    for attempt in range(spec.max_redraws):
        W = random_dag_weights(spec.intra, rng)
        A = random_inter_weights(spec.inter, rng)
        radius = companion_spectral_radius(W, A)
        if radius < 1 or spec.stationarity == "warn":
            return W, A, attempt
        if spec.stationarity == "rescale":
            return W, stabilize(W, A), attempt
    raise InvalidSpecError(f"no stable draw in {spec.max_redraws} attempts; use stationarity='rescale'")


def generate_instance(spec, rng=None):
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    W, A, redraws = draw_graphs(spec, rng)
    data = simulate(W, A, spec.M, spec.T, spec.noise, rng, burn_in=spec.burn_in)
    return Instance(W=W, A=A, data=data, spectral_radius=companion_spectral_radius(W, A), redraws=redraws)


def fit_instance(instance, p, config, method="one_stage"):
    design = build_lagged_design(instance.data, p)
    if method == "one_stage":
        return fit(design.X, design.Y, config)
    if method == "two_stage":
        return fit_two_stage(design.X, design.Y, config)
    raise InvalidSpecError(f"unknown method {method!r}")


@dataclass
class BenchSpec:
    """Grid of simulation settings, each run for ``replicates`` seeds.

    Replicate r of every grid cell uses seed ``seed_base + r``.
    """

    d: list = field(default_factory=lambda: [5, 10])
    graphs: list = field(default_factory=lambda: [{"intra": "ER", "intra_k": 2, "inter": "ER", "inter_k": 1}])
    noise: list = field(default_factory=lambda: ["gaussian"])
    n: list = field(default_factory=lambda: [500])
    p: int = 1
    eta: float = 1.5
    replicates: int = 5
    seed_base: int = 0
    preset: str = "n500"
    solver: dict = field(default_factory=dict)
    method: str = "one_stage"
    stationarity: str = "reject"
    sbm_ratio: float = 0.3

    def __post_init__(self):
        for name in ("d", "noise", "n"):
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)):
                setattr(self, name, [value])
        if self.replicates < 1:
            raise InvalidSpecError("replicates must be positive")
        if self.method not in ("one_stage", "two_stage"):
            raise InvalidSpecError(f"unknown method {self.method!r}")
        for g in self.graphs:
            missing = {"intra", "intra_k", "inter", "inter_k"} - set(g)
            if missing:
                raise InvalidSpecError(f"graph entry {g} lacks {sorted(missing)}")
        # validate every cell up front
        for cell in self.cells():
            self.simulation_spec(cell, 0)

    def config(self):
        return SolverConfig.from_preset(self.preset, **self.solver)

    def cells(self):
        for d, g, noise, n in itertools.product(self.d, self.graphs, self.noise, self.n):
            yield {"d": d, "intra": g["intra"], "intra_k": g["intra_k"], "inter": g["inter"],
                   "inter_k": g["inter_k"], "noise": noise, "n": n}

    def simulation_spec(self, cell, replicate):
        seed = self.seed_base + replicate
        intra = GraphSpec(cell["intra"], cell["d"], cell["intra_k"], self.p, seed=seed)
        inter = GraphSpec(cell["inter"], cell["d"], cell["inter_k"], self.p, eta=self.eta,
                          sbm_ratio=self.sbm_ratio, seed=seed)
        return SimulationSpec(intra, inter, n=cell["n"], noise=NoiseSpec(cell["noise"]), seed=seed,
                              stationarity=self.stationarity)

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(**doc)
        except TypeError as exc:
            raise InvalidSpecError(str(exc)) from exc


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_replicate(bench, cell, replicate):
    spec = bench.simulation_spec(cell, replicate)
    inst = generate_instance(spec)
    result = fit_instance(inst, bench.p, bench.config(), bench.method)
    report = evaluate(inst.W, inst.A, result.W, result.A).to_dict()
    report["combined_f1"] = combined_f1(inst.W, inst.A, result.W, result.A)
    report["converged"] = float(result.converged)
    return spec.seed, report


def run_bench(bench, threads=None):
    """Run all (cell, replicate) jobs; rows come back in grid-then-replicate order.

    Returns:
        list of dict rows with the cell fields, replicate, seed, metric, value.
    """
    threads = threads or default_threads()
    jobs = [(cell, r) for cell in bench.cells() for r in range(bench.replicates)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: run_replicate(bench, *job), jobs))
    else:
        results = [run_replicate(bench, *job) for job in jobs]
    rows = []
    for (cell, r), (seed, report) in zip(jobs, results):
        for metric, value in report.items():
            rows.append({**cell, "p": bench.p, "method": bench.method, "replicate": r, "seed": seed,
                         "metric": metric, "value": value})
    return rows


def summarize(rows):
    """Mean of every metric per grid cell, keyed by a readable cell label."""
    groups = {}
    for row in rows:
        key = (f"d={row['d']} {row['intra']}{row['intra_k']:g}/{row['inter']}{row['inter_k']:g} "
               f"{row['noise']} n={row['n']}")
        groups.setdefault(key, {}).setdefault(row["metric"], []).append(row["value"])
    return {k: {m: float(np.mean(v)) for m, v in metrics.items()} for k, metrics in groups.items()}
