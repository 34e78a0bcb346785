"""
Simulate a dynamic Bayesian network and learn it back
=====================================================

Draw an intra-slice DAG W and lag weights A, simulate a stationary series,
then estimate (W, A) with the one-stage solver and score the result.
"""

import numpy as np

from dynotears.benchmark import SimulationSpec, generate_instance
from dynotears.graphgen import GraphSpec
from dynotears.metrics import evaluate
from dynotears.sem import build_lagged_design
from dynotears.solver import SolverConfig, fit

# ER graphs: mean degree 2 within a slice, mean in-degree 1 from the previous slice
spec = SimulationSpec(
    intra=GraphSpec("ER", d=8, k=2, p=1),
    inter=GraphSpec("ER", d=8, k=1, p=1),
    n=500,
    seed=3,
)
inst = generate_instance(spec)
print("companion spectral radius: %.3f (below 1 means stationary)" % inst.spectral_radius)

# rows of X are x_t, rows of Y are x_{t-1}
design = build_lagged_design(inst.data, p=1)
print("design: X %s, Y %s" % (design.X.shape, design.Y.shape))

config = SolverConfig.from_preset("n500")
res = fit(design.X, design.Y, config)
print("converged: %s after %d outer iterations, h = %.2e" % (res.converged, res.outer_iters, res.h_final))

report = evaluate(inst.W, inst.A, res.W, res.A)
for key, value in report.to_dict().items():
    print("  %-10s %.3f" % (key, value))

# side by side: true and estimated intra-slice weights
np.set_printoptions(precision=2, suppress=True)
print("true W:\n", inst.W)
print("estimated W:\n", res.W)
