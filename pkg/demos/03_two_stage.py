"""
One stage or two stages
=======================

The two-stage estimator fits the reduced-form VAR by least squares, learns W
from its residuals, and maps the VAR coefficients back to A = B (I - W).
With plenty of samples both estimators find the same W. The least-squares
A is not sparse, so its thresholding matters more.
"""

import numpy as np

from dynotears.benchmark import SimulationSpec, generate_instance
from dynotears.graphgen import GraphSpec
from dynotears.metrics import combined_shd, evaluate
from dynotears.sem import build_lagged_design
from dynotears.solver import SolverConfig, fit
from dynotears.twostage import fit_two_stage

spec = SimulationSpec(GraphSpec("ER", d=5, k=2, p=1), GraphSpec("ER", d=5, k=1, p=1), n=500, seed=1)
inst = generate_instance(spec)
design = build_lagged_design(inst.data, 1)

one = fit(design.X, design.Y, SolverConfig.from_preset("n500"))
for tau_a in (0.1, 0.2):
    two = fit_two_stage(design.X, design.Y, SolverConfig.from_preset("n500", tau_a=tau_a))
    rep = evaluate(inst.W, inst.A, two.W, two.A)
    print("tau_a=%.1f  SHD(one, two) = %d   two-stage inter F1 = %.2f"
          % (tau_a, combined_shd(one.W, one.A, two.W, two.A), rep.inter_f1))

print("W identical:", np.array_equal(one.W != 0, two.W != 0))

# with fewer samples than lagged regressors the reduced form is exact and
# the residuals vanish, which the result flags
rng = np.random.default_rng(0)
X, Y = rng.standard_normal((20, 25)), rng.standard_normal((20, 25))
print(fit_two_stage(X, Y, SolverConfig.from_preset("n50")).warnings)
