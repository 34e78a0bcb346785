"""
Choosing the autoregressive order
=================================

Fit p = 0..p_max on the same rows. The objective drops until p reaches the
true order and then flattens; the largest weight in the last lag block
becomes negligible at the same point.
"""

from dynotears.benchmark import SimulationSpec, generate_instance
from dynotears.graphgen import GraphSpec
from dynotears.order_selection import sweep_order
from dynotears.solver import SolverConfig

# five lags, no decay across lags so the fifth one is still visible
spec = SimulationSpec(GraphSpec("ER", d=5, k=2, p=5), GraphSpec("ER", d=5, k=1, p=5, eta=1.0),
                      n=500, seed=0)
data = generate_instance(spec).data

sweep = sweep_order(data, p_max=7, config=SolverConfig.from_preset("n500"))

print(" p   objective   max|A_p|")
for p, obj, amax, rec in sweep.table():
    print("%2d   %9.4f   %8.3f %s" % (p, obj, amax, "<-" if rec else ""))
print("recommended p =", sweep.recommended, sweep.note)
