"""
A small benchmark grid
======================

BenchSpec describes a grid of graph settings; each cell is simulated and
fitted for several seeds and every metric lands in a long-format table.
The same grid runs from the shell with `dynotears bench spec.json -o rows.csv`.
"""

import json

from dynotears.benchmark import BenchSpec, run_bench, summarize

bench = BenchSpec(
    d=[5, 10],
    graphs=[{"intra": "ER", "intra_k": 2, "inter": "ER", "inter_k": 1},
            {"intra": "BA", "intra_k": 2, "inter": "SBM", "inter_k": 1}],
    noise=["gaussian"],
    n=[500],
    replicates=2,
    preset="n500",
)

rows = run_bench(bench)
print("%d rows, first one:" % len(rows))
print(rows[0])

for cell, metrics in summarize(rows).items():
    print("%-45s intra F1 %.2f  inter F1 %.2f" % (cell, metrics["intra_f1"], metrics["inter_f1"]))

# the grid file for the command-line version
print(json.dumps({"d": bench.d, "graphs": bench.graphs, "n": bench.n, "replicates": bench.replicates}))
