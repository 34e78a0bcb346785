"""Command-line front end: simulate, fit, eval, bench, order.

Machine-readable JSON goes to stdout, logs to stderr. Exit codes: 0 success,
2 invalid input, 3 fit did not converge (output still written), 4 the
thresholded W contains a cycle.
"""

import argparse
import csv
import json
import logging
import sys
import warnings

from .benchmark import BenchSpec, SimulationSpec, generate_instance, run_bench, summarize
from .exceptions import ConstraintViolationError, InvalidInputError, InvalidSpecError, SolverFailureError
from .metrics import evaluate
from .order_selection import sweep_order
from .sem import TimeSeriesDataset, build_lagged_design
from .solver import PRESETS, SolverConfig, dumps_model, fit, model_from_dict, model_to_dict, result_to_dict
from .twostage import fit_two_stage

logger = logging.getLogger("dynotears")

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_CYCLE = 0, 2, 3, 4


def _emit(doc):
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _config_from_args(args):
    overrides = {}
    for flag, name in (("lambda_w", "lambda_w"), ("lambda_a", "lambda_a"), ("tau_w", "tau_w"), ("tau_a", "tau_a")):
        value = getattr(args, flag)
        if value is not None:
            overrides[name] = value
    return SolverConfig.from_preset(args.preset, **overrides)


def cmd_simulate(args):
    doc = _read_json(args.spec)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.ensure_stationary:
        doc["stationarity"] = "rescale"
    spec = SimulationSpec.from_dict(doc)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = generate_instance(spec)
    for w in caught:
        logger.warning("%s", w.message)
    inst.data.to_csv(args.data)
    truth = model_to_dict(inst.W, inst.A, inst.data.variable_names,
                          diagnostics={"spectral_radius": inst.spectral_radius, "spec": spec.to_dict()})
    _write(args.truth, dumps_model(truth))
    _emit({"data": args.data, "truth": args.truth, "n": spec.n, "M": spec.M, "T": spec.T,
           "spectral_radius": inst.spectral_radius, "stable": inst.spectral_radius < 1,
           "redraws": inst.redraws})
    return EXIT_OK


def cmd_fit(args):
    data = TimeSeriesDataset.from_csv(args.data)
    config = _config_from_args(args)
    design = build_lagged_design(data, args.p)
    estimator = fit if args.method == "one_stage" else fit_two_stage
    result = estimator(design.X, design.Y, config)
    doc = result_to_dict(result, data.variable_names, config)
    _write(args.output, dumps_model(doc))
    _emit(doc["diagnostics"])
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_eval(args):
    W_est, A_est, _ = model_from_dict(_read_json(args.model))
    W_true, A_true, _ = model_from_dict(_read_json(args.truth))
    if W_est.shape != W_true.shape or A_est.shape != A_true.shape:
        raise InvalidInputError(f"model (d, p) does not match truth: {A_est.shape} vs {A_true.shape}")
    report = evaluate(W_true, A_true, W_est, A_est)
    if args.csv:
        _write(args.csv, report.csv_header() + "\n" + report.to_csv_row() + "\n")
    _emit(report.to_dict())
    return EXIT_OK


BENCH_COLUMNS = ["d", "intra", "intra_k", "inter", "inter_k", "noise", "n", "p", "method",
                 "replicate", "seed", "metric", "value"]


def cmd_bench(args):
    bench = BenchSpec.from_dict(_read_json(args.spec))
    rows = run_bench(bench, threads=args.threads)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "value": repr(float(row["value"]))})
    _emit(summarize(rows))
    return EXIT_OK


def cmd_order(args):
    data = TimeSeriesDataset.from_csv(args.data)
    config = _config_from_args(args)
    result = sweep_order(data, args.p_max, config, plateau_tol=args.plateau_tol)
    _write(args.output, result.to_csv())
    _emit({"recommended": result.recommended, "plateau_p": result.plateau_p,
           "magnitude_p": result.magnitude_p, "note": result.note})
    return EXIT_OK


def _add_solver_flags(parser):
    parser.add_argument("--preset", choices=sorted(PRESETS), default="n500",
                        help="hyperparameter preset for the n=500 or n=50 regime")
    parser.add_argument("--lambda-w", type=float, dest="lambda_w")
    parser.add_argument("--lambda-a", type=float, dest="lambda_a")
    parser.add_argument("--tau-w", type=float, dest="tau_w")
    parser.add_argument("--tau-a", type=float, dest="tau_a")


def build_parser():
    parser = argparse.ArgumentParser(prog="dynotears", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw ground truth graphs and a dataset")
    p.add_argument("spec", help="simulation spec JSON")
    p.add_argument("--data", required=True, help="output dataset CSV")
    p.add_argument("--truth", required=True, help="output ground-truth model JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--ensure-stationary", action="store_true",
                   help="rescale A when the process is unstable")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="estimate W and A from a dataset CSV")
    p.add_argument("data")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--method", choices=["one_stage", "two_stage"], default="one_stage")
    p.add_argument("--output", "-o", required=True, help="output model JSON")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="compare a model JSON with ground truth")
    p.add_argument("model")
    p.add_argument("truth")
    p.add_argument("--csv", help="also write the report as a CSV row")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a replicated benchmark grid")
    p.add_argument("spec", help="benchmark spec JSON")
    p.add_argument("--output", "-o", required=True, help="long-format results CSV")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default from DYNOTEARS_THREADS, else 1)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("order", help="sweep the autoregressive order")
    p.add_argument("data")
    p.add_argument("--p-max", type=int, required=True, dest="p_max")
    p.add_argument("--plateau-tol", type=float, default=0.01, dest="plateau_tol")
    p.add_argument("--output", "-o", required=True, help="sweep table CSV")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_order)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConstraintViolationError as exc:
        logger.error("%s", exc)
        return EXIT_CYCLE
    except (InvalidInputError, InvalidSpecError, SolverFailureError, OSError,
            json.JSONDecodeError, KeyError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
