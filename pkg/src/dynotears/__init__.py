"""Structure learning for dynamic Bayesian networks from time-series data.

Estimates intra-slice (contemporaneous) weights W and inter-slice (lagged)
weights A of a linear SVAR by penalised least squares under a smooth
acyclicity constraint on W.
"""

from .acyclicity import h_and_grad, is_acyclic_exact, matrix_exponential
from .benchmark import BenchSpec, SimulationSpec, generate_instance, run_bench
from .exceptions import ConstraintViolationError, InvalidInputError, InvalidSpecError, SolverFailureError
from .graphgen import GraphSpec, assign_inter_weights, assign_intra_weights, gen_inter_slice, gen_intra_dag
from .metrics import MetricReport, aupr_auroc, evaluate, f1, frobenius_diff, shd, tpr_fdr
from .order_selection import OrderSweepResult, sweep_order
from .sem import LaggedDesign, NoiseSpec, TimeSeriesDataset, build_lagged_design, companion_spectral_radius, simulate
from .solver import FitResult, SolverConfig, fit, fit_dataset, threshold
from .twostage import fit_reduced_var, fit_two_stage, recover_inter

__version__ = "0.1.0"
