"""Distributed ADMM for l1-regularized linear inverse problems.

Three ways of splitting the sensing matrix across simulated nodes (rows,
columns, or a grid of both), a single-node reference solver, closed-form
communication accounting, and synthetic problem generation.
"""

from .admm import (IMAGING_PRESET, ResidualTrace, SolveReport, SolverConfig,
                   apply_scaling, lasso_admm_reference, lasso_objective,
                   soft_threshold, soft_threshold_vec)
from .cmat import read_cmat, read_cvec, write_cmat, write_cvec
from .comm import (CommLedger, Method, efficiency_report, per_node_elements,
                   reduction_vs_consensus)
from .errors import (DimensionError, FormatError, MetricsError,
                     NumericalError, ParameterError, PartitionError,
                     SingularityError, SplitADMMError)
from .linalg import (GramSolver, adjoint_matvec, gram_solve, make_gram_solver,
                     matvec)
from .partition import (PartitionSpec, col_block, grid_block, make_partition,
                        row_block)
from .problems import SensingProblem, gen_problem, recovery_metrics
from .solvers import consensus_solve, hybrid_solve, sectioning_solve, solve

__version__ = '0.1.0'
