"""Shared ADMM machinery and the single-node lasso reference solver.

The problem solved throughout the package is the lasso::

    minimize  1/2 |H u - g|^2 + lam |v|_1   subject to  u - v = 0

with the scaled-dual iteration (``s`` is the dual divided by ``rho``)::

    u <- (H* H + rho I)^-1 (H* g + rho (v - s))
    v <- S_{lam/rho}(u + s)
    s <- s + u - v

started from ``u = v = s = 0``. ``S_k`` is complex soft thresholding,
``S_k(a) = a (1 - k/|a|)`` when ``|a| > k`` and 0 otherwise.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .comm import CommLedger
from .errors import DimensionError, NumericalError, ParameterError
from .linalg import adjoint_matvec, make_gram_solver
from .problems import SensingProblem, recovery_metrics

__all__ = ['SolverConfig', 'ResidualTrace', 'SolveReport', 'IterateRecord',
           'soft_threshold', 'soft_threshold_vec', 'lasso_objective',
           'apply_scaling', 'lasso_admm_reference', 'IMAGING_PRESET']


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by every solver.

    Attributes
    ----------
    rho : float
        Augmented Lagrangian penalty.
    lam : float
        Weight of the l1 term.
    scl : float
        Joint scale applied to ``H`` and ``g`` before solving (see
        :func:`apply_scaling`).
    max_iters : int
    eps_pri, eps_dual : float
        Absolute stopping thresholds on the primal and dual residual norms.
        0 disables a threshold; the solve stops early only when every enabled
        threshold is met.
    seed : int
        Recorded for provenance; the solvers themselves are deterministic.
    threads : int
        Worker threads for the simulated nodes. Results do not depend on it.
    """

    rho: float = 1e5
    lam: float = 1e-2
    scl: float = 1.0
    max_iters: int = 50
    eps_pri: float = 0.0
    eps_dual: float = 0.0
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ('rho', 'lam', 'scl'):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive, got {value}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ParameterError(
                f"max_iters must be a positive integer, got {self.max_iters}")
        if self.eps_pri < 0 or self.eps_dual < 0:
            raise ParameterError("stopping thresholds must be non-negative")
        if self.threads < 1:
            raise ParameterError(f"threads must be >= 1, got {self.threads}")

    def should_stop(self, primal, dual):
        if self.eps_pri == 0 and self.eps_dual == 0:
            return False
        return ((self.eps_pri == 0 or primal <= self.eps_pri)
                and (self.eps_dual == 0 or dual <= self.eps_dual))


# Parameter values used for the full-size imaging example.
IMAGING_PRESET = dict(rho=1e5, lam=1e-2, scl=1e-4, max_iters=50)


@dataclass
class ResidualTrace:
    """Squared residual norms and objective value after each iteration."""

    primal_sq: list = field(default_factory=list)
    dual_sq: list = field(default_factory=list)
    objective: list = field(default_factory=list)

    def append(self, primal_sq, dual_sq, objective):
        self.primal_sq.append(float(primal_sq))
        self.dual_sq.append(float(dual_sq))
        self.objective.append(float(objective))

    def __len__(self):
        return len(self.primal_sq)

    @property
    def primal(self):
        return [math.sqrt(x) for x in self.primal_sq]

    @property
    def dual(self):
        return [math.sqrt(x) for x in self.dual_sq]


@dataclass
class IterateRecord:
    """Snapshot of one iteration.

    ``u`` maps a worker name to its local primal iterate; ``v`` is the full
    assembled consensus vector.
    """

    u: dict
    v: np.ndarray


@dataclass
class SolveReport:
    method: str
    m: int
    n: int
    solution: np.ndarray
    trace: ResidualTrace
    ledger: CommLedger
    iterations_run: int
    objective: float
    metrics: Optional[object] = None
    iterates: Optional[list] = None
    config: Optional[SolverConfig] = None


def soft_threshold(a, kappa):
    """Complex soft thresholding of a scalar.

    >>> soft_threshold(5.0, 2.0)
    3.0
    """
    if kappa < 0:
        raise ParameterError(f"kappa must be non-negative, got {kappa}")
    mag = abs(a)
    if mag <= kappa:
        return 0j if isinstance(a, complex) else 0.0
    return (a / mag) * (mag - kappa)


def soft_threshold_vec(a, kappa):
    """Element-wise :func:`soft_threshold` of a complex vector."""
    if kappa < 0:
        raise ParameterError(f"kappa must be non-negative, got {kappa}")
    a = np.asarray(a, dtype=np.complex128)
    mag = np.abs(a)
    keep = mag > kappa
    out = np.zeros_like(a)
    # phase * (|a| - kappa) is exact for real inputs
    out[keep] = (a[keep] / mag[keep]) * (mag[keep] - kappa)
    return out


def sq_norm(x):
    return float(np.vdot(x, x).real)


def lasso_objective(H, g, v, lam):
    r = H @ v - g
    return 0.5 * sq_norm(r) + lam * float(np.abs(v).sum())


def apply_scaling(problem, scl):
    """Scale ``H`` and ``g`` jointly by `scl`.

    The noiseless solution set of ``H u = g`` is unchanged. In the lasso,
    solving the scaled problem with weight ``lam`` is the same as solving the
    unscaled one with weight ``lam / scl**2``.
    """
    if not scl > 0:
        raise ParameterError(f"scl must be positive, got {scl}")
    if scl == 1:
        return problem
    return SensingProblem(problem.H * scl, problem.g * scl, problem.truth,
                          problem.noise_sigma * scl, problem.kind)


def replica_mean(vectors):
    """Mean of a sequence of vectors, summed in the given order."""
    acc = vectors[0].copy()
    for x in vectors[1:]:
        acc += x
    return acc / len(vectors)


def check_finite(arrays, iteration):
    for x in arrays:
        if not np.all(np.isfinite(x)):
            raise NumericalError(
                f"non-finite iterate at iteration {iteration}",
                iteration=iteration - 1)


def make_report(method, m, n, problem, cfg, solution, trace, ledger,
                iterates):
    metrics = None
    if problem.truth is not None and np.any(problem.truth):
        metrics = recovery_metrics(solution, problem.truth)
    return SolveReport(method, m, n, solution, trace, ledger, len(trace),
                       trace.objective[-1], metrics, iterates, cfg)


def lasso_admm_reference(problem, cfg, record_iterates=False):
    """Solve the lasso on a single node; baseline for the distributed solvers.

    Parameters
    ----------
    problem : SensingProblem
    cfg : SolverConfig
    record_iterates : bool, optional
        Keep ``u`` and ``v`` after every iteration in ``report.iterates``.

    Returns
    -------
    SolveReport
        ``solution`` is the final ``v``. The primal residual is
        ``|u - v|`` and the dual residual ``rho |v_k - v_{k-1}|``.
    """
    if not isinstance(problem, SensingProblem):
        raise DimensionError("problem must be a SensingProblem")
    problem = apply_scaling(problem, cfg.scl)
    H, g = problem.H, problem.g
    rho = cfg.rho
    solver = make_gram_solver(H, rho)
    hg = adjoint_matvec(H, g)
    n_p = H.shape[1]
    u = np.zeros(n_p, dtype=np.complex128)
    v = np.zeros_like(u)
    s = np.zeros_like(u)
    kappa = cfg.lam / rho
    trace = ResidualTrace()
    iterates = [] if record_iterates else None
    with np.errstate(all='ignore'):
        for k in range(1, cfg.max_iters + 1):
            u = solver.solve(hg + rho * (v - s))
            v_new = soft_threshold_vec(u + s, kappa)
            s = s + u - v_new
            primal_sq = sq_norm(u - v_new)
            dual_sq = (rho * rho * 1) * sq_norm(v_new - v)
            v = v_new
            objective = lasso_objective(H, g, v, cfg.lam)
            check_finite((u, v, np.array([primal_sq, dual_sq, objective])), k)
            trace.append(primal_sq, dual_sq, objective)
            if iterates is not None:
                iterates.append(IterateRecord({'node': u.copy()}, v.copy()))
            if cfg.should_stop(math.sqrt(primal_sq), math.sqrt(dual_sq)):
                break
    ledger = CommLedger()
    return make_report('reference', 1, 1, problem, cfg, v, trace, ledger,
                       iterates)
