"""Distributed lasso solvers for row, column and grid divisions of ``H``.

Each solver builds a set of simulated nodes that own only their block of the
problem and talk through a metered :class:`~splitadmm.runtime.Network`:

consensus (``M`` row blocks)
    Worker ``i`` keeps a full-length replica ``u^i``. A central node averages
    the replicas, soft-thresholds with ``lam / (M rho)`` and broadcasts ``v``.
sectioning (``N`` column blocks)
    Worker ``j`` owns segment ``u_j`` and its own ``v_j, s_j``. Workers
    exchange only estimated data ``ghat_j = H_j u_j``; each worker fits
    ``g - sum_{q != j} ghat_q`` using the estimates of the previous iteration.
hybrid (``M x N`` grid)
    Worker ``(i, j)`` holds replica ``i`` of segment ``j``; segment node ``j``
    forms the consensus ``v_j``; workers of the same replica exchange
    estimated data.

Every iteration is synchronous: all worker updates of iteration ``k`` finish
before any consensus update of iteration ``k``. Reductions always run in
ascending node order, so the output is bit-identical for any thread count.

Residual norms and the objective are computed by an out-of-band monitor that
can see every node; this instrumentation is not charged to the ledger.
"""

import math
import warnings

import numpy as np

from .admm import (IterateRecord, ResidualTrace, apply_scaling, check_finite,
                   lasso_admm_reference, lasso_objective, make_report,
                   replica_mean, soft_threshold_vec, sq_norm)
from .comm import CENTRAL, WORKER, CommLedger, Method, per_node_elements
from .errors import DimensionError, ParameterError
from .linalg import adjoint_matvec, make_gram_solver
from .partition import make_partition
from .problems import SensingProblem
from .runtime import Network, Scheduler

__all__ = ['consensus_solve', 'sectioning_solve', 'hybrid_solve', 'solve']


def _local_data(g, peer_ghats):
    """``g`` minus the estimated data of the peers, summed in order."""
    if not peer_ghats:
        return g.copy()
    acc = peer_ghats[0].copy()
    for x in peer_ghats[1:]:
        acc += x
    return g - acc


def _setup(problem, cfg, method, m, n, ragged):
    if not isinstance(problem, SensingProblem):
        raise DimensionError("problem must be a SensingProblem")
    spec = make_partition(problem.n_m, problem.n_p, m, n, ragged)
    expected = None
    if spec.uniform:
        expected = per_node_elements(method, problem.n_p, problem.n_m, m, n)
    else:
        warnings.warn(
            f"{method.value}: ragged {m}x{n} division of "
            f"{problem.n_m}x{problem.n_p}; closed-form communication counts "
            f"assume equal blocks and are not checked", stacklevel=3)
    problem = apply_scaling(problem, cfg.scl)
    ledger = CommLedger(method.value, expected)
    return problem, spec, Network(ledger)


def _drive(problem, cfg, method, m, n, net, iterate, snapshot,
           record_iterates):
    """Run the synchronous iteration loop and collect the trace."""
    trace = ResidualTrace()
    iterates = [] if record_iterates else None
    H, g = problem.H, problem.g
    # divergence is reported through check_finite, not numpy warnings
    with Scheduler(cfg.threads) as sched, np.errstate(all='ignore'):
        for k in range(1, cfg.max_iters + 1):
            net.iteration = k
            iterate(sched)
            us, v, primal_sq, dual_sq = snapshot()
            objective = lasso_objective(H, g, v, cfg.lam)
            check_finite(list(us.values())
                         + [v, np.array([primal_sq, dual_sq, objective])], k)
            trace.append(primal_sq, dual_sq, objective)
            if iterates is not None:
                iterates.append(IterateRecord(
                    {name: u.copy() for name, u in us.items()}, v.copy()))
            if cfg.should_stop(math.sqrt(primal_sq), math.sqrt(dual_sq)):
                break
    return make_report(method.value, m, n, problem, cfg, v, trace,
                       net.ledger, iterates)


class _Central:
    """Consensus node: averages replicas and soft-thresholds."""

    def __init__(self, name, workers, size, kappa):
        self.name = name
        self.workers = workers
        self.kappa = kappa
        self.v = np.zeros(size, dtype=np.complex128)
        self.v_prev = self.v
        self.sbar = np.zeros(size, dtype=np.complex128)

    def publish(self, net):
        net.broadcast(self.name, self.workers, 'v', self.v)

    def update(self, net):
        us = [u for _, u in net.receive(self.name, 'u')]
        ubar = replica_mean(us)
        v_new = soft_threshold_vec(ubar + self.sbar, self.kappa)
        # mean of the worker duals, tracked without communication
        self.sbar = self.sbar + ubar - v_new
        self.v_prev, self.v = self.v, v_new


class _ReplicaWorker:
    """Worker holding one replica of (a segment of) ``u``.

    Used by both consensus (no peers) and hybrid (peers in the same replica).
    """

    def __init__(self, name, block, g, rho, central, peers=()):
        self.name = name
        self.block = block
        self.g = g
        self.rho = rho
        self.central = central
        self.peers = list(peers)
        self.solver = make_gram_solver(block, rho)
        self.u = np.zeros(block.shape[1], dtype=np.complex128)
        self.s = np.zeros_like(self.u)
        self.started = False
        self.peer_ghats = {p: np.zeros(block.shape[0], dtype=np.complex128)
                           for p in self.peers}

    def step(self, net):
        v = net.receive_one(self.name, 'v', self.central)
        if self.started:
            self.s = self.s + self.u - v
        self.started = True
        local = _local_data(self.g, [self.peer_ghats[p] for p in self.peers])
        rhs = adjoint_matvec(self.block, local) + self.rho * (v - self.s)
        self.u = self.solver.solve(rhs)
        net.send(self.name, self.central, 'u', self.u)
        net.broadcast(self.name, self.peers, 'ghat', self.block @ self.u)

    def collect(self, net):
        for src, ghat in net.receive(self.name, 'ghat'):
            self.peer_ghats[src] = ghat


class _RowWorker(_ReplicaWorker):
    """Consensus worker; its local data never changes, so ``H_i* g_i`` is cached."""

    def __init__(self, name, block, g, rho, central):
        super().__init__(name, block, g, rho, central)
        self.hg = adjoint_matvec(block, g)

    def step(self, net):
        v = net.receive_one(self.name, 'v', self.central)
        if self.started:
            self.s = self.s + self.u - v
        self.started = True
        self.u = self.solver.solve(self.hg + self.rho * (v - self.s))
        net.send(self.name, self.central, 'u', self.u)


class _SectionWorker:
    """Column-division worker owning ``u_j, v_j, s_j``."""

    def __init__(self, name, block, g, rho, kappa, peers):
        self.name = name
        self.block = block
        self.g = g
        self.rho = rho
        self.kappa = kappa
        self.peers = list(peers)
        self.solver = make_gram_solver(block, rho)
        size = block.shape[1]
        self.u = np.zeros(size, dtype=np.complex128)
        self.v = np.zeros_like(self.u)
        self.v_prev = self.v
        self.s = np.zeros_like(self.u)
        self.peer_ghats = {p: np.zeros(block.shape[0], dtype=np.complex128)
                           for p in self.peers}

    def step(self, net):
        local = _local_data(self.g, [self.peer_ghats[p] for p in self.peers])
        rhs = adjoint_matvec(self.block, local) + self.rho * (self.v - self.s)
        self.u = self.solver.solve(rhs)
        v_new = soft_threshold_vec(self.u + self.s, self.kappa)
        self.s = self.s + self.u - v_new
        self.v_prev, self.v = self.v, v_new
        net.broadcast(self.name, self.peers, 'ghat', self.block @ self.u)

    def collect(self, net):
        for src, ghat in net.receive(self.name, 'ghat'):
            self.peer_ghats[src] = ghat


def consensus_solve(problem, cfg, m, *, ragged=False, record_iterates=False):
    """Row-division (consensus) ADMM with `m` worker nodes.

    Parameters
    ----------
    problem : SensingProblem
    cfg : SolverConfig
    m : int
        Number of row blocks; must divide ``N_m`` unless `ragged`.
    ragged : bool, optional
        Allow unequal row blocks (leading blocks get one extra row).
    record_iterates : bool, optional
        Store every worker's ``u^i`` and the consensus ``v`` per iteration.

    Returns
    -------
    SolveReport
    """
    method = Method.CONSENSUS
    problem, spec, net = _setup(problem, cfg, method, m, 1, ragged)
    rho = cfg.rho
    names = [f"row{i}" for i in range(m)]
    for name in names:
        net.add_node(name, WORKER)
    net.add_node('central', CENTRAL)
    workers = []
    for i, name in enumerate(names):
        rs = spec.row_slice(i)
        workers.append(_RowWorker(name, problem.H[rs].copy(),
                                  problem.g[rs].copy(), rho, 'central'))
    central = _Central('central', names, problem.n_p, cfg.lam / (m * rho))

    def iterate(sched):
        central.publish(net)
        sched.run_phase(lambda w: w.step(net), workers)
        central.update(net)

    def snapshot():
        v = central.v
        us = {w.name: w.u for w in workers}
        primal_sq = sum(sq_norm(w.u - v) for w in workers)
        dual_sq = (rho * rho * m) * sq_norm(v - central.v_prev)
        return us, v, primal_sq, dual_sq

    return _drive(problem, cfg, method, m, 1, net, iterate, snapshot,
                  record_iterates)


def sectioning_solve(problem, cfg, n, *, ragged=False, record_iterates=False):
    """Column-division (sectioning) ADMM with `n` worker nodes.

    Each worker owns a contiguous segment of the unknown; the solution is the
    concatenation of the segments' ``v_j``. Only estimated data vectors of
    length ``N_m`` travel between workers.
    """
    method = Method.SECTIONING
    problem, spec, net = _setup(problem, cfg, method, 1, n, ragged)
    rho = cfg.rho
    names = [f"col{j}" for j in range(n)]
    for name in names:
        net.add_node(name, WORKER)
    workers = []
    for j, name in enumerate(names):
        block = problem.H[:, spec.col_slice(j)].copy()
        peers = [p for p in names if p != name]
        workers.append(_SectionWorker(name, block, problem.g.copy(), rho,
                                      cfg.lam / rho, peers))

    def iterate(sched):
        sched.run_phase(lambda w: w.step(net), workers)
        sched.run_phase(lambda w: w.collect(net), workers)

    def snapshot():
        v = np.concatenate([w.v for w in workers])
        us = {w.name: w.u for w in workers}
        primal_sq = sum(sq_norm(w.u - w.v) for w in workers)
        dual_sq = (rho * rho * 1) * sum(sq_norm(w.v - w.v_prev)
                                        for w in workers)
        return us, v, primal_sq, dual_sq

    return _drive(problem, cfg, method, 1, n, net, iterate, snapshot,
                  record_iterates)


def hybrid_solve(problem, cfg, m, n, *, ragged=False, record_iterates=False):
    """Grid-division (consensus and sectioning) ADMM on ``m * n`` workers.

    Worker ``grid{i},{j}`` solves for replica `i` of segment `j`; node
    ``seg{j}`` holds the consensus ``v_j`` of segment `j`.
    """
    method = Method.HYBRID
    problem, spec, net = _setup(problem, cfg, method, m, n, ragged)
    rho = cfg.rho
    grid = [[f"grid{i},{j}" for j in range(n)] for i in range(m)]
    seg = [f"seg{j}" for j in range(n)]
    for row in grid:
        for name in row:
            net.add_node(name, WORKER)
    for name in seg:
        net.add_node(name, CENTRAL)
    workers = []
    for i in range(m):
        rs = spec.row_slice(i)
        g_i = problem.g[rs]
        for j in range(n):
            block = problem.H[rs, spec.col_slice(j)].copy()
            peers = [p for p in grid[i] if p != grid[i][j]]
            workers.append(_ReplicaWorker(grid[i][j], block, g_i.copy(), rho,
                                          seg[j], peers))
    kappa = cfg.lam / (m * rho)
    centrals = [_Central(seg[j], [grid[i][j] for i in range(m)],
                         spec.col_bounds[j + 1] - spec.col_bounds[j],
                         kappa)
                for j in range(n)]

    def iterate(sched):
        sched.run_phase(lambda c: c.publish(net), centrals)
        sched.run_phase(lambda w: w.step(net), workers)
        sched.run_phase(lambda c: c.update(net), centrals)
        sched.run_phase(lambda w: w.collect(net), workers)

    def snapshot():
        v = np.concatenate([c.v for c in centrals])
        us = {w.name: w.u for w in workers}
        primal_sq = sum(sq_norm(w.u - centrals[k % n].v)
                        for k, w in enumerate(workers))
        dual_sq = (rho * rho * m) * sum(sq_norm(c.v - c.v_prev)
                                        for c in centrals)
        return us, v, primal_sq, dual_sq

    return _drive(problem, cfg, method, m, n, net, iterate, snapshot,
                  record_iterates)


def solve(problem, cfg, method, m=1, n=1, **kwargs):
    """Dispatch to the solver named by `method`.

    `method` is one of ``'reference'``, ``'consensus'``, ``'sectioning'``,
    ``'hybrid'``. Irrelevant division counts must be 1.
    """
    if method == 'reference':
        if (m, n) != (1, 1):
            raise ParameterError(
                "reference solver takes no division counts")
        kwargs.pop('ragged', None)
        return lasso_admm_reference(problem, cfg, **kwargs)
    method = Method(method)
    if method is Method.CONSENSUS:
        if n != 1:
            raise ParameterError("consensus divides rows only; n must be 1")
        return consensus_solve(problem, cfg, m, **kwargs)
    if method is Method.SECTIONING:
        if m != 1:
            raise ParameterError(
                "sectioning divides columns only; m must be 1")
        return sectioning_solve(problem, cfg, n, **kwargs)
    return hybrid_solve(problem, cfg, m, n, **kwargs)
