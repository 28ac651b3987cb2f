"""Per-node communication accounting for the three matrix divisions.

Closed forms for the number of complex elements one lower-level node
exchanges (received + transmitted) in one iteration::

    consensus  (rows)          2 N_p
    sectioning (columns)       N N_m
    hybrid     (rows + cols)   N N_m / M + 2 N_p / N

A broadcast is charged once to the sender, whatever the number of
recipients (the ``'sender-once'`` convention). :class:`CommLedger` also keeps
the physical ``'per-link'`` count, where a broadcast to ``r`` peers costs
``r`` times its payload.

Efficiency verdicts are decided by comparing these integer counts. The
algebraic frontiers derived from them are provided as separate predicates;
:func:`efficiency_report` evaluates both and flags disagreements.
"""

import threading
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from fractions import Fraction

from .errors import PartitionError

__all__ = ['Method', 'CommLedger', 'SENDER_ONCE', 'PER_LINK',
           'per_node_elements', 'formula_elements', 'reduction_vs_consensus',
           'format_percent',
           'frontier_sectioning_vs_consensus', 'frontier_hybrid_vs_consensus',
           'frontier_hybrid_vs_sectioning', 'more_efficient',
           'Comparison', 'EfficiencyReport', 'efficiency_report']

SENDER_ONCE = 'sender-once'
PER_LINK = 'per-link'
CONVENTIONS = (SENDER_ONCE, PER_LINK)

WORKER = 'worker'
CENTRAL = 'central'


class Method(str, Enum):
    CONSENSUS = 'consensus'
    SECTIONING = 'sectioning'
    HYBRID = 'hybrid'


class CommLedger:
    """Per-node, per-iteration element counts recorded by the message layer.

    Nodes are registered with a role, ``'worker'`` for the lower-level nodes
    the closed forms describe and ``'central'`` for consensus nodes.
    Iterations are numbered from 1. Recording is thread-safe.
    """

    def __init__(self, method=None, expected_per_worker=None):
        self.method = method
        self.expected_per_worker = expected_per_worker
        self._roles = {}
        self._counts = {}
        self._iterations = 0
        self._lock = threading.Lock()

    def add_node(self, name, role=WORKER):
        if name in self._roles:
            raise ValueError(f"node {name!r} already registered")
        self._roles[name] = role

    def _slot(self, node, iteration):
        if node not in self._roles:
            raise KeyError(f"unknown node {node!r}")
        self._iterations = max(self._iterations, iteration)
        return self._counts.setdefault((node, iteration), [0, 0, 0])

    def record_send(self, node, iteration, elements, links=1):
        with self._lock:
            slot = self._slot(node, iteration)
            slot[1] += elements
            slot[2] += elements * links

    def record_receive(self, node, iteration, elements):
        with self._lock:
            self._slot(node, iteration)[0] += elements

    @property
    def nodes(self):
        return list(self._roles)

    @property
    def workers(self):
        return [n for n, r in self._roles.items() if r == WORKER]

    @property
    def iterations(self):
        return self._iterations

    def role(self, node):
        return self._roles[node]

    def received(self, node, iteration):
        return self._counts.get((node, iteration), (0, 0, 0))[0]

    def sent(self, node, iteration, convention=SENDER_ONCE):
        slot = self._counts.get((node, iteration), (0, 0, 0))
        if convention == SENDER_ONCE:
            return slot[1]
        if convention == PER_LINK:
            return slot[2]
        raise ValueError(f"unknown convention {convention!r}")

    def total(self, node, iteration, convention=SENDER_ONCE):
        return self.received(node, iteration) + self.sent(node, iteration,
                                                          convention)

    def rows(self, convention=SENDER_ONCE):
        """``(node, iteration, received, sent)`` tuples, iteration-major."""
        return [(node, k, self.received(node, k),
                 self.sent(node, k, convention))
                for k in range(1, self._iterations + 1)
                for node in self._roles]

    def worker_totals(self, convention=SENDER_ONCE):
        """Set of distinct per-iteration totals over all workers and iterations."""
        return {self.total(w, k, convention)
                for w in self.workers
                for k in range(1, self._iterations + 1)}

    def mismatches(self):
        """Worker/iteration pairs whose total differs from the closed form."""
        if self.expected_per_worker is None:
            return []
        return [(w, k, self.total(w, k))
                for k in range(1, self._iterations + 1)
                for w in self.workers
                if self.total(w, k) != self.expected_per_worker]


def _method(method):
    try:
        return Method(method)
    except ValueError:
        raise ValueError(f"unknown method {method!r}") from None


def _divides(d, total, what):
    if d < 1 or total % d:
        raise PartitionError(f"{what}={d} does not divide {total}")


def per_node_elements(method, n_p, n_m, m=1, n=1):
    """Elements exchanged by one lower-level node in one iteration.

    >>> per_node_elements('hybrid', 22500, 2160, 4, 3)
    12870
    """
    method = _method(method)
    if method is Method.CONSENSUS:
        return 2 * n_p
    if method is Method.SECTIONING:
        _divides(n, n_p, 'N')
        return n * n_m
    _divides(m, n_m, 'M')
    _divides(n, n_p, 'N')
    return n * (n_m // m) + 2 * (n_p // n)


def formula_elements(method, n_p, n_m, m=1, n=1):
    """Closed form evaluated exactly, without requiring even blocks.

    Returns a :class:`~fractions.Fraction`. For uneven divisions this is the
    count of an idealized node with fractional block sizes, useful for sweeps.
    """
    method = _method(method)
    if method is Method.CONSENSUS:
        return Fraction(2 * n_p)
    if method is Method.SECTIONING:
        return Fraction(n * n_m)
    return Fraction(n * n_m, m) + Fraction(2 * n_p, n)


def reduction_vs_consensus(method, n_p, n_m, m=1, n=1):
    """Percentage of per-node traffic saved relative to the row division."""
    count = per_node_elements(method, n_p, n_m, m, n)
    return 100.0 * (1.0 - count / (2 * n_p))


def format_percent(value, places=1):
    """Round half-up to `places` decimals, e.g. ``85.6%``."""
    q = Decimal(1).scaleb(-places)
    return f"{Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP)}%"


def frontier_sectioning_vs_consensus(r, n):
    """Column division beats row division iff ``1 < N < 2R``."""
    return 1 < n < 2 * r


def frontier_hybrid_vs_consensus(r, m, n):
    """Grid division beats row division iff ``N^2 / (2 M (N - 1)) < R``.

    The bound is undefined at ``N = 1``, where the grid division never wins.
    """
    if n <= 1:
        return False
    return Fraction(n * n, 2 * m * (n - 1)) < r


def frontier_hybrid_vs_sectioning(r, m, n):
    """Stated frontier ``N^2 (M - 1) / (2 M) < R`` for grid vs column division.

    Solving ``N N_m / M + 2 N_p / N < N N_m`` for ``R`` actually gives
    ``R < N^2 (M - 1) / (2 M)``, the reverse inequality, so this predicate
    and the count comparison disagree almost everywhere. It is kept verbatim
    for reference; :func:`more_efficient` is authoritative.
    """
    return Fraction(n * n * (m - 1), 2 * m) < r


def more_efficient(first, second, n_p, n_m, m=1, n=1):
    """True iff `first` exchanges strictly fewer elements per node than `second`."""
    return (per_node_elements(first, n_p, n_m, m, n)
            < per_node_elements(second, n_p, n_m, m, n))


@dataclass(frozen=True)
class Comparison:
    first: str
    second: str
    first_count: int
    second_count: int
    by_count: bool
    by_frontier: bool

    @property
    def agree(self):
        return self.by_count == self.by_frontier


@dataclass(frozen=True)
class EfficiencyReport:
    """Pairwise efficiency verdicts at one ``(N_p, N_m, M, N)`` point."""

    n_p: int
    n_m: int
    m: int
    n: int
    r: Fraction
    counts: dict
    comparisons: tuple
    uniform: bool = True

    def comparison(self, first, second):
        for c in self.comparisons:
            if (c.first, c.second) == (first, second):
                return c
        raise KeyError((first, second))


def efficiency_report(n_p, n_m, m, n):
    """Evaluate all three comparisons by count and by stated frontier.

    When `m` or `n` does not split the problem evenly, the counts come from
    :func:`formula_elements` and may be fractional; ``uniform`` is then False.
    """
    r = Fraction(n_p, n_m)
    uniform = n_m % m == 0 and n_p % n == 0
    counts = {}
    for meth in Method:
        value = formula_elements(meth, n_p, n_m, m, n)
        counts[meth.value] = (int(value) if value.denominator == 1
                              else value)
    c, s, h = (counts[k] for k in ('consensus', 'sectioning', 'hybrid'))
    comps = (
        Comparison('sectioning', 'consensus', s, c, s < c,
                   frontier_sectioning_vs_consensus(r, n)),
        Comparison('hybrid', 'consensus', h, c, h < c,
                   frontier_hybrid_vs_consensus(r, m, n)),
        Comparison('hybrid', 'sectioning', h, s, h < s,
                   frontier_hybrid_vs_sectioning(r, m, n)),
    )
    return EfficiencyReport(n_p, n_m, m, n, r, counts, comps, uniform)
