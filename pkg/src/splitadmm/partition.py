"""Row, column and grid divisions of a sensing problem.

A :class:`PartitionSpec` holds the block boundaries; the ``*_block``
functions return materialized copies so that each simulated node owns
only its own piece of ``H`` and ``g``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PartitionError

__all__ = ['PartitionSpec', 'make_partition', 'row_block', 'col_block',
           'grid_block', 'split_bounds']


def split_bounds(total, parts, ragged=False):
    """Boundaries ``0 = b_0 < ... < b_parts = total`` of a contiguous split.

    Without `ragged`, `parts` must divide `total`. With `ragged`, the
    remainder is spread one element at a time over the leading blocks.
    """
    if not 1 <= parts <= total:
        raise PartitionError(f"cannot split {total} items into {parts} blocks")
    base, rem = divmod(total, parts)
    if rem and not ragged:
        raise PartitionError(
            f"{parts} does not divide {total}; pass ragged=True to allow "
            f"unequal blocks")
    sizes = [base + 1] * rem + [base] * (parts - rem)
    return tuple(int(b) for b in np.concatenate(([0], np.cumsum(sizes))))


@dataclass(frozen=True)
class PartitionSpec:
    """Division of an ``n_m x n_p`` matrix into ``m`` row and ``n`` column blocks."""

    n_m: int
    n_p: int
    m: int
    n: int
    row_bounds: tuple
    col_bounds: tuple
    ragged: bool = False

    @property
    def uniform(self):
        """True when every row block and every column block has equal size."""
        return self.n_m % self.m == 0 and self.n_p % self.n == 0

    def row_slice(self, i):
        _check_index(i, self.m, 'row')
        return slice(self.row_bounds[i], self.row_bounds[i + 1])

    def col_slice(self, j):
        _check_index(j, self.n, 'column')
        return slice(self.col_bounds[j], self.col_bounds[j + 1])

    def row_sizes(self):
        return np.diff(self.row_bounds).tolist()

    def col_sizes(self):
        return np.diff(self.col_bounds).tolist()


def _check_index(k, count, what):
    if not 0 <= k < count:
        raise IndexError(f"{what} block index {k} out of range [0, {count})")


def make_partition(n_m, n_p, m=1, n=1, ragged=False):
    """Build a :class:`PartitionSpec`.

    Raises
    ------
    PartitionError
        If ``m`` or ``n`` is out of range, or does not divide the matching
        dimension and `ragged` is false.
    """
    rows = split_bounds(n_m, m, ragged)
    cols = split_bounds(n_p, n, ragged)
    return PartitionSpec(n_m, n_p, m, n, rows, cols, ragged)


def _check_problem(problem, spec):
    if problem.H.shape != (spec.n_m, spec.n_p):
        raise PartitionError(
            f"partition is for {spec.n_m}x{spec.n_p}, problem is "
            f"{problem.H.shape[0]}x{problem.H.shape[1]}")


def row_block(problem, spec, i):
    """Return copies ``(H_i, g_i)`` of row block `i`."""
    _check_problem(problem, spec)
    rs = spec.row_slice(i)
    return problem.H[rs].copy(), problem.g[rs].copy()


def col_block(problem, spec, j):
    """Return a copy of column block ``H_j``."""
    _check_problem(problem, spec)
    return problem.H[:, spec.col_slice(j)].copy()


def grid_block(problem, spec, i, j):
    """Return a copy of grid block ``H_ij``."""
    _check_problem(problem, spec)
    return problem.H[spec.row_slice(i), spec.col_slice(j)].copy()
