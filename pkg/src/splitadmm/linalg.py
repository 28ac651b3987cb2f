"""Dense complex products and the regularized Gram solves used by every
ADMM u-update.

All ADMM variants in this package need repeated solutions of

    (H* H + rho I) x = b

for a fixed block ``H`` and penalty ``rho``. :class:`GramSolver` factors the
smaller of the two equivalent Hermitian positive-definite systems once and
reuses the factor for every iteration. When ``H`` is wide (``rows < cols``)
the matrix inversion lemma is used::

    (H* H + rho I)^-1 = I / rho - H* (I + H H* / rho)^-1 H / rho**2

so only a ``rows x rows`` matrix is factored.
"""

import numpy as np
from scipy import linalg as sla

from .errors import (DimensionError, NumericalError, ParameterError,
                     SingularityError)

__all__ = ['matvec', 'adjoint_matvec', 'GramSolver', 'make_gram_solver',
           'gram_solve', 'WOODBURY', 'DIRECT']

WOODBURY = 'woodbury'
DIRECT = 'direct'


def as_cmatrix(A):
    A = np.asarray(A)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={A.ndim}")
    return A.astype(np.complex128, copy=False)


def as_cvector(x):
    x = np.asarray(x)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got ndim={x.ndim}")
    return x.astype(np.complex128, copy=False)


def matvec(A, x):
    """Return ``A @ x`` for a complex matrix and vector.

    Raises
    ------
    DimensionError
        If ``A.shape[1] != len(x)``.
    """
    A = as_cmatrix(A)
    x = as_cvector(x)
    if A.shape[1] != x.shape[0]:
        raise DimensionError(
            f"matvec: matrix has {A.shape[1]} columns, vector has "
            f"{x.shape[0]} entries")
    return A @ x


def adjoint_matvec(A, y):
    """Return ``A^H @ y`` without materializing the conjugate transpose."""
    A = as_cmatrix(A)
    y = as_cvector(y)
    if A.shape[0] != y.shape[0]:
        raise DimensionError(
            f"adjoint_matvec: matrix has {A.shape[0]} rows, vector has "
            f"{y.shape[0]} entries")
    # (y^H A)^H == A^H y; avoids a conj copy of A on every call
    return (y.conj() @ A).conj()


class GramSolver:
    """Cached solver for ``(H* H + rho I) x = b``.

    Parameters
    ----------
    block : (m, n) complex array
        The matrix ``H``. It is kept by reference and must not be mutated.
    rho : float
        Positive penalty parameter.

    Attributes
    ----------
    strategy : str
        ``'woodbury'`` when ``m < n`` (an ``m x m`` matrix is factored),
        otherwise ``'direct'`` (an ``n x n`` matrix is factored).
    inner_shape : tuple of int
        Shape of the factored matrix.
    """

    def __init__(self, block, rho):
        block = as_cmatrix(block)
        rho = float(rho)
        if not rho > 0 or not np.isfinite(rho):
            raise ParameterError(f"rho must be positive and finite, got {rho}")
        if block.size == 0:
            raise DimensionError("GramSolver needs a nonempty block")
        if not np.all(np.isfinite(block)):
            raise NumericalError("block contains non-finite entries")
        m, n = block.shape
        self.block = block
        self.rho = rho
        if m < n:
            self.strategy = WOODBURY
            inner = (block @ block.conj().T) / rho
            inner[np.diag_indices(m)] += 1.0
        else:
            self.strategy = DIRECT
            inner = block.conj().T @ block
            inner[np.diag_indices(n)] += rho
        self.inner_shape = inner.shape
        try:
            self._factor = sla.cho_factor(inner, lower=True,
                                          check_finite=False)
        except sla.LinAlgError as exc:
            raise SingularityError(
                f"Cholesky factorization of the {self.strategy} inner matrix "
                f"failed: {exc}") from exc
        if not np.all(np.isfinite(self._factor[0])):
            raise SingularityError("Cholesky factor contains non-finite entries")

    @property
    def shape(self):
        return self.block.shape

    def solve(self, rhs):
        """Return ``x`` with ``(H* H + rho I) x = rhs``."""
        rhs = as_cvector(rhs)
        n = self.block.shape[1]
        if rhs.shape[0] != n:
            raise DimensionError(
                f"gram_solve: rhs has {rhs.shape[0]} entries, block has "
                f"{n} columns")
        if self.strategy == DIRECT:
            return sla.cho_solve(self._factor, rhs, check_finite=False)
        t = self.block @ rhs
        y = sla.cho_solve(self._factor, t, check_finite=False)
        return rhs / self.rho - adjoint_matvec(self.block, y) / self.rho**2

    def __repr__(self):
        m, n = self.block.shape
        return (f"GramSolver({m}x{n}, rho={self.rho:g}, "
                f"strategy={self.strategy!r})")


def make_gram_solver(block, rho):
    """Factor the regularized Gram system of `block` once; see :class:`GramSolver`."""
    return GramSolver(block, rho)


def gram_solve(solver, rhs):
    return solver.solve(rhs)
