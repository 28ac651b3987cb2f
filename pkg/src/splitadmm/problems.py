"""Synthetic compressive-sensing instances ``g = H u + w`` and recovery metrics.

Two matrix families are available:

``'complex-gaussian'``
    i.i.d. entries ``(x + i y) / sqrt(2 N_m)`` with ``x, y ~ N(0, 1)``.
``'random-phase'``
    unit-modulus entries ``exp(i theta) / sqrt(N_m)``, ``theta ~ U[0, 2 pi)``.
    A stand-in for sensing matrices produced by pseudo-random phase-front
    hardware; no electromagnetic modelling is done.

Both scalings give columns of roughly unit norm, so penalty and
regularization values transfer across problem sizes.

All randomness comes from numpy's ``Philox`` bit generator (the Philox4x64-10
counter-based generator of Salmon et al., whose published known-answer tests
pin the raw stream), so a given seed reproduces the same bytes everywhere
numpy's distribution samplers agree.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, MetricsError, NumericalError, ParameterError

__all__ = ['SensingProblem', 'gen_problem', 'make_rng', 'RecoveryMetrics',
           'recovery_metrics', 'KINDS']

COMPLEX_GAUSSIAN = 'complex-gaussian'
RANDOM_PHASE = 'random-phase'
FROM_FILE = 'from-file'
KINDS = (COMPLEX_GAUSSIAN, RANDOM_PHASE)


@dataclass(frozen=True, eq=False)
class SensingProblem:
    """A linear inverse problem ``g = H u + w``.

    Attributes
    ----------
    H : (N_m, N_p) complex array
    g : (N_m,) complex array
    truth : (N_p,) complex array or None
        Ground-truth reflectivity, when known.
    noise_sigma : float
        Per-component standard deviation of the injected noise.
    kind : str
    """

    H: np.ndarray
    g: np.ndarray
    truth: Optional[np.ndarray] = None
    noise_sigma: float = 0.0
    kind: str = FROM_FILE

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.complex128)
        g = np.asarray(self.g, dtype=np.complex128)
        if H.ndim != 2 or g.ndim != 1:
            raise DimensionError("H must be 2-D and g 1-D")
        if g.shape[0] != H.shape[0]:
            raise DimensionError(
                f"g has {g.shape[0]} entries but H has {H.shape[0]} rows")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(g))):
            raise NumericalError("problem data contains non-finite entries")
        object.__setattr__(self, 'H', H)
        object.__setattr__(self, 'g', g)
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=np.complex128)
            if truth.shape != (H.shape[1],):
                raise DimensionError(
                    f"truth has shape {truth.shape}, expected ({H.shape[1]},)")
            object.__setattr__(self, 'truth', truth)

    @property
    def n_m(self):
        return self.H.shape[0]

    @property
    def n_p(self):
        return self.H.shape[1]


def make_rng(seed):
    """Seeded counter-based generator used for all problem randomness."""
    return np.random.Generator(np.random.Philox(int(seed)))


def gen_problem(n_m, n_p, sparsity_k, snr_db=math.inf, seed=0,
                kind=COMPLEX_GAUSSIAN):
    """Draw a random sensing problem with a `sparsity_k`-sparse ground truth.

    The truth has `sparsity_k` nonzeros at uniformly chosen positions, each of
    unit magnitude and uniformly random phase. Noise is complex Gaussian,
    rescaled so that ``10 log10(|H u|^2 / |w|^2)`` equals `snr_db` exactly
    (up to rounding). ``snr_db=inf`` gives noiseless data.
    """
    if n_m < 1 or n_p < 1:
        raise ParameterError(f"dimensions must be positive, got {n_m}x{n_p}")
    if not 1 <= sparsity_k <= n_p:
        raise ParameterError(
            f"sparsity_k must lie in [1, {n_p}], got {sparsity_k}")
    if kind not in KINDS:
        raise ParameterError(f"unknown matrix kind {kind!r}; use one of {KINDS}")
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ParameterError(f"snr_db must be finite or +inf, got {snr_db}")

    rng = make_rng(seed)
    if kind == COMPLEX_GAUSSIAN:
        H = np.empty((n_m, n_p), dtype=np.complex128)
        H.real = rng.standard_normal((n_m, n_p))
        H.imag = rng.standard_normal((n_m, n_p))
        H *= 1.0 / math.sqrt(2 * n_m)
    else:
        H = np.exp(1j * rng.uniform(0.0, 2 * math.pi, (n_m, n_p)))
        H *= 1.0 / math.sqrt(n_m)

    support = np.sort(rng.choice(n_p, size=sparsity_k, replace=False))
    truth = np.zeros(n_p, dtype=np.complex128)
    truth[support] = np.exp(1j * rng.uniform(0.0, 2 * math.pi, sparsity_k))

    clean = H @ truth
    sigma = 0.0
    if math.isinf(snr_db):
        g = clean
    else:
        w = (rng.standard_normal(n_m) + 1j * rng.standard_normal(n_m))
        target = np.linalg.norm(clean) / 10 ** (snr_db / 20)
        w *= target / np.linalg.norm(w)
        sigma = target / math.sqrt(n_m)
        g = clean + w
    return SensingProblem(H, g, truth, sigma, kind)


@dataclass(frozen=True)
class RecoveryMetrics:
    nmse: float
    support_precision: float
    support_recall: float


def recovery_metrics(estimate, truth, rel_threshold=1e-3):
    """NMSE and support precision/recall of `estimate` against `truth`.

    An entry counts as recovered when its magnitude exceeds
    ``rel_threshold * max|estimate|``; the true support is the nonzeros of
    `truth`. Precision is 0 when the estimate has empty support.
    """
    estimate = np.asarray(estimate, dtype=np.complex128)
    truth = np.asarray(truth, dtype=np.complex128)
    if estimate.shape != truth.shape:
        raise DimensionError(
            f"estimate {estimate.shape} and truth {truth.shape} differ")
    tnorm2 = np.vdot(truth, truth).real
    if tnorm2 == 0:
        raise MetricsError("truth is identically zero; NMSE undefined")
    err = estimate - truth
    nmse = np.vdot(err, err).real / tnorm2

    mag = np.abs(estimate)
    found = mag > rel_threshold * mag.max()
    actual = truth != 0
    hits = np.count_nonzero(found & actual)
    n_found = np.count_nonzero(found)
    precision = hits / n_found if n_found else 0.0
    recall = hits / np.count_nonzero(actual)
    return RecoveryMetrics(float(nmse), float(precision), float(recall))
