"""Dense linear-algebra kernels the extractor is built on.

Matrices are ``numpy.ndarray`` objects of dtype float64. ``as_matrix`` is the
single place where shape and finiteness are checked; everything else assumes
it has been called.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, InvalidArgument, NonFinite, NotSymmetric, SingularPencil

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
RANK_TOL = 1e-10
SINGULAR_TOL = 1e-12
SIGN_TIE_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_LARGE_THETA = 1e150

EIGH_METHODS = ('lapack', 'jacobi')


def as_matrix(a, name='matrix'):
    """Return a float64 copy of ``a`` after checking it is a finite 2-D array."""
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f'{name} must be a non-empty 2-D array, got shape {m.shape}')
    if not np.all(np.isfinite(m)):
        raise NonFinite(f'{name} contains NaN or Inf entries')
    return m


def as_vector(v, length=None, name='vector'):
    x = np.array(v, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch(f'{name} must be 1-D, got shape {x.shape}')
    if length is not None and x.shape[0] != length:
        raise DimensionMismatch(f'{name} has length {x.shape[0]}, expected {length}')
    if not np.all(np.isfinite(x)):
        raise NonFinite(f'{name} contains NaN or Inf entries')
    return x


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray

    def top(self, k):
        """Rows are the eigenvectors of the ``k`` largest eigenvalues."""
        return self.vectors[:, :k].T.copy()


def _check_symmetric(a, name):
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f'{name} must be square, got shape {a.shape}')
    norm = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.T)
    if asym > SYMMETRY_TOL * norm:
        raise NotSymmetric(f'{name} is not symmetric (||a - a^T||_F = {asym:.3e}, ||a||_F = {norm:.3e})')
    return 0.5 * (a + a.T)


def _fix_signs(vectors):
    # Largest-magnitude entry of each column made non-negative, lowest index on ties.
    out = vectors.copy()
    mags = np.abs(out)
    peak = mags.max(axis=0)
    for j in range(out.shape[1]):
        idx = int(np.flatnonzero(mags[:, j] >= peak[j] * (1.0 - SIGN_TIE_TOL))[0])
        if out[idx, j] < 0:
            out[:, j] = -out[:, j]
    return out


def jacobi_eigh(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Returns ``(values, vectors)`` unsorted. Stops once the off-diagonal
    Frobenius norm drops below ``tol * ||a||_F``.
    """
    work = np.array(a, dtype=np.float64)
    n = work.shape[0]
    vectors = np.eye(n)
    scale = np.linalg.norm(work)
    if n == 1 or scale == 0.0:
        return np.diag(work).copy(), vectors

    for sweep in range(max_sweeps):
        off = np.linalg.norm(work - np.diag(np.diag(work)))
        if off <= tol * scale:
            logger.debug('jacobi converged after %d sweeps (n=%d)', sweep, n)
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                if abs(theta) > JACOBI_LARGE_THETA:
                    # theta**2 would overflow; t -> 1 / (2 theta)
                    t = 1.0 / (2.0 * theta)
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q

                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                work[p, q] = work[q, p] = 0.0

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning('jacobi stopped after %d sweeps without reaching tolerance', max_sweeps)

    return np.diag(work).copy(), vectors


def eigh_sym(a, method='lapack'):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Each eigenvector is signed so that its largest-magnitude entry is
    non-negative, which makes the output deterministic across runs.
    """
    a = as_matrix(a, 'a')
    sym = _check_symmetric(a, 'a')
    if method == 'lapack':
        values, vectors = scipy.linalg.eigh(sym)
    elif method == 'jacobi':
        values, vectors = jacobi_eigh(sym)
    else:
        raise InvalidArgument(f'unknown eigensolver {method!r}; expected one of {EIGH_METHODS}')

    order = np.argsort(-values, kind='stable')
    return EigenDecomposition(values=values[order].copy(), vectors=_fix_signs(vectors[:, order]))


def pinv(a):
    """Moore-Penrose pseudo-inverse; singular values below 1e-10 * sigma_max are dropped."""
    a = as_matrix(a, 'a')
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]))
    keep = s > RANK_TOL * s[0]
    return (vt[keep].T / s[keep]) @ u[:, keep].T


def row_space_projection(v):
    """Orthogonal projector ``pinv(v) @ v`` onto the row space of ``v``."""
    v = as_matrix(v, 'v')
    h = pinv(v) @ v
    return 0.5 * (h + h.T)


def sylvester_spd(a, b, c):
    """Solve ``a X + X b = c`` for symmetric positive-semidefinite ``a`` and ``b``.

    Both coefficients are diagonalised (``a = Q1 L1 Q1^T``, ``b = Q2 L2 Q2^T``)
    and the equation decouples entrywise in the rotated basis.
    """
    a = as_matrix(a, 'a')
    b = as_matrix(b, 'b')
    c = as_matrix(c, 'c')
    if c.shape != (a.shape[0], b.shape[0]):
        raise DimensionMismatch(f'c has shape {c.shape}, expected {(a.shape[0], b.shape[0])}')

    ea = eigh_sym(a)
    eb = eigh_sym(b)
    denom = ea.values[:, None] + eb.values[None, :]
    eps = SINGULAR_TOL * (np.linalg.norm(a) + np.linalg.norm(b))
    if np.any(denom <= eps):
        raise SingularPencil(
            f'a and b share a (near) null direction: min eigenvalue sum {denom.min():.3e} <= {eps:.3e}'
        )

    y = (ea.vectors.T @ c @ eb.vectors) / denom
    return ea.vectors @ y @ eb.vectors.T


def relative_residual(residual, reference):
    scale = np.linalg.norm(reference)
    return float(np.linalg.norm(residual) / scale) if scale > 0 else float(np.linalg.norm(residual))
