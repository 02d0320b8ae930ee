"""
Dense complex linear algebra used by every discord evaluator
"""

import logging
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from hdiscord.config import HERMITIAN_TOL, PSD_TOL
from hdiscord.errors import DimensionError, DomainError, NotPSDError

logger = logging.getLogger(__name__)


class HermitianEig(NamedTuple):
    """Ascending eigenvalues with orthonormal eigenvectors in the columns"""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite complex 2-D array; density-matrix objects are unwrapped"""
    a = getattr(a, "matrix", a)
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"Expected a matrix, got array with shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("Matrix has NaN or infinite entries")
    return m


def _require_square(a: np.ndarray):
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"Matrix must be square, got {a.shape}")


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_eig(a) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending"""
    a = as_matrix(a)
    _require_square(a)
    skew = np.linalg.norm(a - a.conj().T)
    if skew > HERMITIAN_TOL:
        raise DomainError(f"Matrix is not Hermitian (||A - A^dag||_F = {skew:.3e})")
    # Symmetrize away the sub-tolerance residue before the solver sees it
    w, v = scipy.linalg.eigh((a + a.conj().T) / 2)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def clamp_spectrum(w: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Zero out round-off negatives; anything below -tol is a real error"""
    if w.size and w.min() < -tol:
        raise NotPSDError(f"Matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    return np.clip(w, 0.0, None)


def matrix_sqrt_psd(a) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix"""
    w, v = hermitian_eig(a)
    w = clamp_spectrum(w)
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices or vectors, left factor slowest"""
    if not factors:
        raise DimensionError("kron needs at least one factor")
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every party not listed in keep; kept parties stay in their original order"""
    rho = as_matrix(rho)
    _require_square(rho)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {dims} do not match matrix side {rho.shape[0]}")

    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep {keep} is not a subset of parties 0..{n - 1}")

    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # Trace highest index first so the remaining axis numbers stay valid
    remaining = n
    for i in reversed(traced):
        t = np.trace(t, axis1=i, axis2=i + remaining)
        remaining -= 1

    side = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(side, side)


def affinity(rho, sigma) -> float:
    """Tr[sqrt(rho) sqrt(sigma)] clamped to [0, 1]"""
    a = as_matrix(rho)
    b = as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    value = np.trace(matrix_sqrt_psd(a) @ matrix_sqrt_psd(b))
    if abs(value.imag) > 1e-10:
        logger.warning(f"Affinity has imaginary residue {value.imag:.3e}")
    return float(min(1.0, max(0.0, value.real)))
