"""
State representations: pure states, density matrices, Schmidt decomposition,
product bases and completely classical states
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from hdiscord.config import HERMITIAN_TOL, PSD_TOL, SPECTRAL_CUTOFF, TRACE_TOL
from hdiscord.core.linalg import HermitianEig, as_matrix, hermitian_eig, kron
from hdiscord.errors import ArityError, DimensionError, DomainError, NotPSDError, ProbabilityError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
PROBABILITY_TOL = 1e-12


def _check_dims(dims: Sequence[int], size: int) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"Invalid party dimensions {dims}")
    if int(np.prod(dims)) != size:
        raise DimensionError(f"dims {dims} imply size {int(np.prod(dims))}, got {size}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector with a per-party dimension signature"""

    amplitudes: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amps)):
            raise DomainError("Amplitudes contain NaN or infinite values")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", _check_dims(self.dims, amps.size))
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"State is not normalized (norm = {norm:.12f})")

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int]) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise DomainError("Cannot normalize the zero vector")
        return cls(amps / norm, tuple(dims))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator over the parties in dims"""

    matrix: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"Density matrix must be square, got {m.shape}")
        object.__setattr__(self, "dims", _check_dims(self.dims, m.shape[0]))

        skew = np.linalg.norm(m - m.conj().T)
        if skew > HERMITIAN_TOL:
            raise DomainError(f"Density matrix is not Hermitian (skew {skew:.3e})")
        m = (m + m.conj().T) / 2
        trace = np.trace(m).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise DomainError(f"Density matrix trace is {trace:.12f}, expected 1")
        object.__setattr__(self, "matrix", m)
        if self.spectrum.eigenvalues[0] < -PSD_TOL:
            raise NotPSDError(
                f"Density matrix has negative eigenvalue {self.spectrum.eigenvalues[0]:.3e}"
            )

    @cached_property
    def spectrum(self) -> HermitianEig:
        return hermitian_eig(self.matrix)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def is_pure(self, tol: float = 1e-10) -> bool:
        return abs(np.trace(self.matrix @ self.matrix).real - 1.0) <= tol

    def weighted_eigenvectors(self, cutoff: float = SPECTRAL_CUTOFF) -> Tuple[np.ndarray, np.ndarray]:
        """sqrt(lambda_k) and the matching eigenvectors for lambda_k > cutoff"""
        w, v = self.spectrum
        w = np.clip(w, 0.0, None)
        mask = w > cutoff
        return np.sqrt(w[mask]), v[:, mask]


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """psi = sum_i coefficients[i] |left_i> (x) |right_i>, coefficients descending"""

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > 1e-12))

    def reconstruct(self) -> np.ndarray:
        return sum(
            c * np.kron(self.left_vectors[:, i], self.right_vectors[:, i])
            for i, c in enumerate(self.coefficients)
        )


@dataclass(frozen=True)
class QubitBasisAngles:
    """|+> = cos(t/2)|1> + e^{-ip} sin(t/2)|0>,  |-> = e^{ip} sin(t/2)|1> - cos(t/2)|0>"""

    theta: float
    phi: float

    def plus(self) -> np.ndarray:
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        return np.array([np.exp(-1j * self.phi) * s, c], dtype=complex)

    def minus(self) -> np.ndarray:
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        return np.array([-c, np.exp(1j * self.phi) * s], dtype=complex)

    def unitary(self) -> np.ndarray:
        return np.column_stack([self.plus(), self.minus()])

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "QubitBasisAngles":
        """Angles spanning the same pair of projectors as the columns of u"""
        first = np.asarray(u, dtype=complex)[:, 0]
        theta = 2 * np.arctan2(abs(first[0]), abs(first[1]))
        if abs(first[0]) < 1e-14 or abs(first[1]) < 1e-14:
            phi = 0.0
        else:
            phi = float(np.mod(np.angle(first[1]) - np.angle(first[0]), 2 * np.pi))
        return cls(theta=float(theta), phi=phi)


LocalBasis = Union[QubitBasisAngles, np.ndarray]


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """One local orthonormal basis per party"""

    parties: Tuple[LocalBasis, ...]

    def __post_init__(self):
        parties = []
        for i, local in enumerate(self.parties):
            if isinstance(local, QubitBasisAngles):
                parties.append(local)
                continue
            u = np.asarray(local, dtype=complex)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise DimensionError(f"Party {i} basis must be a square matrix, got {u.shape}")
            err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
            if err > UNITARY_TOL:
                raise DomainError(f"Party {i} basis is not unitary (error {err:.3e})")
            parties.append(u)
        object.__setattr__(self, "parties", tuple(parties))

    @classmethod
    def from_angles(cls, angles: Sequence[Tuple[float, float]]) -> "ProductBasis":
        return cls(tuple(QubitBasisAngles(float(t), float(p)) for t, p in angles))

    @classmethod
    def computational(cls, dims: Sequence[int]) -> "ProductBasis":
        """Identity basis on every party (|0>, |1>, ... in index order)"""
        return cls(tuple(np.eye(int(d), dtype=complex) for d in dims))

    @classmethod
    def uniform(cls, n: int, theta: float, phi: float) -> "ProductBasis":
        return cls.from_angles([(theta, phi)] * n)

    def local_unitaries(self) -> List[np.ndarray]:
        return [p.unitary() if isinstance(p, QubitBasisAngles) else p for p in self.parties]

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(u.shape[0] for u in self.local_unitaries())

    def matrix(self) -> np.ndarray:
        """Columns are the product vectors |sigma_n>, party 1 slowest"""
        return kron(*self.local_unitaries())

    def angles(self) -> Optional[List[Tuple[float, float]]]:
        """(theta, phi) per party when every party is a qubit"""
        if any(d != 2 for d in self.dims):
            return None
        result = []
        for p in self.parties:
            if not isinstance(p, QubitBasisAngles):
                p = QubitBasisAngles.from_unitary(p)
            result.append((p.theta, p.phi))
        return result


@dataclass(frozen=True, eq=False)
class ClassicalState:
    """sigma = sum_n p_n |sigma_n><sigma_n| on a product basis"""

    basis: ProductBasis
    probabilities: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        p = validate_probabilities(self.probabilities, int(np.prod(self.basis.dims)))
        object.__setattr__(self, "probabilities", p)

    def table(self) -> np.ndarray:
        return self.probabilities.reshape(self.basis.dims)

    def density(self) -> DensityMatrix:
        return classical_state(self.basis, self.probabilities)


def validate_probabilities(p, size: int) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != size:
        raise ProbabilityError(f"Probability table has {p.size} entries, basis has {size}")
    if not np.all(np.isfinite(p)):
        raise ProbabilityError("Probability table has NaN or infinite entries")
    if p.min() < -PROBABILITY_TOL:
        raise ProbabilityError(f"Negative probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > PROBABILITY_TOL * max(1, size):
        raise ProbabilityError(f"Probabilities sum to {total:.15f}, expected 1")
    return np.clip(p, 0.0, None)


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Schmidt decomposition via SVD of the d_A x d_B amplitude matrix"""
    if psi.n_parties != 2:
        raise ArityError(f"Schmidt decomposition needs 2 parties, got {psi.n_parties}")
    d_a, d_b = psi.dims
    u, s, vh = np.linalg.svd(psi.amplitudes.reshape(d_a, d_b), full_matrices=True)
    r = min(d_a, d_b)
    # Right vectors are the rows of vh; SVD already gives real non-negative s
    return SchmidtDecomposition(
        coefficients=s[:r].copy(),
        left_vectors=u[:, :r],
        right_vectors=vh[:r, :].T,
        left_basis=u,
        right_basis=vh.T,
    )


def basis_vectors(b: ProductBasis) -> List[PureState]:
    """All product vectors of the basis in lexicographic order"""
    m = b.matrix()
    return [PureState(m[:, n], b.dims) for n in range(m.shape[1])]


def classical_state(b: ProductBasis, p) -> DensityMatrix:
    """Density matrix of the completely classical state sum_n p_n |sigma_n><sigma_n|"""
    m = b.matrix()
    p = validate_probabilities(p, m.shape[1])
    return DensityMatrix((m * p) @ m.conj().T, b.dims)


def to_density(state: Union[PureState, DensityMatrix]) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state
