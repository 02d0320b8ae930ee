"""
Closed-form D^H evaluators for the exactly solvable families
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from hdiscord.core import catalogue
from hdiscord.core.states import ClassicalState, DensityMatrix, ProductBasis, PureState, schmidt_decompose
from hdiscord.errors import ArityError, DimensionError, DomainError
from hdiscord.processors.engine import dh_fixed_basis, optimal_probs

logger = logging.getLogger(__name__)

X_TOL = 1e-10


# ---------------------------------------------------------------------------
# Pure bipartite states
# ---------------------------------------------------------------------------

def dh_pure_bipartite(psi: PureState) -> Tuple[float, ClassicalState]:
    """1 - sqrt(sum_i lambda_i^4), sigma diagonal in the Schmidt product basis"""
    if psi.n_parties != 2:
        raise ArityError(f"Pure bipartite formula needs 2 parties, got {psi.n_parties}")
    schmidt = schmidt_decompose(psi)
    quartic = schmidt.coefficients ** 4
    total = float(quartic.sum())

    d_a, d_b = psi.dims
    probabilities = np.zeros(d_a * d_b)
    for i, q in enumerate(quartic):
        probabilities[i * d_b + i] = q / total
    basis = ProductBasis((schmidt.left_basis, schmidt.right_basis))
    value = max(0.0, 1.0 - np.sqrt(total))
    return float(value), ClassicalState(basis, probabilities)


# ---------------------------------------------------------------------------
# Two-qubit Werner and Bell-diagonal states
# ---------------------------------------------------------------------------

def _werner_root(r: float) -> float:
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"Werner parameter r={r} outside [0, 1]")
    return float(np.sqrt((1 - r) * (1 + 3 * r)))


def dh_werner_2qubit(r: float) -> float:
    root = _werner_root(r)
    return float(max(0.0, 1.0 - 0.5 * np.sqrt(3 - r + root)))


def dh_werner_2qubit_sigma(r: float) -> ClassicalState:
    """Nearest classical state: mixture of the computational products"""
    root = _werner_root(r)
    denom = 3 - r + root
    off = 0.5 * (1 + r + root) / denom
    diag = (1 - r) / denom
    # Index order |00>, |01>, |10>, |11>
    return ClassicalState(ProductBasis.computational((2, 2)), np.array([diag, off, off, diag]))


@dataclass(frozen=True)
class BellDiagonalSpec:
    """Weights on |Psi+>, |Psi->, |Phi+>, |Phi-> with Psi = |00> +- |11>, Phi = |01> +- |10>"""

    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float

    def __post_init__(self):
        lam = self.spectrum()
        if lam.min() < -1e-12 or abs(lam.sum() - 1.0) > 1e-10:
            raise DomainError(f"Bell-diagonal weights must be a distribution, got {lam.tolist()}")

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "BellDiagonalSpec":
        if len(values) != 4:
            raise DomainError(f"Bell-diagonal spectrum needs 4 weights, got {len(values)}")
        return cls(*(float(v) for v in values))

    def spectrum(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3, self.lambda4])

    def density(self) -> DensityMatrix:
        return catalogue.bell_diagonal(np.clip(self.spectrum(), 0.0, None))


# (theta, phi) shared by both parties for the sigma_1, sigma_2, sigma_3 branches
BELL_BRANCH_ANGLES = (
    (np.pi / 2, 0.0),
    (np.pi / 2, np.pi / 2),
    (0.0, 0.0),
)


def bell_diagonal_parameters(spec: BellDiagonalSpec) -> Tuple[float, np.ndarray]:
    s = np.sqrt(np.clip(spec.spectrum(), 0.0, None))
    h = float(s.sum())
    d = np.array([
        s[0] - s[1] + s[2] - s[3],
        -s[0] + s[1] + s[2] - s[3],
        s[0] + s[1] - s[2] - s[3],
    ])
    return h, d


def dh_bell_diagonal(spec: BellDiagonalSpec) -> Tuple[float, ClassicalState]:
    """1 - sqrt(h^2 + max d_i^2)/2 with the sigma of the winning branch"""
    h, d = bell_diagonal_parameters(spec)
    # argmax returns the first index on ties, so sigma_1 wins
    branch = int(np.argmax(d ** 2))
    dd = float(d[branch])
    value = max(0.0, 1.0 - 0.5 * np.sqrt(h * h + dd * dd))

    norm = 4 * (h * h + dd * dd)
    same, flipped = (h + dd) ** 2 / norm, (h - dd) ** 2 / norm
    theta, phi = BELL_BRANCH_ANGLES[branch]
    sigma = ClassicalState(
        ProductBasis.uniform(2, theta, phi),
        np.array([same, flipped, flipped, same]),
    )
    logger.debug(f"Bell-diagonal branch sigma_{branch + 1}: h={h:.6f}, d={dd:.6f}")
    return float(value), sigma


# ---------------------------------------------------------------------------
# X states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class XStateSpec:
    """Diagonal and anti-diagonal of an X-form matrix in a declared product basis.

    Entry i of anti_diagonal is rho[i, n-1-i] in the index order of the
    basis vectors.
    """

    dims: Tuple[int, ...]
    diagonal: np.ndarray
    anti_diagonal: np.ndarray
    basis: Optional[ProductBasis] = None

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=float).reshape(-1)
        anti = np.asarray(self.anti_diagonal, dtype=complex).reshape(-1)
        n = diag.size
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "anti_diagonal", anti)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if n % 2 or n != int(np.prod(self.dims)) or anti.size != n:
            raise DimensionError(f"X state needs an even side matching dims {self.dims}, got {n}")
        if self.basis is not None and tuple(self.basis.dims) != self.dims:
            raise DimensionError(f"Declared basis dims {self.basis.dims} differ from {self.dims}")
        if abs(diag.sum() - 1.0) > X_TOL:
            raise DomainError(f"X state diagonal sums to {diag.sum():.12f}")
        for i in range(n // 2):
            j = n - 1 - i
            if abs(anti[i] - np.conj(anti[j])) > X_TOL:
                raise DomainError(f"X state is not Hermitian at block ({i}, {j})")
            if diag[i] < -X_TOL or diag[j] < -X_TOL or diag[i] * diag[j] - abs(anti[i]) ** 2 < -X_TOL:
                raise DomainError(f"X state block ({i}, {j}) is not positive semidefinite")

    @classmethod
    def from_matrix(cls, rho: np.ndarray, dims: Sequence[int],
                    basis: Optional[ProductBasis] = None) -> "XStateSpec":
        """Read the X entries of rho given in the coordinates of basis (computational if None)"""
        rho = np.asarray(rho, dtype=complex)
        if basis is not None:
            b = basis.matrix()
            rho = b.conj().T @ rho @ b
        n = rho.shape[0]
        mask = np.eye(n, dtype=bool) | np.fliplr(np.eye(n, dtype=bool))
        stray = np.abs(rho[~mask]).max() if n > 2 else 0.0
        if stray > X_TOL:
            raise DomainError(f"Matrix is not X-form in the declared basis (stray entry {stray:.3e})")
        return cls(tuple(dims), np.diag(rho).real, np.fliplr(rho).diagonal().copy(), basis)

    def declared_basis(self) -> ProductBasis:
        return self.basis if self.basis is not None else ProductBasis.computational(self.dims)

    def matrix(self) -> np.ndarray:
        """The state in computational coordinates"""
        n = self.diagonal.size
        rho = np.diag(self.diagonal).astype(complex)
        for i in range(n):
            if i != n - 1 - i:
                rho[i, n - 1 - i] = self.anti_diagonal[i]
        b = self.declared_basis().matrix()
        return b @ rho @ b.conj().T

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.matrix(), self.dims)


def random_basis_floor(state, trials: int = 100, seed: int = 0) -> float:
    """Smallest fixed-basis D^H over random local unitaries"""
    rng = np.random.default_rng(seed)
    best = 1.0
    for _ in range(trials):
        basis = ProductBasis(tuple(catalogue.random_unitary(d, rng) for d in state.dims))
        best = min(best, dh_fixed_basis(state, basis))
    return best


def dh_xstate(spec: XStateSpec, sanity_trials: int = 100) -> Tuple[float, ClassicalState]:
    """D^H with sigma diagonal in the declared X basis"""
    rho = spec.density()
    basis = spec.declared_basis()
    value = dh_fixed_basis(rho, basis)
    sigma = ClassicalState(basis, optimal_probs(rho, basis))

    if sanity_trials:
        floor = random_basis_floor(rho, sanity_trials)
        if value > floor + 1e-12:
            logger.warning(
                f"X-basis value {value:.12f} exceeds a random-basis value {floor:.12f}; "
                f"the declared basis is not optimal for this state"
            )
    return value, sigma


# ---------------------------------------------------------------------------
# Multilevel Werner and isotropic families
# ---------------------------------------------------------------------------

def _check_level(m: int):
    if int(m) != m or m < 2:
        raise DomainError(f"level count must be an integer >= 2, got {m}")


def werner_mlevel_affinity(m: int, x: float) -> float:
    _check_level(m)
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"Werner parameter x={x} outside [-1, 1]")
    bracket = (2 + m + x) / (m + 1) + np.sqrt((m - 1) / (m + 1)) * np.sqrt(max(0.0, 1 - x * x))
    return float(min(1.0, np.sqrt(bracket / 2)))


def dh_werner_mlevel(m: int, x: float) -> float:
    return max(0.0, 1.0 - werner_mlevel_affinity(m, x))


def isotropic_mlevel_affinity(m: int, x: float) -> float:
    _check_level(m)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"isotropic fidelity x={x} outside [0, 1]")
    s = np.sqrt((1 - x) / (m * m - 1))
    diagonal = np.sqrt(x) / m + (m - 1) / m * s
    value = m * diagonal ** 2 + (m * m - m) * s ** 2
    return float(min(1.0, np.sqrt(value)))


def dh_isotropic_mlevel(m: int, x: float) -> float:
    return max(0.0, 1.0 - isotropic_mlevel_affinity(m, x))


def prior_dh_werner_mlevel(m: int, x: float) -> float:
    """Earlier Hellinger measure D_H = 1 - A^2 for the same family"""
    return 1.0 - werner_mlevel_affinity(m, x) ** 2


def prior_dh_isotropic_mlevel(m: int, x: float) -> float:
    return 1.0 - isotropic_mlevel_affinity(m, x) ** 2


def from_prior(prior: float) -> float:
    """D^H = 1 - sqrt(1 - D_H)"""
    return 1.0 - np.sqrt(max(0.0, 1.0 - prior))


def werner_mlevel_zero_point(m: int) -> float:
    """x at which the Werner family is I/m^2"""
    _check_level(m)
    return 1.0 / m


def multilevel_sigma(rho: DensityMatrix) -> ClassicalState:
    """Optimal weights on the computational product basis"""
    basis = ProductBasis.computational(rho.dims)
    return ClassicalState(basis, optimal_probs(rho, basis))
