"""
D^H for permutation-invariant qubit states.

States live in the Dicke basis |N, m> (m spin-up qubits). The nearest
classical state is searched among symmetric product bases: every party
shares one (theta, phi), and the weight of a basis pattern depends only on
how many parties sit in |+>. Overlaps with a pattern |+>^k |->^(N-k) come
from the polynomial (a0 + a1 t)^k (b0 + b1 t)^(N-k), whose t^m coefficient
is sqrt(C(N, m)) <N, m|pattern>, so no 2^N vector is formed.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize
from scipy.special import comb

from hdiscord.config import SPECTRAL_CUTOFF, SymmetricScanConfig
from hdiscord.core.catalogue import dicke_vector
from hdiscord.core.states import DensityMatrix, ProductBasis, PureState
from hdiscord.errors import DimensionError, DomainError, ResourceError, UnsupportedError
from hdiscord.processors.engine import DiscordResult, canonical_angles

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
SYMMETRY_TOL = 1e-10
EXPAND_MAX_QUBITS = 12
CHUNK_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class SymmetricPureState:
    """sum_m c_m |N, m>"""

    n: int
    dicke_coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.dicke_coeffs, dtype=complex).reshape(-1)
        if self.n < 1 or c.size != self.n + 1:
            raise DimensionError(f"{self.n} qubits need {self.n + 1} Dicke coefficients, got {c.size}")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"Dicke coefficients are not normalized (norm {norm:.12f})")
        object.__setattr__(self, "dicke_coeffs", c)

    @classmethod
    def normalized(cls, n: int, coeffs) -> "SymmetricPureState":
        c = np.asarray(coeffs, dtype=complex)
        norm = np.linalg.norm(c)
        if norm == 0:
            raise DomainError("Dicke coefficients are all zero")
        return cls(n, c / norm)

    @property
    def dims(self) -> Tuple[int, ...]:
        return (2,) * self.n

    def spectral(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.ones(1), self.dicke_coeffs[:, None]


@dataclass(frozen=True, eq=False)
class SymmetricMixedState:
    """sum_k lambda_k |k><k| with each |k> given by Dicke coefficients (columns)"""

    n: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float).reshape(-1)
        v = np.asarray(self.eigenvectors, dtype=complex)
        if v.ndim != 2 or v.shape != (self.n + 1, w.size):
            raise DimensionError(
                f"Expected eigenvectors of shape ({self.n + 1}, {w.size}), got {v.shape}"
            )
        if w.min() < -NORM_TOL or abs(w.sum() - 1.0) > NORM_TOL:
            raise DomainError(f"Eigenvalues must be a distribution, sum {w.sum():.12f}")
        gram_err = np.abs(v.conj().T @ v - np.eye(w.size)).max()
        if gram_err > NORM_TOL:
            raise DomainError(f"Eigenvectors are not orthonormal (error {gram_err:.3e})")
        object.__setattr__(self, "eigenvalues", np.clip(w, 0.0, None))
        object.__setattr__(self, "eigenvectors", v)

    @classmethod
    def from_matrix(cls, n: int, rho: np.ndarray, cutoff: float = SPECTRAL_CUTOFF) -> "SymmetricMixedState":
        """Diagonalize a density matrix given in the Dicke basis, dropping weights below cutoff"""
        rho = np.asarray(rho, dtype=complex)
        w, v = eigh((rho + rho.conj().T) / 2)
        keep = w > cutoff
        w, v = w[keep][::-1], v[:, keep][:, ::-1]
        return cls(n, w / w.sum(), v)

    @property
    def dims(self) -> Tuple[int, ...]:
        return (2,) * self.n

    def spectral(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.sqrt(self.eigenvalues), self.eigenvectors

    def matrix(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


SymmetricState = Union[SymmetricPureState, SymmetricMixedState]


@dataclass(frozen=True)
class SymmetricSigma:
    """Symmetric classical state: one (theta, phi) for all parties.

    orbit_probabilities[k] is the weight of each pattern with k parties in
    |+>; there are orbit_sizes[k] = C(N, k) such patterns.
    """

    theta: float
    phi: float
    orbit_probabilities: np.ndarray
    orbit_sizes: np.ndarray

    @property
    def n(self) -> int:
        return self.orbit_probabilities.size - 1

    def total(self) -> float:
        return float(np.sum(self.orbit_sizes * self.orbit_probabilities))

    def expanded(self) -> np.ndarray:
        """Full probability table over the 2^N product basis (index bit 0 is |+>)"""
        if self.n > EXPAND_MAX_QUBITS:
            raise ResourceError(f"Refusing to expand sigma over {self.n} qubits")
        idx = np.arange(2 ** self.n)
        ones = np.array([bin(i).count("1") for i in idx])
        return self.orbit_probabilities[self.n - ones]


def dicke_state(n: int, m: int) -> SymmetricPureState:
    if not 0 <= m <= n:
        raise DomainError(f"Dicke index m={m} outside 0..{n}")
    c = np.zeros(n + 1, dtype=complex)
    c[m] = 1.0
    return SymmetricPureState(n, c)


def dicke_matrix(n: int) -> np.ndarray:
    """Columns are |N, m> in the 2^N computational basis"""
    if n > EXPAND_MAX_QUBITS:
        raise ResourceError(f"Refusing to expand {n} qubits (limit {EXPAND_MAX_QUBITS})")
    return np.column_stack([dicke_vector(n, m) for m in range(n + 1)])


def expand_symmetric(state: SymmetricState) -> Union[PureState, DensityMatrix]:
    """Embed a Dicke-basis state into the full 2^N space"""
    basis = dicke_matrix(state.n)
    if isinstance(state, SymmetricPureState):
        return PureState(basis @ state.dicke_coeffs, state.dims)
    return DensityMatrix(basis @ state.matrix() @ basis.conj().T, state.dims)


def symmetric_from_state(state: Union[PureState, DensityMatrix]) -> SymmetricState:
    """Dicke-basis form of a qubit state supported on the symmetric subspace"""
    if any(d != 2 for d in state.dims):
        raise UnsupportedError(f"Symmetric form needs qubit parties, got dims {list(state.dims)}")
    n = len(state.dims)
    basis = dicke_matrix(n)
    if isinstance(state, PureState):
        c = basis.conj().T @ state.amplitudes
        if np.abs(basis @ c - state.amplitudes).max() > SYMMETRY_TOL:
            raise UnsupportedError("State is not permutation invariant")
        return SymmetricPureState.normalized(n, c)
    reduced = basis.conj().T @ state.matrix @ basis
    if np.abs(basis @ reduced @ basis.conj().T - state.matrix).max() > SYMMETRY_TOL:
        raise UnsupportedError("State is not supported on the symmetric subspace")
    return SymmetricMixedState.from_matrix(n, reduced)


# ---------------------------------------------------------------------------
# Pattern overlaps
# ---------------------------------------------------------------------------

def _pattern_coefficients(n: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """<N, m|+^k -^(N-k)> for every angle pair, shape (G, k, m)"""
    g = theta.size
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    a0, a1 = np.exp(-1j * phi) * s, c.astype(complex)
    b0, b1 = -c.astype(complex), np.exp(1j * phi) * s

    def powers(x0, x1):
        out = np.zeros((g, n + 1, n + 1), dtype=complex)
        out[:, 0, 0] = 1.0
        for k in range(1, n + 1):
            out[:, k, :] = x0[:, None] * out[:, k - 1, :]
            out[:, k, 1:] += x1[:, None] * out[:, k - 1, :-1]
        return out

    pa = powers(a0, a1)
    pb = powers(b0, b1)[:, ::-1, :]  # row k holds (b0 + b1 t)^(N-k)
    poly = np.zeros((g, n + 1, 2 * n + 1), dtype=complex)
    for i in range(n + 1):
        poly[:, :, i:i + n + 1] += pa[:, :, i, None] * pb
    norms = np.sqrt(comb(n, np.arange(n + 1)))
    return poly[:, :, :n + 1] / norms


def _pattern_overlaps(state: SymmetricState, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """<phi_r|pattern_k> with shape (G, r, k)"""
    _, vecs = state.spectral()
    coeffs = _pattern_coefficients(state.n, theta, phi)
    return np.einsum('mr,gkm->grk', vecs.conj(), coeffs)


def dicke_overlap_amplitudes(s: SymmetricPureState, theta: float, phi: float) -> np.ndarray:
    """A_k = <psi|+>^k |->^(N-k) for k = 0..N"""
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise DomainError(f"Angles must be finite, got ({theta}, {phi})")
    return _pattern_overlaps(s, np.array([float(theta)]), np.array([float(phi)]))[0, 0]


def _orbit_weights(state: SymmetricState, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """S_k = sum_r sqrt(lambda_r) |<phi_r|pattern_k>|^2, shape (G, k)"""
    sqrt_w, _ = state.spectral()
    overlaps = _pattern_overlaps(state, theta, phi)
    return np.einsum('r,grk->gk', sqrt_w, np.abs(overlaps) ** 2)


def symmetric_affinities(state: SymmetricState, theta, phi) -> np.ndarray:
    """Affinity at the symmetric product basis for each (theta, phi) pair"""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    sizes = comb(state.n, np.arange(state.n + 1))
    rank = state.spectral()[1].shape[1]
    step = max(1, CHUNK_BUDGET // ((state.n + 1) * (2 * state.n + 1 + rank)))
    out = np.empty(theta.size)
    for start in range(0, theta.size, step):
        s = _orbit_weights(state, theta[start:start + step], phi[start:start + step])
        out[start:start + step] = np.sqrt(np.sum(sizes * s ** 2, axis=1))
    return np.minimum(out, 1.0)


def symmetric_affinity(state: SymmetricState, theta: float, phi: float) -> float:
    return float(symmetric_affinities(state, theta, phi)[0])


def symmetric_sigma(state: SymmetricState, theta: float, phi: float) -> SymmetricSigma:
    """Optimal orbit weights p_k ~ S_k^2 at a fixed (theta, phi)"""
    s = _orbit_weights(state, np.array([theta]), np.array([phi]))[0]
    sizes = comb(state.n, np.arange(state.n + 1))
    per_pattern = s ** 2 / np.sum(sizes * s ** 2)
    return SymmetricSigma(float(theta), float(phi), per_pattern, sizes)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def dh_symmetric(state: SymmetricState, scan: Optional[SymmetricScanConfig] = None) -> DiscordResult:
    """Scan (theta, phi), refine the best cells, return D^H with the orbit-form sigma"""
    scan = scan or SymmetricScanConfig()
    thetas = np.linspace(0.0, np.pi, scan.theta_points)
    phis = np.linspace(0.0, 2 * np.pi, scan.phi_points, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing='ij')
    tt, pp = tt.reshape(-1), pp.reshape(-1)

    logger.info(f"Symmetric scan over N={state.n}: {tt.size} (theta, phi) cells")
    grid_aff = symmetric_affinities(state, tt, pp)
    order = np.argsort(-grid_aff, kind='stable')[:scan.restarts]

    best = (float(grid_aff[order[0]]), float(tt[order[0]]), float(pp[order[0]]))
    iterations = 0
    for i in order:
        res = minimize(
            lambda x: -symmetric_affinity(state, x[0], x[1]),
            np.array([tt[i], pp[i]]),
            method='Nelder-Mead',
            options={'xatol': 1e-10, 'fatol': scan.tolerance, 'maxiter': 4000},
        )
        iterations += int(res.nit)
        logger.debug(f"Symmetric restart from cell {int(i)}: affinity {-res.fun:.12f}")
        if -res.fun > best[0]:
            best = (float(-res.fun), float(res.x[0]), float(res.x[1]))

    aff, theta, phi = best
    theta, phi = canonical_angles(theta, phi)
    aff = max(aff, symmetric_affinity(state, theta, phi))
    sigma = symmetric_sigma(state, theta, phi)
    table = sigma.expanded() if state.n <= EXPAND_MAX_QUBITS else None

    result = DiscordResult(
        value=max(0.0, 1.0 - min(1.0, aff)),
        affinity=min(1.0, aff),
        optimal_basis=ProductBasis.uniform(state.n, theta, phi),
        optimal_probabilities=table,
        method="symmetric",
        diagnostics={
            "grid_cells": int(tt.size),
            "restarts": int(order.size),
            "best_grid_affinity": float(grid_aff[order[0]]),
            "refinement_iterations": iterations,
        },
        sigma=sigma,
    )
    logger.info(f"Symmetric D^H = {result.value:.12f} at theta={theta:.6f}, phi={phi:.6f}")
    return result
