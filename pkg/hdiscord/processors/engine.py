"""
Discord engine - optimal probabilities for a fixed product basis, D^H at a
fixed basis, and the search over qubit product bases.

For a basis {|sigma_n>} and rho = sum_k l_k |phi_k><phi_k| the optimal weights
are p_n ~ S_n^2 with S_n = sum_k sqrt(l_k) |<phi_k|sigma_n>|^2, and the
maximal affinity at that basis is sqrt(sum_n S_n^2). Only the basis angles are
searched.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from hdiscord.config import OptimizerConfig
from hdiscord.core.states import DensityMatrix, ProductBasis, PureState
from hdiscord.errors import DomainError, ResourceError, UnsupportedError
from hdiscord.utils.worker_pool import map_ordered

logger = logging.getLogger(__name__)

State = Union[PureState, DensityMatrix]

# Bound on complex entries held per evaluation chunk
CHUNK_BUDGET = 2_000_000
BRUTEFORCE_MAX_QUBITS = 4
BRUTEFORCE_MAX_CELLS = 50_000_000


@dataclass
class DiscordResult:
    """D^H with the nearest classical state that attains it"""

    value: float
    affinity: float
    optimal_basis: ProductBasis
    optimal_probabilities: Optional[np.ndarray]
    method: str = "optimize"
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    # Orbit-form sigma for permutation-invariant results
    sigma: Optional[Any] = None

    def basis_angles(self) -> Optional[List[Tuple[float, float]]]:
        return self.optimal_basis.angles()


# ---------------------------------------------------------------------------
# Fixed-basis quantities
# ---------------------------------------------------------------------------

def spectral_weights(state: State) -> Tuple[np.ndarray, np.ndarray]:
    """(sqrt(lambda_k), eigenvectors as columns); a pure state is its own single term"""
    if isinstance(state, PureState):
        return np.ones(1), state.amplitudes[:, None]
    return state.weighted_eigenvectors()


def overlap_weights(state: State, basis: ProductBasis) -> np.ndarray:
    """S_n = sum_k sqrt(lambda_k) |<phi_k|sigma_n>|^2 for every basis vector"""
    if tuple(basis.dims) != tuple(state.dims):
        raise DomainError(f"Basis dims {basis.dims} do not match state dims {state.dims}")
    sqrt_w, vecs = spectral_weights(state)
    overlaps = vecs.conj().T @ basis.matrix()
    return sqrt_w @ np.abs(overlaps) ** 2


def optimal_probs_pure(psi: PureState, basis: ProductBasis) -> np.ndarray:
    """p_i = |<psi|sigma_i>|^4 / sum_n |<psi|sigma_n>|^4"""
    s = overlap_weights(psi, basis)
    total = np.sum(s ** 2)
    # A complete basis always has some nonzero overlap with a unit vector
    assert total > 0, "all overlaps vanish on a complete basis"
    return s ** 2 / total


def optimal_probs_mixed(rho: DensityMatrix, basis: ProductBasis) -> np.ndarray:
    """p_i ~ (sum_k sqrt(lambda_k) |<phi_k|sigma_i>|^2)^2"""
    s = overlap_weights(rho, basis)
    total = np.sum(s ** 2)
    assert total > 0, "all overlaps vanish on a complete basis"
    return s ** 2 / total


def optimal_probs(state: State, basis: ProductBasis) -> np.ndarray:
    if isinstance(state, PureState):
        return optimal_probs_pure(state, basis)
    return optimal_probs_mixed(state, basis)


def affinity_fixed_basis(state: State, basis: ProductBasis) -> float:
    s = overlap_weights(state, basis)
    return float(min(1.0, np.sqrt(np.sum(s ** 2))))


def dh_fixed_basis(state: State, basis: ProductBasis) -> float:
    """1 - sqrt(sum_n S_n^2) at the given basis"""
    return float(max(0.0, 1.0 - affinity_fixed_basis(state, basis)))


def result_at_basis(state: State, basis: ProductBasis, method: str,
                    diagnostics: Optional[Dict[str, Any]] = None) -> DiscordResult:
    aff = affinity_fixed_basis(state, basis)
    return DiscordResult(
        value=max(0.0, 1.0 - aff),
        affinity=aff,
        optimal_basis=basis,
        optimal_probabilities=optimal_probs(state, basis),
        method=method,
        diagnostics=diagnostics or {},
    )


# ---------------------------------------------------------------------------
# Vectorized qubit-angle evaluation
# ---------------------------------------------------------------------------

def qubit_unitaries(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Stacked local bases with columns (|+>, |->), shape (..., 2, 2)"""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u = np.empty(theta.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-1j * phi) * s
    u[..., 1, 0] = c
    u[..., 0, 1] = -c
    u[..., 1, 1] = np.exp(1j * phi) * s
    return u


def canonical_angles(theta: float, phi: float) -> Tuple[float, float]:
    """Fold (theta, phi) into [0, pi] x [0, 2pi) without changing the projectors"""
    theta = float(np.mod(theta, 2 * np.pi))
    if theta > np.pi:
        theta, phi = 2 * np.pi - theta, phi + np.pi
    return theta, float(np.mod(phi, 2 * np.pi))


class QubitObjective:
    """Affinity at batches of qubit product bases for one fixed state.

    The spectral decomposition is taken once and reused for every basis.
    """

    def __init__(self, state: State):
        if any(d != 2 for d in state.dims):
            raise UnsupportedError(
                f"Angle search needs qubit parties, got dims {list(state.dims)}"
            )
        self.state = state
        self.n = len(state.dims)
        self.sqrt_w, vecs = spectral_weights(state)
        self.rank = vecs.shape[1]
        # conj(phi_k) as a tensor (1, r, 2, ..., 2)
        self._bra = vecs.conj().T.reshape((1, self.rank) + (2,) * self.n)
        self.evaluations = 0
        self._count_lock = threading.Lock()

    @property
    def chunk_size(self) -> int:
        return max(1, CHUNK_BUDGET // (self.rank * 2 ** self.n))

    def affinities(self, angles: np.ndarray) -> np.ndarray:
        """angles has shape (G, n, 2) holding (theta, phi) per party"""
        angles = np.asarray(angles, dtype=float).reshape(-1, self.n, 2)
        out = np.empty(angles.shape[0])
        step = self.chunk_size
        for start in range(0, angles.shape[0], step):
            block = angles[start:start + step]
            out[start:start + step] = self._affinity_block(block)
        with self._count_lock:
            self.evaluations += angles.shape[0]
        return out

    def _affinity_block(self, angles: np.ndarray) -> np.ndarray:
        g = angles.shape[0]
        units = qubit_unitaries(angles[..., 0], angles[..., 1])  # (G, n, 2, 2)
        x = self._bra
        for i in range(self.n):
            axis = 2 + i
            x = np.moveaxis(x, axis, -1)
            u = units[:, i].reshape((g,) + (1,) * (x.ndim - 3) + (2, 2))
            x = np.moveaxis(x @ u, -1, axis)
        amps = np.abs(x.reshape(g, self.rank, -1)) ** 2
        s = np.einsum('k,gkn->gn', self.sqrt_w, amps)
        return np.sqrt(np.sum(s ** 2, axis=1))

    def affinity(self, flat_angles: np.ndarray) -> float:
        return float(self.affinities(np.asarray(flat_angles).reshape(1, self.n, 2))[0])


def _angle_axes(points: int, phi_endpoint: bool) -> Tuple[np.ndarray, np.ndarray]:
    thetas = np.linspace(0.0, np.pi, points)
    phis = np.linspace(0.0, 2 * np.pi, points, endpoint=phi_endpoint)
    return thetas, phis


def _cells_to_angles(cells: np.ndarray, thetas: np.ndarray, phis: np.ndarray, n: int) -> np.ndarray:
    """Decode flat cell indices (party 1 slowest) into (G, n, 2) angle arrays"""
    per_party = thetas.size * phis.size
    digits = np.array(np.unravel_index(cells, (per_party,) * n)).T  # (G, n)
    t_idx, p_idx = np.divmod(digits, phis.size)
    return np.stack([thetas[t_idx], phis[p_idx]], axis=-1)


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------

def _seed_cells(n: int, config: OptimizerConfig, per_party: int) -> Tuple[np.ndarray, bool]:
    total = per_party ** n
    if total <= config.max_grid_cells:
        return np.arange(total), False

    # Too many cells: sample with the seeded generator, always keeping the aligned ones
    rng = np.random.default_rng(config.seed)
    aligned = np.array([sum(c * per_party ** i for i in range(n)) for c in range(per_party)])
    sampled = rng.choice(total, size=config.max_grid_cells, replace=False)
    cells = np.unique(np.concatenate([aligned, sampled]))
    return cells, True


def _refine(objective: QubitObjective, start: np.ndarray, config: OptimizerConfig,
            jitter: Optional[np.ndarray]) -> Tuple[np.ndarray, float, int]:
    x0 = start.reshape(-1).copy()
    if jitter is not None:
        x0 = x0 + jitter
    res = minimize(
        lambda x: -objective.affinity(x),
        x0,
        method='Nelder-Mead',
        options={
            'xatol': 1e-9,
            'fatol': config.tolerance,
            'maxiter': 2000 * x0.size,
            'maxfev': 4000 * x0.size,
            'initial_simplex': _initial_simplex(x0, 0.25),
        },
    )
    return res.x, -float(res.fun), int(res.nit)


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    simplex = np.tile(x0, (x0.size + 1, 1))
    for i in range(x0.size):
        simplex[i + 1, i] += step
    return simplex


def dh_optimize(state: State, config: Optional[OptimizerConfig] = None) -> DiscordResult:
    """Grid of product bases, then simplex refinement from the best cells"""
    config = config or OptimizerConfig()
    objective = QubitObjective(state)
    n = objective.n
    thetas, phis = _angle_axes(config.grid_points, phi_endpoint=False)
    per_party = thetas.size * phis.size

    cells, sampled = _seed_cells(n, config, per_party)
    logger.info(
        f"Optimizing D^H over {n} qubits: {cells.size} grid cells"
        f"{' (sampled)' if sampled else ''}, {config.restarts} restarts"
    )
    grid_angles = _cells_to_angles(cells, thetas, phis, n)
    grid_aff = objective.affinities(grid_angles)

    # Stable sort keeps the first cell on exact ties
    order = np.argsort(-grid_aff, kind='stable')[:config.restarts]
    starts = [grid_angles[i] for i in order]

    rng = np.random.default_rng(config.seed) if config.seed else None
    jitters = [rng.normal(scale=1e-3, size=2 * n) if rng is not None else None for _ in starts]

    outcomes = map_ordered(
        lambda job: _refine(objective, job[0], config, job[1]),
        list(zip(starts, jitters)),
        workers=config.workers,
    )

    best_x = starts[0].reshape(-1)
    best_aff = float(grid_aff[order[0]])
    iterations = 0
    for i, (outcome, error) in enumerate(outcomes):
        if error is not None:
            logger.error(f"Refinement {i} failed: {error}")
            continue
        x, aff, nit = outcome
        iterations += nit
        logger.debug(f"Restart {i}: affinity {aff:.12f} after {nit} iterations")
        if aff > best_aff:
            best_x, best_aff = x, aff

    angles = [canonical_angles(best_x[2 * i], best_x[2 * i + 1]) for i in range(n)]
    basis = ProductBasis.from_angles(angles)
    best_cell = grid_angles[order[0]]
    diagnostics = {
        "restarts": len(starts),
        "grid_cells": int(cells.size),
        "grid_sampled": sampled,
        "best_grid_cell": [[float(t), float(p)] for t, p in best_cell],
        "best_grid_affinity": float(grid_aff[order[0]]),
        "refinement_iterations": iterations,
        "evaluations": objective.evaluations,
    }
    result = result_at_basis(state, basis, "optimize", diagnostics)
    # The final re-evaluation can differ from the simplex value by round-off only
    if result.affinity < best_aff:
        result.affinity = min(1.0, best_aff)
        result.value = max(0.0, 1.0 - result.affinity)
    logger.info(f"D^H = {result.value:.12f} after {iterations} refinement iterations")
    return result


def dh_bruteforce(state: State, grid_n: int) -> float:
    """Minimum D^H over the full Cartesian angle grid; an upper bound on the true D^H"""
    n = len(state.dims)
    if any(d != 2 for d in state.dims):
        raise UnsupportedError(f"Brute force needs qubit parties, got dims {list(state.dims)}")
    if n > BRUTEFORCE_MAX_QUBITS:
        raise ResourceError(f"Brute force supports at most {BRUTEFORCE_MAX_QUBITS} qubits, got {n}")
    if grid_n < 3:
        raise DomainError(f"grid_n must be >= 3, got {grid_n}")
    total = (grid_n * grid_n) ** n
    if total > BRUTEFORCE_MAX_CELLS:
        raise ResourceError(f"Brute force grid has {total} cells, limit is {BRUTEFORCE_MAX_CELLS}")

    objective = QubitObjective(state)
    thetas, phis = _angle_axes(grid_n, phi_endpoint=True)
    best = 0.0
    step = max(objective.chunk_size, 1)
    for start in range(0, total, step):
        cells = np.arange(start, min(total, start + step))
        aff = objective.affinities(_cells_to_angles(cells, thetas, phis, n))
        best = max(best, float(aff.max()))
    logger.info(f"Brute force over {total} cells: D^H <= {1 - best:.12f}")
    return max(0.0, 1.0 - min(1.0, best))
