"""
Ground states of collective spin models in the Dicke basis.

Dicke index m counts spin-up qubits: S_z |N, m> = (m - N/2) |N, m>.
"""

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import eigh, expm
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh

from hdiscord.config import DEFAULT_FOCK_CUTOFF, DEFAULT_MAX_FOCK_CUTOFF, SymmetricScanConfig
from hdiscord.errors import ConvergenceError, DimensionError, DomainError, ModelDomainError
from hdiscord.processors.engine import DiscordResult
from hdiscord.processors.symmetric import SymmetricMixedState, SymmetricPureState, dh_symmetric, dicke_state

logger = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-6
ROOT_GRID = 4001
ROOT_EDGE = 1e-9
DENSE_LIMIT = 600


class CollectiveOperators(NamedTuple):
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    splus: np.ndarray
    sminus: np.ndarray


def collective_operators(n: int) -> CollectiveOperators:
    """S_x, S_y, S_z, S_+, S_- on the (N+1)-dimensional symmetric sector"""
    if n < 1:
        raise DimensionError(f"need at least one spin, got {n}")
    m = np.arange(n + 1)
    splus = np.diag(np.sqrt((m[:-1] + 1) * (n - m[:-1])), -1)
    sminus = splus.T.copy()
    sz = np.diag(m - n / 2)
    return CollectiveOperators(
        sx=(splus + sminus) / 2,
        sy=(splus - sminus) / 2j,
        sz=sz,
        splus=splus,
        sminus=sminus,
    )


def _expectation(op: np.ndarray, state: SymmetricPureState) -> float:
    c = state.dicke_coeffs
    return float(np.real(c.conj() @ op @ c))


# ---------------------------------------------------------------------------
# LMG model: H = -(lambda/N)(S_x^2 + gamma S_y^2) - h_z S_z
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LMGParams:
    n: int
    lam: float
    gamma: float
    h_z: float

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"LMG model needs N >= 2, got {self.n}")
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"anisotropy gamma={self.gamma} outside [0, 1]")


def lmg_hamiltonian(p: LMGParams) -> np.ndarray:
    ops = collective_operators(p.n)
    h = -(p.lam / p.n) * (ops.sx @ ops.sx + p.gamma * (ops.sy @ ops.sy)) - p.h_z * ops.sz
    return np.real_if_close(h)


def lmg_energy(p: LMGParams, state: SymmetricPureState) -> float:
    return _expectation(lmg_hamiltonian(p), state)


def lmg_ground_isotropic(p: LMGParams) -> SymmetricPureState:
    """Exact ground state for gamma = 1: the Dicke state minimizing E_n"""
    if p.gamma != 1.0:
        raise DomainError(f"isotropic LMG needs gamma = 1, got {p.gamma}")
    if p.lam == 0:
        raise ModelDomainError("LMG coupling lambda = 0 leaves a degenerate model")

    m = np.arange(p.n + 1)
    n_values = m - p.n / 2
    energies = -(p.lam / 2) * (p.n / 2 + 1) + (p.lam / p.n) * n_values ** 2 - p.h_z * n_values
    # Ties go to the smaller |n|
    order = np.lexsort((np.abs(n_values), energies))
    best = int(m[order[0]])
    logger.debug(f"LMG gamma=1 ground: n={n_values[best]}, E={energies[best]:.12f}")
    return dicke_state(p.n, best)


def double_factorial(k: int) -> int:
    """k!! with (-1)!! = 0!! = 1"""
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def pairing_state(n: int, tanh_2x: float) -> SymmetricPureState:
    """sum_n (-1)^n sqrt((2n-1)!!/(2n)!!) tanh^n x |N, N - 2n>"""
    if not abs(tanh_2x) < 1.0:
        raise ModelDomainError(f"|tanh 2x| = {abs(tanh_2x):.6f} >= 1: no physical squeezing")
    t = np.tanh(np.arctanh(tanh_2x) / 2)
    c = np.zeros(n + 1, dtype=complex)
    for k in range(n // 2 + 1):
        ratio = double_factorial(2 * k - 1) / double_factorial(2 * k)
        c[n - 2 * k] = (-1) ** k * np.sqrt(ratio) * t ** k
    return SymmetricPureState.normalized(n, c)


def lmg_tanh_2x(p: LMGParams) -> float:
    """Squeezing parameter tanh 2x of the variational ground state.

    The branches are written in units of |lambda|: H / |lambda| depends on the
    field only through h = h_z / |lambda|, so that ratio is what enters here.
    """
    if p.lam == 0:
        raise ModelDomainError("LMG coupling lambda = 0 leaves a degenerate model")
    h = abs(p.h_z / p.lam)
    g = p.gamma
    if p.lam < 0:
        return (1 - g) / (1 + g + 2 * h)
    if h > 1:
        return -(1 - g) / (2 * h - 1 - g)
    if h < 1:
        return -(h * h - g) / (2 - h * h - g)
    raise ModelDomainError("h_z/lambda = 1 sits on the transition; no branch applies")


def lmg_ground_aniso(p: LMGParams) -> SymmetricPureState:
    """Variational ground state for gamma < 1"""
    if p.gamma >= 1.0:
        raise DomainError(f"anisotropic LMG needs gamma < 1, got {p.gamma}")
    if p.n % 2:
        logger.warning(f"Pairing ansatz with odd N={p.n}; the |N, 0> end is never reached")
    state = pairing_state(p.n, lmg_tanh_2x(p))
    if p.h_z < 0:
        # S_z -> -S_z
        state = SymmetricPureState(p.n, state.dicke_coeffs[::-1].copy())
    return state


def lmg_ground(p: LMGParams) -> SymmetricPureState:
    if p.gamma == 1.0:
        return lmg_ground_isotropic(p)
    return lmg_ground_aniso(p)


# ---------------------------------------------------------------------------
# Uniaxial model: H = -S_x^2/N - h_x S_x - h_z S_z
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniaxialParams:
    n: int
    h_x: float
    h_z: float

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"uniaxial model needs N >= 2, got {self.n}")
        if not (np.isfinite(self.h_x) and np.isfinite(self.h_z)):
            raise DomainError("uniaxial fields must be finite")


class UniaxialCandidate(NamedTuple):
    lambda0: float
    tanh_2x: float
    energy: float
    state: SymmetricPureState


def uniaxial_residual(p: UniaxialParams, l0: float) -> float:
    return l0 * p.h_z - p.h_x * (1 - 2 * l0 ** 2) / (2 * np.sqrt(1 - l0 ** 2)) - l0 * (1 - 2 * l0 ** 2)


def uniaxial_roots(p: UniaxialParams) -> List[float]:
    """All roots of the lambda_0 equation in (-1, 1)"""
    grid = np.linspace(-1 + ROOT_EDGE, 1 - ROOT_EDGE, ROOT_GRID)
    values = uniaxial_residual(p, grid)
    roots = [float(x) for x, v in zip(grid, values) if v == 0.0]
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        roots.append(brentq(lambda x: uniaxial_residual(p, x), grid[i], grid[i + 1], xtol=1e-15))
    roots = sorted(roots)
    unique = [r for i, r in enumerate(roots) if i == 0 or r - roots[i - 1] > 1e-9]
    return unique


def uniaxial_tanh_2x(p: UniaxialParams, l0: float) -> float:
    q = 1 - l0 ** 2
    gamma = -(1 - 5 * l0 ** 2) / 4 + p.h_x * l0 * (2 - l0 ** 2) / (8 * q ** 1.5)
    delta = p.h_z - (1 - 7 * l0 ** 2) / 2 + p.h_x * l0 * (4 - 3 * l0 ** 2) / (4 * q ** 1.5)
    if delta == 0:
        return np.inf
    return 2 * gamma / delta


def uniaxial_hamiltonian(p: UniaxialParams) -> np.ndarray:
    ops = collective_operators(p.n)
    return -(ops.sx @ ops.sx) / p.n - p.h_x * ops.sx - p.h_z * ops.sz


def uniaxial_candidates(p: UniaxialParams) -> List[UniaxialCandidate]:
    """One squeezed, tilted state per admissible root"""
    roots = uniaxial_roots(p)
    if not roots:
        raise ModelDomainError(f"no real root of the tilt equation for h_x={p.h_x}, h_z={p.h_z}")
    ops = collective_operators(p.n)
    h = uniaxial_hamiltonian(p)
    candidates = []
    for l0 in roots:
        t = uniaxial_tanh_2x(p, l0)
        if not abs(t) < 1.0:
            logger.debug(f"Skipping root lambda0={l0:.12f}: tanh 2x = {t}")
            continue
        theta0 = 2 * np.arcsin(l0)
        rotation = expm(-1j * theta0 * ops.sy)
        base = pairing_state(p.n, t)
        state = SymmetricPureState.normalized(p.n, rotation @ base.dicke_coeffs)
        candidates.append(UniaxialCandidate(l0, t, _expectation(h, state), state))
    if not candidates:
        raise ModelDomainError(
            f"every tilt root gives |tanh 2x| >= 1 for h_x={p.h_x}, h_z={p.h_z}"
        )
    return candidates


def uniaxial_ground(p: UniaxialParams) -> SymmetricPureState:
    """Lowest-energy candidate; ties keep the smallest lambda_0"""
    candidates = uniaxial_candidates(p)
    best = min(candidates, key=lambda c: c.energy)
    logger.debug(
        f"Uniaxial h_x={p.h_x}, h_z={p.h_z}: lambda0={best.lambda0:.12f} "
        f"from {len(candidates)} candidates, E={best.energy:.12f}"
    )
    return best.state


# ---------------------------------------------------------------------------
# Dicke model: H = w0 J_z + w a^dag a + (lambda/sqrt N)(a^dag + a)(J_+ + J_-)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DickeParams:
    n: int
    omega: float
    omega0: float
    lam: float
    fock_cutoff: int = DEFAULT_FOCK_CUTOFF

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"Dicke model needs N >= 1, got {self.n}")
        if self.fock_cutoff < 1:
            raise DomainError(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")
        if not (self.omega > 0 and self.omega0 > 0):
            raise DomainError(f"frequencies must be positive, got omega={self.omega}, omega0={self.omega0}")

    @property
    def critical_coupling(self) -> float:
        return float(np.sqrt(self.omega * self.omega0) / 2)


def dicke_hamiltonian(p: DickeParams) -> sparse.csr_matrix:
    """Sparse H on spin (N+1) x Fock (cutoff+1), atom index slowest"""
    ops = collective_operators(p.n)
    c = p.fock_cutoff
    a = sparse.diags(np.sqrt(np.arange(1, c + 1)), 1)
    number = sparse.diags(np.arange(c + 1, dtype=float))
    spin_id, boson_id = sparse.identity(p.n + 1), sparse.identity(c + 1)
    h = (
        p.omega0 * sparse.kron(sparse.csr_matrix(ops.sz), boson_id)
        + p.omega * sparse.kron(spin_id, number)
        + (p.lam / np.sqrt(p.n)) * sparse.kron(sparse.csr_matrix(ops.splus + ops.sminus), a + a.T)
    )
    return h.tocsr()


@lru_cache(maxsize=32)
def _dicke_ground(n: int, omega: float, omega0: float, lam: float, cutoff: int) -> Tuple[float, np.ndarray]:
    p = DickeParams(n, omega, omega0, lam, cutoff)
    h = dicke_hamiltonian(p)
    m, k = np.divmod(np.arange(h.shape[0]), cutoff + 1)
    # Parity (m + k) mod 2 is conserved; the ground state sits in the even sector
    keep = np.nonzero((m + k) % 2 == 0)[0]
    sub = h[keep][:, keep]
    if sub.shape[0] <= DENSE_LIMIT:
        w, v = eigh(sub.toarray(), subset_by_index=[0, 0])
    else:
        w, v = eigsh(sub, k=1, which='SA', v0=np.ones(sub.shape[0]), tol=0)
    psi = np.zeros(h.shape[0])
    psi[keep] = v[:, 0]
    psi = psi.reshape(n + 1, cutoff + 1)
    rho = psi @ psi.T
    return float(w[0]), rho / np.trace(rho)


def dicke_ground_energy(p: DickeParams) -> float:
    return _dicke_ground(p.n, p.omega, p.omega0, p.lam, p.fock_cutoff)[0]


def _reduced_at(p: DickeParams, cutoff: int) -> SymmetricMixedState:
    _, rho = _dicke_ground(p.n, p.omega, p.omega0, p.lam, cutoff)
    return SymmetricMixedState.from_matrix(p.n, rho)


def dicke_discord_checked(p: DickeParams, scan: Optional[SymmetricScanConfig] = None
                          ) -> Tuple[SymmetricMixedState, DiscordResult]:
    """Atomic reduced ground state at twice the cutoff, with its D^H.

    Raises ConvergenceError when D^H at the given cutoff differs from the value
    at twice the cutoff by more than CONVERGENCE_TOL.
    """
    coarse = _reduced_at(p, p.fock_cutoff)
    fine = _reduced_at(p, 2 * p.fock_cutoff)
    result = dh_symmetric(fine, scan)
    change = abs(dh_symmetric(coarse, scan).value - result.value)
    if change > CONVERGENCE_TOL:
        raise ConvergenceError(
            f"Fock cutoff {p.fock_cutoff} not converged at lambda={p.lam} (D^H change {change:.3e})",
            suggested_cutoff=2 * p.fock_cutoff,
        )
    result.diagnostics["fock_cutoff"] = 2 * p.fock_cutoff
    result.diagnostics["cutoff_change"] = change
    return fine, result


def dicke_ground_reduced(p: DickeParams, scan: Optional[SymmetricScanConfig] = None) -> SymmetricMixedState:
    return dicke_discord_checked(p, scan)[0]


def converged_dicke_discord(p: DickeParams, max_cutoff: int = DEFAULT_MAX_FOCK_CUTOFF,
                            scan: Optional[SymmetricScanConfig] = None
                            ) -> Tuple[SymmetricMixedState, DiscordResult]:
    """Double the cutoff until D^H stops moving"""
    current = p
    while True:
        try:
            return dicke_discord_checked(current, scan)
        except ConvergenceError as e:
            nxt = e.suggested_cutoff or 2 * current.fock_cutoff
            if nxt > max_cutoff:
                raise
            logger.warning(f"Raising Fock cutoff to {nxt} at lambda={p.lam}: {e}")
            current = replace(current, fock_cutoff=nxt)


def converged_dicke_ground(p: DickeParams, max_cutoff: int = DEFAULT_MAX_FOCK_CUTOFF,
                           scan: Optional[SymmetricScanConfig] = None) -> SymmetricMixedState:
    return converged_dicke_discord(p, max_cutoff, scan)[0]
