"""
Named states used by the worked examples, the verify suites and the tests.

Convention: index 0 is |0>, index 1 is |1>, party 1 is the most significant digit.
"""

from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy.stats import unitary_group

from hdiscord.core.states import DensityMatrix, PureState
from hdiscord.errors import DomainError


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string such as '1010'"""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def bell_state() -> PureState:
    """|psi+> = (|10> + |01>)/sqrt(2)"""
    return PureState.normalized(basis_ket("10") + basis_ket("01"), (2, 2))


def worked_example_state() -> PureState:
    """|1>(|1>/2 + sqrt3|0>/2)/sqrt2 + |0>(sqrt3|1>/2 + |0>/2)/sqrt2"""
    s3 = np.sqrt(3) / 2
    amps = (
        0.5 * basis_ket("11") + s3 * basis_ket("10")
        + s3 * basis_ket("01") + 0.5 * basis_ket("00")
    ) / np.sqrt(2)
    return PureState(amps, (2, 2))


def ghz_state(n: int = 3) -> PureState:
    return PureState.normalized(basis_ket("1" * n) + basis_ket("0" * n), (2,) * n)


def w_state(n: int = 3) -> PureState:
    amps = sum(basis_ket("0" * i + "1" + "0" * (n - i - 1)) for i in range(n))
    return PureState.normalized(amps, (2,) * n)


def ghz1_state() -> PureState:
    """(|1010> + |0101>)/sqrt2, cyclic unit 1010"""
    return PureState.normalized(basis_ket("1010") + basis_ket("0101"), (2,) * 4)


def w2_state() -> PureState:
    """(|1100> + |0110> + |0011> + |1001>)/2, cyclic unit 1100"""
    amps = sum(basis_ket(b) for b in ("1100", "0110", "0011", "1001"))
    return PureState.normalized(amps, (2,) * 4)


def dicke_vector(n: int, m: int) -> np.ndarray:
    """Equal superposition of the n-bit strings with m ones"""
    if not 0 <= m <= n:
        raise DomainError(f"Dicke index m={m} outside 0..{n}")
    v = np.zeros(2 ** n, dtype=complex)
    for ones in combinations(range(n), m):
        v[sum(1 << (n - 1 - i) for i in ones)] = 1.0
    return v / np.linalg.norm(v)


def werner_2qubit(r: float) -> DensityMatrix:
    """(1 - r)/4 I + r |psi+><psi+|"""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"Werner parameter r={r} outside [0, 1]")
    psi = bell_state()
    return DensityMatrix((1 - r) / 4 * np.eye(4) + r * psi.projector(), (2, 2))


def bell_diagonal(lambdas: Sequence[float]) -> DensityMatrix:
    """Mixture of |Psi+>, |Psi->, |Phi+>, |Phi-> with Psi = |00> +- |11>, Phi = |01> +- |10>"""
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (4,) or lam.min() < 0 or abs(lam.sum() - 1) > 1e-12:
        raise DomainError(f"Bell-diagonal spectrum must be 4 probabilities, got {lambdas}")
    s = 1 / np.sqrt(2)
    bells = [
        s * (basis_ket("00") + basis_ket("11")),
        s * (basis_ket("00") - basis_ket("11")),
        s * (basis_ket("01") + basis_ket("10")),
        s * (basis_ket("01") - basis_ket("10")),
    ]
    rho = sum(l * np.outer(b, b.conj()) for l, b in zip(lam, bells))
    return DensityMatrix(rho, (2, 2))


def swap_operator(m: int) -> np.ndarray:
    """F = sum_kl |kl><lk| on C^m (x) C^m"""
    f = np.zeros((m * m, m * m))
    for k in range(m):
        for l in range(m):
            f[k * m + l, l * m + k] = 1.0
    return f


def werner_mlevel(m: int, x: float) -> DensityMatrix:
    """(m - x)/(m^3 - m) I + (m x - 1)/(m^3 - m) F"""
    if m < 2 or not -1.0 <= x <= 1.0:
        raise DomainError(f"Werner family needs m >= 2 and x in [-1, 1], got m={m}, x={x}")
    norm = m ** 3 - m
    rho = (m - x) / norm * np.eye(m * m) + (m * x - 1) / norm * swap_operator(m)
    return DensityMatrix(rho, (m, m))


def max_entangled(m: int) -> np.ndarray:
    return sum(basis_index(m, k, k) for k in range(m)) / np.sqrt(m)


def basis_index(m: int, k: int, l: int) -> np.ndarray:
    v = np.zeros(m * m, dtype=complex)
    v[k * m + l] = 1.0
    return v


def isotropic_mlevel(m: int, x: float) -> DensityMatrix:
    """(1 - x)/(m^2 - 1) I + (m^2 x - 1)/(m^2 - 1) |Psi+><Psi+|, x the |Psi+> fidelity"""
    if m < 2 or not 0.0 <= x <= 1.0:
        raise DomainError(f"isotropic family needs m >= 2 and x in [0, 1], got m={m}, x={x}")
    psi = max_entangled(m)
    rho = (1 - x) / (m * m - 1) * np.eye(m * m) + (m * m * x - 1) / (m * m - 1) * np.outer(psi, psi.conj())
    return DensityMatrix(rho, (m, m))


def random_unitary(d: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_pure_state(dims: Sequence[int], rng: Optional[np.random.Generator] = None) -> PureState:
    rng = rng if rng is not None else np.random.default_rng()
    size = int(np.prod(dims))
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return PureState.normalized(amps, tuple(dims))


def random_density_matrix(
    dims: Sequence[int], rank: Optional[int] = None, rng: Optional[np.random.Generator] = None
) -> DensityMatrix:
    """Induced-measure random state of the given rank (full rank by default)"""
    rng = rng if rng is not None else np.random.default_rng()
    size = int(np.prod(dims))
    rank = size if rank is None else rank
    g = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, tuple(dims))
