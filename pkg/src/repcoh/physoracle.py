"""Brute-force density-matrix simulation of the repetition code.

Encode, apply per-qubit noise, project onto every syndrome, recover, decode.
This path shares nothing with :mod:`repcoh.repcode` beyond the definition of
the physical noise, and serves as its oracle.  Qubit ``i`` (0-based) is bit
``N-1-i`` of the basis index, so ``|q0 q1 ... q_{N-1}>`` reads left to right.

Also covers the XX-interaction error ``prod exp(-i eps_ij X_i X_j)`` on a
chain, which a tailored decoder corrects exactly.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence, Union

import numpy as np

from .errchan import ErrorParams, ReducedPTM

MAX_QUBITS = 7
MAX_COMBINATORIAL_QUBITS = 15

Syndrome = tuple  # entries +1 / -1, length N-1
DecoderTable = Mapping[Syndrome, frozenset]


def _check_n(N: int, limit: int = MAX_QUBITS) -> int:
    if N < 1 or N % 2 == 0:
        raise ValueError(f"number of qubits must be odd, got {N}")
    if N > limit:
        raise ValueError(f"number of qubits must be <= {limit}, got {N}")
    return N


def _mask(support, N: int) -> int:
    m = 0
    for i in support:
        m |= 1 << (N - 1 - i)
    return m


def _bits(index: int, N: int) -> list:
    return [(index >> (N - 1 - i)) & 1 for i in range(N)]


def syndrome_of(support, N: int) -> Syndrome:
    """Eigenvalues of ``Z_i Z_{i+1}`` for the X error on ``support``."""
    s = set(support)
    return tuple(-1 if ((i in s) ^ (i + 1 in s)) else 1 for i in range(N - 1))


def _basis_syndromes(N: int) -> np.ndarray:
    """Integer syndrome label of every computational basis state."""
    idx = np.arange(1 << N)
    label = np.zeros(1 << N, dtype=np.int64)
    for i in range(N - 1):
        bi = (idx >> (N - 1 - i)) & 1
        bj = (idx >> (N - 2 - i)) & 1
        label |= (bi ^ bj) << i
    return label


def _label(syndrome: Syndrome) -> int:
    return sum(1 << i for i, s in enumerate(syndrome) if s == -1)


def syndrome_projectors(N: int) -> dict:
    """Diagonal of ``P_sigma = prod (1 + sigma_i S_i)/2`` for every syndrome.

    Built from the stabilizer product with integer arithmetic, so the
    resolution of the identity can be checked exactly.
    """
    _check_n(N, MAX_COMBINATORIAL_QUBITS)
    idx = np.arange(1 << N)
    z = [1 - 2 * ((idx >> (N - 1 - i)) & 1) for i in range(N)]
    out = {}
    for sigma in itertools.product((1, -1), repeat=N - 1):
        diag2 = np.ones(1 << N, dtype=np.int64)
        for i, s in enumerate(sigma):
            diag2 = diag2 * (1 + s * z[i] * z[i + 1])
        out[sigma] = diag2 >> (N - 1)
    return out


def standard_decoder(N: int) -> dict:
    """Majority vote: each syndrome maps to its minimum-weight X support."""
    _check_n(N, MAX_COMBINATORIAL_QUBITS)
    table = {}
    for w in range((N - 1) // 2 + 1):
        for support in itertools.combinations(range(N), w):
            table.setdefault(syndrome_of(support, N), frozenset(support))
    return table


def xx_tailored_decoder(N: int) -> dict:
    """Each syndrome maps to the unique even-weight X support producing it."""
    _check_n(N, MAX_COMBINATORIAL_QUBITS)
    table = {}
    for w in range(0, N + 1, 2):
        for support in itertools.combinations(range(N), w):
            table.setdefault(syndrome_of(support, N), frozenset(support))
    return table


def even_support_bijection(N: int) -> bool:
    """True iff even-weight supports hit each syndrome exactly once."""
    _check_n(N, MAX_COMBINATORIAL_QUBITS)
    seen = set()
    count = 0
    for w in range(0, N + 1, 2):
        for support in itertools.combinations(range(N), w):
            seen.add(syndrome_of(support, N))
            count += 1
    return count == 1 << (N - 1) and len(seen) == 1 << (N - 1)


def chain_boundaries_injective(N: int) -> bool:
    """Edge subsets of the path graph have pairwise distinct boundaries."""
    _check_n(N, MAX_COMBINATORIAL_QUBITS)
    seen = set()
    for edges in itertools.product((0, 1), repeat=N - 1):
        deg = [0] * N
        for i, on in enumerate(edges):
            if on:
                deg[i] ^= 1
                deg[i + 1] ^= 1
        seen.add(tuple(deg))
    return len(seen) == 1 << (N - 1)


def encode(alpha: complex, beta: complex, N: int) -> np.ndarray:
    """Density matrix of ``alpha |0...0> + beta |1...1>``."""
    _check_n(N)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-12:
        raise ValueError("logical amplitudes must be normalized")
    psi = np.zeros(1 << N, dtype=complex)
    psi[0] = alpha
    psi[-1] = beta
    return np.outer(psi, psi.conj())


def decode(rho: np.ndarray) -> np.ndarray:
    """Logical 2x2 density matrix read off the codeword corners."""
    last = rho.shape[0] - 1
    return np.array([[rho[0, 0], rho[0, last]], [rho[last, 0], rho[last, last]]])


def _apply_x_mask(rho: np.ndarray, mask: int) -> np.ndarray:
    perm = np.arange(rho.shape[0]) ^ mask
    return rho[np.ix_(perm, perm)]


def _single_qubit_op(rho: np.ndarray, op: np.ndarray, qubit: int, N: int) -> np.ndarray:
    """``op_q rho op_q^dag`` via tensor contraction on one qubit axis."""
    t = rho.reshape((2,) * (2 * N))
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [qubit])), 0, qubit)
    t = np.moveaxis(np.tensordot(t, op.conj(), axes=([N + qubit], [1])), -1, N + qubit)
    return t.reshape(rho.shape)


def apply_product_noise(
    rho: np.ndarray, params: Union[ErrorParams, Sequence[float]]
) -> np.ndarray:
    """Apply ``(1-q) U rho U^dag + q X U rho U^dag X`` to every qubit.

    ``params`` may be an :class:`ErrorParams` or a raw ``(epsilon, q)`` pair;
    the raw form admits ``q`` up to 1.
    """
    if isinstance(params, ErrorParams):
        eps, q = params.epsilon, params.q
    else:
        eps, q = params
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {q!r}")
    N = int(round(math.log2(rho.shape[0])))
    c, s = math.cos(0.5 * eps), math.sin(0.5 * eps)
    U = np.array([[c, -1j * s], [-1j * s, c]])
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    for qubit in range(N):
        r = _single_qubit_op(rho, U, qubit, N)
        rho = (1.0 - q) * r + q * _single_qubit_op(r, X, qubit, N) if q else r
    return rho


def qec_cycle(rho: np.ndarray, table: DecoderTable) -> np.ndarray:
    """``sum_sigma R_sigma P_sigma rho P_sigma R_sigma^dag``."""
    N = int(round(math.log2(rho.shape[0])))
    labels = _basis_syndromes(N)
    out = np.zeros_like(rho)
    for sigma, support in table.items():
        keep = labels == _label(sigma)
        projected = rho * np.outer(keep, keep)
        out += _apply_x_mask(projected, _mask(support, N))
    return out


def logical_channel(rho_logical: np.ndarray, N: int, params: ErrorParams, table=None) -> np.ndarray:
    """Push a logical 2x2 state through encode, noise, correction and decode."""
    if table is None:
        table = standard_decoder(N)
    w, v = np.linalg.eigh(rho_logical)
    out = np.zeros((2, 2), dtype=complex)
    for weight, vec in zip(w, v.T):
        if abs(weight) < 1e-15:
            continue
        rho = encode(vec[0], vec[1], N)
        rho = qec_cycle(apply_product_noise(rho, params), table)
        out += weight * decode(rho)
    return out


_PAULI_Y = np.array([[0, -1j], [1j, 0]])
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def tomography_block(N: int, params: ErrorParams) -> np.ndarray:
    """Process tomography of the (Y, Z) block of the logical PTM."""
    _check_n(N)
    table = standard_decoder(N)
    r = 1.0 / math.sqrt(2.0)
    eigen = {
        "Z": ((1.0, 0.0), (0.0, 1.0)),
        "Y": ((r, 1j * r), (r, -1j * r)),
    }
    images = {}
    for name, (plus, minus) in eigen.items():
        outs = []
        for alpha, beta in (plus, minus):
            rho = encode(alpha, beta, N)
            rho = qec_cycle(apply_product_noise(rho, params), table)
            outs.append(decode(rho))
        images[name] = outs[0] - outs[1]  # G(P) for P in {Y, Z}
    paulis = {"Y": _PAULI_Y, "Z": _PAULI_Z}
    order = ("Y", "Z")
    block = np.empty((2, 2))
    for i, row in enumerate(order):
        for k, col in enumerate(order):
            block[i, k] = 0.5 * np.trace(paulis[row] @ images[col]).real
    return block


def tomography_logical_rptm(N: int, params: ErrorParams) -> ReducedPTM:
    block = tomography_block(N, params)
    return ReducedPTM(0.5 * (block[0, 0] + block[1, 1]), 0.5 * (block[1, 0] - block[0, 1]))


def check_couplings(couplings, N: int) -> list:
    out = []
    for i, j, eps in couplings:
        if not (0 <= i < j < N and j == i + 1):
            raise ValueError(f"coupling ({i}, {j}) is not a chain edge for N={N}")
        if not abs(eps) < math.pi / 2:
            raise ValueError(f"|eps_ij| must be < pi/2, got {eps!r}")
        out.append((i, j, float(eps)))
    return out


def xx_unitary(couplings, N: int) -> np.ndarray:
    """``prod exp(-i eps_ij X_i X_j)`` as a dense matrix."""
    U = np.eye(1 << N, dtype=complex)
    for i, j, eps in check_couplings(couplings, N):
        perm = np.arange(1 << N) ^ _mask((i, j), N)
        U = math.cos(eps) * U - 1j * math.sin(eps) * U[perm, :]
    return U


def xx_apply(rho: np.ndarray, couplings) -> np.ndarray:
    N = int(round(math.log2(rho.shape[0])))
    U = xx_unitary(couplings, N)
    return U @ rho @ U.conj().T


XX_PROBE_STATES = (
    (1.0, 0.0),
    (1 / math.sqrt(2), 1 / math.sqrt(2)),
    (1 / math.sqrt(2), 1j / math.sqrt(2)),
)


def xx_checks(N: int, couplings) -> tuple:
    """Return ``(bijection, worst post-correction fidelity)``."""
    bijection = even_support_bijection(N)
    table = xx_tailored_decoder(N)
    worst = 1.0
    for alpha, beta in XX_PROBE_STATES:
        rho0 = encode(alpha, beta, N)
        out = qec_cycle(xx_apply(rho0, couplings), table)
        psi = np.zeros(1 << N, dtype=complex)
        psi[0], psi[-1] = alpha, beta
        fid = float(np.real(psi.conj() @ out @ psi))
        worst = min(worst, fid)
    return bijection, worst


def random_chain_couplings(N: int, rng: np.random.Generator, scale: float = 0.5) -> list:
    eps = rng.uniform(-scale, scale, size=N - 1)
    return [(i, i + 1, float(e)) for i, e in enumerate(eps)]
