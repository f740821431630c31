"""Depolarizing channels, EPR and isotropic states, Kraus channels.

Qubit ``0`` is the leftmost Kronecker factor.  Bipartite states on ``n``
pairs use the block layout: Alice's qubits ``0..n-1`` followed by Bob's
qubits ``n..2n-1``, so an operator ``P (x) Q`` with ``P`` on Alice and ``Q``
on Bob is a literal Kronecker product.  :func:`pairwise_to_block` converts
from the interleaved ``(A1 B1)(A2 B2)...`` layout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import DimensionError, DomainError, NotPSDError
from .linalg import PAULIS, dagger

TP_ATOL = 1e-10


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    return rho


def _qubit_count(dim: int) -> int:
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 0 or 2 ** n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive map ``X -> sum_a K_a X K_a^dagger``.

    Kraus operators are ``out_dim x in_dim``.  The map need not be trace
    preserving; sub-channels conditioned on a classical outcome are only
    trace non-increasing.
    """

    kraus: tuple[np.ndarray, ...]
    in_dim: int = field(init=False)
    out_dim: int = field(init=False)

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise DimensionError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ks):
            raise DimensionError("Kraus operators must share one 2-d shape")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "out_dim", shape[0])
        object.__setattr__(self, "in_dim", shape[1])

    def effect(self) -> np.ndarray:
        """``sum_a K_a^dagger K_a``; equals the identity iff trace preserving."""
        return sum(dagger(k) @ k for k in self.kraus)

    @property
    def trace_preserving(self) -> bool:
        e = self.effect()
        return bool(np.max(np.abs(e - np.eye(self.in_dim))) <= TP_ATOL)

    @property
    def trace_nonincreasing(self) -> bool:
        return float(linalg.eigvalsh(self.effect())[-1]) <= 1.0 + TP_ATOL

    def __call__(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"channel expects {self.in_dim}-dim input, got {m.shape}")
        return sum(k @ m @ dagger(k) for k in self.kraus)

    def adjoint(self) -> "QuantumChannel":
        return channel_adjoint(self)


def channel_adjoint(c: QuantumChannel) -> QuantumChannel:
    """Heisenberg-picture map ``Y -> sum_a K_a^dagger Y K_a``."""
    return QuantumChannel(tuple(dagger(k) for k in c.kraus))


def channel_apply(c: QuantumChannel, m, on: int, factor_dims: Sequence[int]) -> np.ndarray:
    """Apply ``c`` to tensor factor ``on`` of ``m`` and the identity elsewhere.

    The output has factor ``on`` resized from ``c.in_dim`` to ``c.out_dim``.
    """
    m = linalg.as_matrix(m)
    dims = [int(d) for d in factor_dims]
    if math.prod(dims) != m.shape[0]:
        raise DimensionError(f"factor dims {dims} do not factor a {m.shape[0]}-dim matrix")
    if not 0 <= on < len(dims) or dims[on] != c.in_dim:
        raise DimensionError(f"factor {on} of {dims} does not match channel input {c.in_dim}")
    k = len(dims)
    t = m.reshape(dims + dims)
    out = np.zeros(
        [c.out_dim if i == on else d for i, d in enumerate(dims)] * 2, dtype=complex
    )
    for kr in c.kraus:
        # Row index of factor `on` sits at axis `on`, column index at axis `k + on`.
        x = np.moveaxis(np.tensordot(kr, t, axes=([1], [on])), 0, on)
        x = np.moveaxis(np.tensordot(x, kr.conj(), axes=([k + on], [1])), -1, k + on)
        out += x
    d = out.shape[0] if k == 1 else math.prod(out.shape[:k])
    return out.reshape(d, d)


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel((np.eye(dim),))


def unitary_channel(u) -> QuantumChannel:
    return QuantumChannel((np.asarray(u, dtype=complex),))


def trace_channel(dim: int) -> QuantumChannel:
    """The full trace ``X -> Tr[X]`` as a ``dim -> 1`` channel."""
    basis = np.eye(dim, dtype=complex)
    return QuantumChannel(tuple(basis[i:i + 1, :] for i in range(dim)))


def depolarizing_channel(rho: float) -> QuantumChannel:
    """Kraus form of ``X -> rho X + (1 - rho) Tr[X] I/2``.

    Weights are ``(1 + 3 rho)/4`` on the identity and ``(1 - rho)/4`` on each
    of X, Y, Z.
    """
    rho = _check_rho(rho)
    w0 = math.sqrt((1 + 3 * rho) / 4)
    w1 = math.sqrt((1 - rho) / 4)
    return QuantumChannel((w0 * PAULIS[0], w1 * PAULIS[1], w1 * PAULIS[2], w1 * PAULIS[3]))


def depolarize(m, rho: float, qubits: Iterable[int], total_qubits: int) -> np.ndarray:
    """Apply the qubit depolarizing map with parameter ``rho`` to each listed qubit."""
    rho = _check_rho(rho)
    m = linalg.as_matrix(m)
    n = int(total_qubits)
    if m.shape[0] != 2 ** n:
        raise DimensionError(f"matrix of dim {m.shape[0]} is not on {n} qubits")
    qubits = sorted(set(int(q) for q in qubits))
    if qubits and (qubits[0] < 0 or qubits[-1] >= n):
        raise DimensionError(f"qubit indices {qubits} out of range for {n} qubits")
    if rho == 1.0 or not qubits:
        return m.copy()
    t = m.reshape([2] * (2 * n))
    half_id = np.eye(2) / 2
    for q in qubits:
        traced = np.trace(t, axis1=q, axis2=n + q)
        # traced has the q-th row/col axes removed; reinsert them as I/2.
        mixed = np.multiply.outer(traced, half_id)
        mixed = np.moveaxis(mixed, [-2, -1], [q, n + q])
        t = rho * t + (1 - rho) * mixed
    return t.reshape(m.shape)


def epr_vector(n: int = 1) -> np.ndarray:
    """``|Phi>^{(x) n}`` in block layout: ``2^{-n/2} sum_x |x>_A |x>_B``."""
    if n < 1:
        raise DomainError(f"need at least one pair, got n={n}")
    d = 2 ** n
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * d + np.arange(d)] = 1 / math.sqrt(d)
    return v


def epr_state(n: int = 1) -> np.ndarray:
    v = epr_vector(n)
    return np.outer(v, v.conj())


def isotropic_state(rho: float, n: int = 1) -> np.ndarray:
    """``n`` copies of the EPR state with Alice's half depolarized, block layout."""
    rho = _check_rho(rho)
    return depolarize(epr_state(n), rho, range(n), 2 * n)


def isotropic_eigenvalues(rho: float) -> np.ndarray:
    """Closed-form spectrum of one isotropic pair, ascending."""
    rho = _check_rho(rho)
    lo = (1 - rho) / 4
    return np.array([lo, lo, lo, (1 + 3 * rho) / 4])


def pairwise_to_block(m, n: int) -> np.ndarray:
    """Reorder a ``2n``-qubit operator from ``(A1 B1)(A2 B2)...`` to ``A1..An B1..Bn``."""
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    return linalg.permute_factors(m, [2] * (2 * n), perm)


def block_to_pairwise(m, n: int) -> np.ndarray:
    perm = [0] * (2 * n)
    for i in range(n):
        perm[2 * i] = i
        perm[2 * i + 1] = n + i
    return linalg.permute_factors(m, [2] * (2 * n), perm)


def pauli_string(sigma: Sequence[int]) -> np.ndarray:
    return linalg.kron_all(PAULIS[s] for s in sigma)


def pauli_decompose(m, n_qubits: int) -> dict[tuple[int, ...], complex]:
    """Coefficients ``c_s = 2^{-n} Tr[B_s^dagger m]`` over Pauli strings ``s``."""
    m = linalg.as_matrix(m)
    if m.shape[0] != 2 ** n_qubits:
        raise DimensionError(f"matrix of dim {m.shape[0]} is not on {n_qubits} qubits")
    scale = 2.0 ** -n_qubits
    return {
        sigma: complex(scale * np.trace(dagger(pauli_string(sigma)) @ m))
        for sigma in itertools.product(range(4), repeat=n_qubits)
    }


def pauli_reconstruct(coeffs: Mapping[tuple[int, ...], complex], n_qubits: int) -> np.ndarray:
    d = 2 ** n_qubits
    out = np.zeros((d, d), dtype=complex)
    for sigma, c in coeffs.items():
        out += c * pauli_string(sigma)
    return out


def von_neumann_entropy(state) -> float:
    """Entropy in bits, with ``0 log 0 = 0``."""
    state = linalg.as_matrix(state)
    tr = complex(np.trace(state))
    if abs(tr - 1) > 1e-10:
        raise NotPSDError(f"not a density matrix: trace {tr:.12g}")
    try:
        w = linalg.eigvalsh(state)
    except ValueError as exc:
        raise NotPSDError(f"not a density matrix: {exc}") from exc
    if w[0] < -linalg.PSD_ATOL:
        raise NotPSDError(f"not a density matrix: eigenvalue {w[0]:.3e}")
    w = w[w > 0]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def erasure_channel(eps: float) -> QuantumChannel:
    """Qubit erasure channel into a qutrit; basis state ``|2>`` flags an erasure."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"erasure probability must lie in [0, 1], got {eps}")
    embed = np.zeros((3, 2), dtype=complex)
    embed[0, 0] = embed[1, 1] = 1
    flag0 = np.zeros((3, 2), dtype=complex)
    flag0[2, 0] = 1
    flag1 = np.zeros((3, 2), dtype=complex)
    flag1[2, 1] = 1
    return QuantumChannel(
        (math.sqrt(1 - eps) * embed, math.sqrt(eps) * flag0, math.sqrt(eps) * flag1)
    )


def trace_identity_sides(a, b, rho: float, n: int) -> tuple[complex, complex]:
    """Both sides of ``Tr[(A (x) B) Phi_rho^{(x) n}] = 2^{-n} Tr[Delta^{(x) n}(A) B^T]``."""
    a = linalg.as_matrix(a)
    b = linalg.as_matrix(b)
    if a.shape[0] != 2 ** n or b.shape[0] != 2 ** n:
        raise DimensionError(f"operators must act on {n} qubits")
    lhs = complex(np.trace(linalg.kron(a, b) @ isotropic_state(rho, n)))
    rhs = complex(2.0 ** -n * np.trace(depolarize(a, rho, range(n), n) @ b.T))
    return lhs, rhs
