"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` and shape
``(dim, dim)``.  Every function here is pure: inputs are never modified.

The Hermitian eigensolver is a cyclic complex Jacobi iteration.  It is slow
compared to LAPACK but needs nothing beyond elementwise arithmetic, and is
accurate to a few ulps on the small (dim <= 64) operators this package
handles.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, NotHermitianError, NotPSDError

INF = math.inf
"""Sentinel exponent selecting the spectral (operator) norm."""

HERMITIAN_RTOL = 1e-12
PSD_ATOL = 1e-10
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 100

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a square complex128 array, raising on bad shapes."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors: Iterable) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    return reduce(kron, factors, np.ones((1, 1), dtype=complex))


def is_hermitian(m, rtol: float = HERMITIAN_RTOL) -> bool:
    a = np.asarray(m)
    return bool(np.max(np.abs(a - dagger(a))) <= rtol * max(1.0, float(np.max(np.abs(a)))))


def hermitize(m, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Return ``(m + m^dagger) / 2`` after checking ``m`` is Hermitian within ``rtol``.

    The asymmetry is measured entrywise relative to ``max(1, max|m_ij|)``.
    """
    a = as_matrix(m)
    asym = float(np.max(np.abs(a - dagger(a))))
    scale = max(1.0, float(np.max(np.abs(a))))
    if asym > rtol * scale:
        raise NotHermitianError(
            f"matrix is not Hermitian: max|M - M^dagger| = {asym:.3e} (scale {scale:.3e})"
        )
    return (a + dagger(a)) / 2


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor of ``m`` not listed in ``keep``.

    ``dims`` lists the factor dimensions in Kronecker order, so
    ``partial_trace(kron(a, b), [da, db], {0})`` equals ``trace(b) * a``.
    """
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    if any(d < 1 for d in dims) or math.prod(dims) != a.shape[0]:
        raise DimensionError(f"factor dims {dims} do not factor a {a.shape[0]}-dim matrix")
    if not keep:
        raise DimensionError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} factors")
    k = len(dims)
    letters = string.ascii_letters
    if 2 * k > len(letters):
        raise DimensionError("too many tensor factors")
    rows = list(letters[:k])
    cols = list(letters[k:2 * k])
    for i in range(k):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, a.reshape(dims + dims))
    d = math.prod(dims[i] for i in keep)
    return t.reshape(d, d)


def permute_factors(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: factor ``perm[i]`` of the input becomes factor ``i``."""
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    if math.prod(dims) != a.shape[0] or sorted(perm) != list(range(len(dims))):
        raise DimensionError(f"bad factor permutation {perm} for dims {dims}")
    k = len(dims)
    t = a.reshape(dims + dims).transpose(list(perm) + [k + p for p in perm])
    return t.reshape(a.shape)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(m) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a_pq`` with a
    diagonal unitary, then applies the classical real symmetric rotation.
    Sweeps continue until the off-diagonal Frobenius mass drops below
    ``1e-13 * ||m||_F`` or 100 sweeps have run.
    """
    a = hermitize(m).copy()
    dim = a.shape[0]
    v = np.eye(dim, dtype=complex)
    fro = float(np.linalg.norm(a))
    target = JACOBI_RTOL * fro
    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS and _offdiag_norm(a) > target:
        sweeps += 1
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0 or mag < 1e-300:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # J = D R with D = diag(1, conj(phase)) on (p, q).
                j2 = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j2
                a[idx, :] = dagger(j2) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ j2
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweeps)


def eigvalsh(m) -> np.ndarray:
    return hermitian_eig(m).eigenvalues


def singular_values(m) -> np.ndarray:
    """Singular values, descending.  Hermitian inputs use ``|eig(m)|`` directly."""
    a = as_matrix(m)
    if is_hermitian(a):
        return np.sort(np.abs(eigvalsh(a)))[::-1]
    w = eigvalsh(dagger(a) @ a)
    return np.sqrt(np.clip(w, 0.0, None))[::-1]


def schatten_norm(m, p: float) -> float:
    """Schatten p-norm ``(sum_i s_i^p)^(1/p)``; ``p=INF`` gives the spectral norm."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {p}")
    s = singular_values(m)
    smax = float(s[0]) if s.size else 0.0
    if p == INF:
        return smax
    if smax == 0.0:
        return 0.0
    # Factor out the largest value so s^p cannot overflow.
    return smax * float(np.sum((s / smax) ** p)) ** (1.0 / p)


def trace_norm(m) -> float:
    return schatten_norm(m, 1)


def spectral_norm(m) -> float:
    return schatten_norm(m, INF)


def _clamped_spectrum(m) -> EigenDecomposition:
    e = hermitian_eig(m)
    lo = float(e.eigenvalues[0])
    if lo < -PSD_ATOL:
        raise NotPSDError(f"matrix has eigenvalue {lo:.3e} < -{PSD_ATOL:g}")
    return EigenDecomposition(np.clip(e.eigenvalues, 0.0, None), e.eigenvectors, e.sweeps)


def psd_power(m, p: float) -> np.ndarray:
    """``m ** p`` for a PSD matrix; eigenvalues in ``[-1e-10, 0)`` are clamped to 0."""
    if p < 0 or math.isnan(p):
        raise DomainError(f"psd_power needs p >= 0, got {p}")
    e = _clamped_spectrum(m)
    w = e.eigenvalues if p == 1 else np.power(e.eigenvalues, p)
    if p == 0:
        w = np.ones_like(w)
    v = e.eigenvectors
    return (v * w) @ dagger(v)


def psd_inverse_sqrt(m) -> np.ndarray:
    """``m ** -1/2`` for a positive definite matrix."""
    e = _clamped_spectrum(m)
    if float(e.eigenvalues[0]) <= 0.0:
        raise NotPSDError("matrix is singular; inverse square root undefined")
    v = e.eigenvectors
    return (v / np.sqrt(e.eigenvalues)) @ dagger(v)


def abs_power_trace(m, p: float) -> float:
    """``Tr[|m|^p]`` where ``|m| = sqrt(m^dagger m)``."""
    s = singular_values(m)
    return float(np.sum(s ** p))


def min_eigenvalue(m) -> float:
    return float(eigvalsh(m)[0])


def is_psd(m, atol: float = PSD_ATOL) -> bool:
    try:
        return min_eigenvalue(m) >= -atol
    except NotHermitianError:
        return False


def transpose(m) -> np.ndarray:
    """Transpose in the computational basis (no conjugation)."""
    return np.asarray(m).T.copy()
