"""Numerical falsification harness for the matrix inequalities.

Every ``check_*`` function evaluates both sides of one inequality on a
concrete input and returns a :class:`SlackReport` with ``slack = rhs - lhs``.
A negative slack beyond float noise (``SLACK_TOL``) is a counterexample.

Random inputs come from :func:`sample`, which draws from numpy's PCG64
generator seeded by ``(kind, dim, seed)`` so that any witness can be
regenerated bit for bit.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import linalg, quantum
from .errors import DimensionError, DomainError, IsocrError
from .linalg import INF, dagger
from .serialize import matrix_to_json

SLACK_TOL = 1e-9
ENSEMBLE_KINDS = ("ginibre", "psd", "hermitian", "povm_element", "density")


@dataclass
class SlackReport:
    lhs: float
    rhs: float
    params: dict[str, Any] = field(default_factory=dict)
    witness: np.ndarray | None = None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def ok(self, tol: float = SLACK_TOL) -> bool:
        return math.isfinite(self.slack) and self.slack >= -tol

    def to_dict(self, with_witness: bool = True) -> dict[str, Any]:
        d = {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "params": dict(self.params)}
        if with_witness and self.witness is not None:
            d["witness"] = matrix_to_json(self.witness)
        return d


@dataclass(frozen=True)
class RandomEnsemble:
    kind: str
    dim: int
    seed: int

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise DomainError(f"unknown ensemble kind {self.kind!r}; expected one of {ENSEMBLE_KINDS}")
        if self.dim < 1:
            raise DimensionError(f"ensemble dim must be positive, got {self.dim}")

    def generator(self) -> np.random.Generator:
        # Mix the kind and dim into the seed so different ensembles sharing a
        # seed do not share a stream.
        tag = zlib.crc32(f"{self.kind}:{self.dim}".encode())
        return np.random.Generator(np.random.PCG64([self.seed & (2 ** 64 - 1), tag]))


def ginibre(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussians (unit variance per entry)."""
    g = rng.standard_normal((dim, dim, 2))
    return (g[..., 0] + 1j * g[..., 1]) / math.sqrt(2)


def sample(ensemble: RandomEnsemble, count: int) -> list[np.ndarray]:
    """Draw ``count`` matrices of the ensemble's kind.

    ``psd`` returns ``G^dagger G`` without normalization, ``density`` divides
    that by its trace, and ``povm_element`` returns the ``count`` elements of
    one random POVM ``S^{-1/2} W_i S^{-1/2}`` with ``S = sum_i W_i``.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    rng = ensemble.generator()
    d = ensemble.dim
    kind = ensemble.kind
    gs = [ginibre(rng, d) for _ in range(count)]
    if kind == "ginibre":
        return gs
    if kind == "hermitian":
        return [(g + dagger(g)) / 2 for g in gs]
    psd = [dagger(g) @ g for g in gs]
    if kind == "psd":
        return psd
    if kind == "density":
        return [w / np.trace(w).real for w in psd]
    s_inv = linalg.psd_inverse_sqrt(sum(psd))
    out = []
    for w in psd:
        p = s_inv @ w @ s_inv
        out.append((p + dagger(p)) / 2)
    return out


def hypercontractive_rho(p: float, q: float) -> float:
    """Largest admissible noise parameter ``sqrt((p-1)/(q-1))``; 1 when ``p == q``."""
    if p == q:
        return 1.0
    return math.sqrt((p - 1) / (q - 1))


def check_hypercontractivity(a, rho: float, p: float, q: float, n: int, m: int = 0,
                             *, rho_offset: float = 0.0) -> SlackReport:
    """``2^{-n/q} ||(Delta^{(x)n} (x) id_{2^m})(A)||_q <= 2^{-n/p} ||A||_p``.

    ``rho_offset`` perturbs the noise actually applied (not the one checked
    for admissibility); it exists only to exercise failure reporting.
    """
    a = linalg.as_matrix(a)
    p, q = float(p), float(q)
    if not (1 <= p <= q < INF):
        raise DomainError(f"need 1 <= p <= q < inf, got p={p}, q={q}")
    if rho < 0 or rho > 1 or rho > hypercontractive_rho(p, q) + 1e-12:
        raise DomainError(
            f"rho={rho} outside [0, sqrt((p-1)/(q-1))] = [0, {hypercontractive_rho(p, q):.12g}]"
        )
    if n < 1 or m < 0 or a.shape[0] != 2 ** (n + m):
        raise DimensionError(f"matrix of dim {a.shape[0]} does not live on n+m={n + m} qubits")
    applied = min(1.0, max(0.0, rho + rho_offset))
    out = quantum.depolarize(a, applied, range(n), n + m)
    lhs = 2.0 ** (-n / q) * linalg.schatten_norm(out, q)
    rhs = 2.0 ** (-n / p) * linalg.schatten_norm(a, p)
    params = {"p": p, "q": q, "rho": rho, "n": n, "m": m}
    if rho_offset:
        params["rho_offset"] = rho_offset
    return SlackReport(lhs, rhs, params, a)


def check_holder_sequences(as_: Sequence, bs: Sequence, q: float) -> SlackReport:
    """``Re Tr[sum_i A_i B_i] <= (Tr sum |A_i|^p)^{1/p} (Tr sum |B_i|^q)^{1/q}``, ``1/p + 1/q = 1``."""
    if len(as_) != len(bs) or not as_:
        raise DimensionError(f"sequences must be non-empty and equal length ({len(as_)} vs {len(bs)})")
    q = float(q)
    if q <= 1:
        raise DomainError(f"Holder exponent q must exceed 1, got {q}")
    p = q / (q - 1)
    as_ = [linalg.as_matrix(x) for x in as_]
    bs = [linalg.as_matrix(x) for x in bs]
    tr = complex(sum(np.trace(x @ y) for x, y in zip(as_, bs)))
    lhs = tr.real
    if all(linalg.is_psd(x) for x in as_ + bs):
        if abs(tr.imag) > 1e-10 * max(1.0, abs(lhs)):
            raise IsocrError(f"trace of PSD products has imaginary part {tr.imag:.3e}")
    ta = sum(linalg.abs_power_trace(x, p) for x in as_)
    tb = sum(linalg.abs_power_trace(y, q) for y in bs)
    rhs = ta ** (1 / p) * tb ** (1 / q)
    return SlackReport(lhs, rhs, {"p": p, "q": q, "length": len(as_)}, as_[0])


def check_partial_trace_norm(m, p: float, dims: tuple[int, int]) -> SlackReport:
    """``||Tr_B M||_p <= dim(B)^{(p-1)/p} ||M||_p`` for ``M`` on ``A (x) B``."""
    m = linalg.as_matrix(m)
    da, db = (int(d) for d in dims)
    reduced = linalg.partial_trace(m, [da, db], {0})
    lhs = linalg.schatten_norm(reduced, p)
    factor = float(db) if p == INF else db ** ((p - 1) / p)
    rhs = factor * linalg.schatten_norm(m, p)
    return SlackReport(lhs, rhs, {"p": p, "dims": [da, db]}, m)


def check_spectral_power(m, q: float) -> SlackReport:
    """``||M||_q^q <= ||M||_inf^{q-1} ||M||_1``."""
    q = float(q)
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    m = linalg.as_matrix(m)
    s = linalg.singular_values(m)
    lhs = float(np.sum(s ** q))
    rhs = float(s[0]) ** (q - 1) * float(np.sum(s))
    return SlackReport(lhs, rhs, {"q": q}, m)


def check_epr_channel_norm(c: quantum.QuantumChannel, n: int) -> SlackReport:
    """``||(C (x) id)(Phi^{(x)n})||_inf <= 2^{t-n}`` for ``C: 2^n -> 2^t``."""
    if c.in_dim != 2 ** n:
        raise DimensionError(f"channel input dim {c.in_dim} is not 2^{n}")
    t = math.log2(c.out_dim)
    if t != int(t):
        raise DimensionError(f"channel output dim {c.out_dim} is not a power of two")
    if not c.trace_nonincreasing:
        raise DomainError("channel must be trace non-increasing")
    out = quantum.channel_apply(c, quantum.epr_state(n), 0, [2 ** n, 2 ** n])
    lhs = linalg.spectral_norm(out)
    rhs = 2.0 ** (int(t) - n)
    witness = np.concatenate(c.kraus, axis=0)
    return SlackReport(lhs, rhs, {"n": n, "t": int(t), "kraus": len(c.kraus)}, witness)


def check_trace_identity(a, b, rho: float, n: int) -> SlackReport:
    """Equality check; ``slack = -|lhs - rhs|`` so only zero slack is clean."""
    lhs, rhs = quantum.trace_identity_sides(a, b, rho, n)
    diff = abs(lhs - rhs)
    return SlackReport(lhs.real, lhs.real - diff, {"rho": rho, "n": n,
                       "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag]},
                       linalg.kron(a, b))


def random_channel(rng: np.random.Generator, in_dim: int, out_dim: int, n_kraus: int) -> quantum.QuantumChannel:
    """Trace-preserving channel cut from a random isometry ``in -> out (x) env``.

    The isometry is the Q factor of a complex Gaussian matrix; its row blocks
    of height ``out_dim`` are the Kraus operators.
    """
    g = ginibre(rng, out_dim * n_kraus)[:, :in_dim]
    v, r = np.linalg.qr(g)
    v = v * (np.diag(r) / np.abs(np.diag(r)))
    return quantum.QuantumChannel(tuple(v[i * out_dim:(i + 1) * out_dim, :] for i in range(n_kraus)))


def extremal_search(check: Callable[[np.ndarray], SlackReport], start, *,
                    iters: int = 200, step: float = 0.1, decay: float = 0.9,
                    project: Callable[[np.ndarray], np.ndarray] | None = None,
                    seed: int = 0) -> SlackReport:
    """Greedy hill-climb towards smaller slack.

    Each iteration perturbs the current point by a complex Gaussian matrix of
    scale ``step`` (relative to the point's Frobenius norm), keeps the move
    when the slack decreases, and multiplies ``step`` by ``decay``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.asarray(start, dtype=complex)
    if project is not None:
        x = project(x)
    best = check(x)
    for _ in range(iters):
        scale = step * max(1e-300, float(np.linalg.norm(x)))
        y = x + scale * ginibre(rng, x.shape[0])
        if project is not None:
            y = project(y)
        r = check(y)
        if r.slack < best.slack:
            x, best = y, r
        step *= decay
    return best


def project_psd(m) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues dropped)."""
    h = (m + dagger(m)) / 2
    e = linalg.hermitian_eig(h)
    w = np.clip(e.eigenvalues, 0.0, None)
    return (e.eigenvectors * w) @ dagger(e.eigenvectors)
