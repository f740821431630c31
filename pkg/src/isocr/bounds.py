"""Closed-form communication bounds and rates, with numeric cross-checks.

The two communication lower bounds come from one-parameter families
indexed by ``delta > 0`` (with ``q = 1 + delta`` and ``p = 1 + rho^2 delta``);
the closed forms are their suprema.  The ``*_sweep`` functions recompute
each supremum by direct numerical maximization over ``log(delta)`` so the
two routes can be compared.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from scipy.optimize import bisect, minimize_scalar

from . import quantum
from .errors import DomainError
from .serialize import fmt

MODELS = ("free", "classical", "quantum", "capacity", "superdense")
LOG_DELTA_MIN = math.log(1e-9)
LOG_DELTA_MAX = math.log(1e9)
GAMMA_LIMIT = 1e-12


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    return rho


def _check_gamma_k(gamma: float, k: float) -> tuple[float, float]:
    gamma, k = float(gamma), float(k)
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return gamma, k


def bound_free(rho: float, k: float) -> float:
    """Largest agreement probability without communication: ``2^{-k(1-rho)/(1+rho)}``."""
    rho = _check_rho(rho)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return 2.0 ** (-k * (1 - rho) / (1 + rho))


def bound_classical_lb(rho: float, gamma: float, k: float) -> float:
    """Bits of one-way classical communication needed, clamped at 0."""
    rho = _check_rho(rho)
    gamma, k = _check_gamma_k(gamma, k)
    c = 1 - rho * rho
    return max(0.0, (c * (1 - gamma) - 2 * math.sqrt(c * (1 - c) * gamma)) * k)


def bound_quantum_lb(rho: float, gamma: float, k: float) -> float:
    """Qubits of one-way quantum communication needed, clamped at 0."""
    rho = _check_rho(rho)
    gamma, k = _check_gamma_k(gamma, k)
    c = (1 - rho * rho) / (1 + rho * rho)
    val = c - c * c * gamma - math.sqrt(c * (1 - c * c) * (2 - c * gamma) * gamma)
    return max(0.0, val * k)


def classical_delta_objective(rho: float, gamma: float, delta: float) -> float:
    """Per-``k`` lower bound on ``t`` obtained from one choice of ``delta``."""
    c = 1 - rho * rho
    return c / (1 + (1 - c) * delta) - gamma / delta - gamma


def quantum_delta_objective(rho: float, gamma: float, delta: float) -> float:
    r2 = rho * rho
    num = (1 - r2) * delta - gamma * (1 + delta + r2 * delta + r2 * delta * delta)
    return num / ((1 + r2) * delta + 2 * r2 * delta * delta)


def classical_delta_limit(rho: float, gamma: float) -> float:
    """Objective as ``delta -> inf``."""
    return (1 - gamma) if rho == 0 else -gamma


def quantum_delta_limit(rho: float, gamma: float) -> float:
    return (1 - gamma) if rho == 0 else -gamma / 2


def _sup_over_delta(f: Callable[[float], float], limit: float) -> float:
    """Supremum of ``f`` over ``delta`` in ``[1e-9, 1e9]`` together with its ``delta -> inf`` limit."""
    g = lambda u: -f(math.exp(u))
    # Coarse scan picks the bracket, bounded Brent refines inside it.
    grid = [LOG_DELTA_MIN + (LOG_DELTA_MAX - LOG_DELTA_MIN) * i / 400 for i in range(401)]
    vals = [g(u) for u in grid]
    i = min(range(len(vals)), key=vals.__getitem__)
    lo = grid[max(0, i - 1)]
    hi = grid[min(len(grid) - 1, i + 1)]
    res = minimize_scalar(g, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12, "maxiter": 500})
    best = max(-float(res.fun), -vals[i], f(math.exp(LOG_DELTA_MAX)), limit)
    return best


def bound_classical_sweep(rho: float, gamma: float, k: float) -> float:
    """Numerical supremum over ``delta`` of :func:`classical_delta_objective`, clamped at 0."""
    rho = _check_rho(rho)
    gamma, k = _check_gamma_k(gamma, k)
    best = _sup_over_delta(lambda d: classical_delta_objective(rho, gamma, d),
                           classical_delta_limit(rho, gamma))
    return max(0.0, best * k)


def bound_quantum_sweep(rho: float, gamma: float, k: float) -> float:
    rho = _check_rho(rho)
    gamma, k = _check_gamma_k(gamma, k)
    best = _sup_over_delta(lambda d: quantum_delta_objective(rho, gamma, d),
                           quantum_delta_limit(rho, gamma))
    return max(0.0, best * k)


def _holder_pair(rho: float, delta: float) -> tuple[float, float]:
    return 1 + delta, 1 + rho * rho * delta


def classical_success_bound(rho: float, k: float, t: float, delta: float) -> float:
    """``2^{t/q* - k(q-p)/(qp)}`` for one ``delta``; minimizing over ``delta`` gives the ceiling."""
    q, p = _holder_pair(rho, delta)
    q_star = q / (q - 1)
    return 2.0 ** (t / q_star - k * (q - p) / (q * p))


def quantum_success_bound(rho: float, k: float, t: float, delta: float) -> float:
    """``2^{t/q* + t/p* - k(q-p)/(pq)}`` for one ``delta``."""
    q, p = _holder_pair(rho, delta)
    inv_q_star = (q - 1) / q
    inv_p_star = (p - 1) / p
    return 2.0 ** (t * inv_q_star + t * inv_p_star - k * (q - p) / (q * p))


def _best_success_bound(f: Callable[[float], float]) -> float:
    g = lambda u: math.log2(f(math.exp(u)))
    grid = [LOG_DELTA_MIN + (LOG_DELTA_MAX - LOG_DELTA_MIN) * i / 400 for i in range(401)]
    vals = [g(u) for u in grid]
    i = min(range(len(vals)), key=vals.__getitem__)
    res = minimize_scalar(g, bounds=(grid[max(0, i - 1)], grid[min(400, i + 1)]),
                          method="bounded", options={"xatol": 1e-12, "maxiter": 500})
    return min(1.0, 2.0 ** min(float(res.fun), vals[i]))


def best_classical_success_bound(rho: float, k: float, t: float) -> float:
    """Smallest success-probability ceiling over ``delta`` for ``t`` message bits."""
    rho = _check_rho(rho)
    return _best_success_bound(lambda d: classical_success_bound(rho, k, t, d))


def best_quantum_success_bound(rho: float, k: float, t: float) -> float:
    """Smallest success-probability ceiling over ``delta`` for ``t`` message qubits."""
    rho = _check_rho(rho)
    return _best_success_bound(lambda d: quantum_success_bound(rho, k, t, d))


def superdense_rate(rho: float) -> float:
    """``2 - H(Phi_rho)`` bits per qubit; negative values are returned as is."""
    rho = _check_rho(rho)
    return 2.0 - quantum.von_neumann_entropy(quantum.isotropic_state(rho, 1))


def superdense_rate_closed(rho: float) -> float:
    """Same rate from the closed-form isotropic spectrum (no eigensolver)."""
    rho = _check_rho(rho)
    h = 0.0
    for w in quantum.isotropic_eigenvalues(rho):
        if w > 0:
            h -= w * math.log2(w)
    return 2.0 - h


def superdense_threshold(tol: float = 1e-10) -> float:
    """The ``rho`` at which the superdense rate crosses one bit per qubit."""
    return bisect(lambda r: superdense_rate_closed(r) - 1.0, 0.0, 1.0, xtol=tol, maxiter=200)


def achievable_quantum_rate(rho: float) -> float:
    """Qubits per bit of min-entropy of the superdense-boosted classical protocol."""
    rho = _check_rho(rho)
    return (1 - rho * rho) / max(1.0, superdense_rate(rho))


def capacity_upper(rho: float) -> float:
    """Ceiling on the noisy-entanglement-assisted classical capacity: ``1 + rho^2``."""
    rho = _check_rho(rho)
    return 1 + rho * rho


@dataclass
class BoundCurve:
    model: str
    samples: list[tuple[float, float | None, float]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def rows(self) -> list[list[str]]:
        return [[self.model, fmt(r), "" if g is None else fmt(g), fmt(v)]
                for r, g, v in self.samples]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["model", "rho", "gamma", "value"])
        w.writerows(self.rows())
        return buf.getvalue()

    def records(self) -> list[dict[str, Any]]:
        return [{"model": self.model, "rho": float(fmt(r)),
                 "gamma": None if g is None else float(fmt(g)), "value": float(fmt(v))}
                for r, g, v in self.samples]

    def to_json(self) -> str:
        doc = {"meta": dict(self.meta, model=self.model), "rows": self.records()}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def bound_curve(model: str, rhos: Sequence[float], gammas: Sequence[float] | None = None,
                k: float = 1.0) -> BoundCurve:
    """Evaluate one model on a grid, ``rho`` ascending within each ``gamma`` slice.

    ``free`` reports the success-probability ceiling at min-entropy ``k``;
    ``classical`` and ``quantum`` report the communication lower bound for
    ``k`` bits; ``capacity`` and ``superdense`` ignore ``gamma`` and ``k``.
    """
    if model not in MODELS:
        raise DomainError(f"unknown model {model!r}; expected one of {MODELS}")
    rhos = sorted(float(r) for r in rhos)
    meta: dict[str, Any] = {"rho": rhos}
    samples: list[tuple[float, float | None, float]] = []
    if model in ("classical", "quantum"):
        if not gammas:
            raise DomainError(f"model {model!r} needs at least one gamma")
        f = bound_classical_lb if model == "classical" else bound_quantum_lb
        meta.update(gamma=[float(g) for g in gammas], k=k)
        for g in gammas:
            for r in rhos:
                samples.append((r, float(g), f(r, float(g), k)))
    elif model == "free":
        meta.update(k=k)
        samples = [(r, None, bound_free(r, k)) for r in rhos]
    elif model == "capacity":
        samples = [(r, None, capacity_upper(r)) for r in rhos]
    else:
        samples = [(r, None, superdense_rate(r)) for r in rhos]
    return BoundCurve(model, samples, meta)
