"""Strategies for common-randomness generation and exact success evaluators.

Three models share ``n`` isotropic pairs (block layout, see
:mod:`isocr.quantum`):

* free: Alice and Bob each measure a POVM and output the outcome;
* classical: Alice's POVM has joint outcomes ``(a, pi)``; ``pi`` is sent to
  Bob, who then measures ``bob[pi]``;
* quantum: Alice applies sub-channels ``C_a`` (``2^n -> 2^t``) and sends the
  output register; Bob measures the ``(message, own half)`` system.  Bob's
  POVM elements act on ``2^t (x) 2^n`` with the message register first.

Outcome labels are bit strings.  Transposes are taken in the computational
basis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import linalg, quantum
from .errors import DimensionError, DomainError, InvalidStrategyError
from .linalg import dagger

POVM_ATOL = 1e-10
PROB_CLAMP = 1e-9


def _clamp_probability(x: float) -> float:
    if -PROB_CLAMP <= x < 0:
        return 0.0
    return x


@dataclass(frozen=True)
class Povm:
    """Outcome label -> PSD element, elements summing to the identity."""

    elements: Mapping[object, np.ndarray]

    def __post_init__(self):
        if not self.elements:
            raise InvalidStrategyError("completeness: POVM has no elements")
        els = {lab: np.array(e, dtype=complex) for lab, e in self.elements.items()}
        shapes = {e.shape for e in els.values()}
        if len(shapes) != 1:
            raise InvalidStrategyError(f"dimension: POVM elements have mixed shapes {shapes}")
        (shape,) = shapes
        if len(shape) != 2 or shape[0] != shape[1]:
            raise InvalidStrategyError(f"dimension: POVM elements must be square, got {shape}")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return next(iter(self.elements.values())).shape[0]

    @property
    def labels(self) -> list:
        return list(self.elements)

    def __getitem__(self, label) -> np.ndarray:
        return self.elements[label]

    def get(self, label) -> np.ndarray:
        """Element for ``label``, or the zero matrix when the label never occurs."""
        e = self.elements.get(label)
        return np.zeros((self.dim, self.dim), dtype=complex) if e is None else e

    def validate(self, atol: float = POVM_ATOL) -> "Povm":
        for lab, e in self.elements.items():
            if not linalg.is_hermitian(e):
                raise InvalidStrategyError(f"positivity: element {lab!r} is not Hermitian")
            lo = linalg.min_eigenvalue(e)
            if lo < -atol:
                raise InvalidStrategyError(
                    f"positivity: element {lab!r} has eigenvalue {lo:.3e}")
        total = sum(self.elements.values())
        err = float(np.max(np.abs(total - np.eye(self.dim))))
        if err > atol:
            raise InvalidStrategyError(
                f"completeness: elements sum to identity only within {err:.3e}")
        return self


@dataclass(frozen=True)
class ClassicalStrategy:
    """Alice's joint POVM over ``(a, pi)`` and Bob's POVM for each message ``pi``."""

    alice: Povm
    bob: Mapping[str, Povm]

    @property
    def messages(self) -> list[str]:
        return sorted({pi for (_, pi) in self.alice.labels} | set(self.bob))

    @property
    def t(self) -> float:
        return math.log2(max(1, len(self.messages)))

    def validate(self) -> "ClassicalStrategy":
        self.alice.validate()
        for lab in self.alice.labels:
            if not (isinstance(lab, tuple) and len(lab) == 2):
                raise InvalidStrategyError(f"labels: Alice label {lab!r} is not an (a, pi) pair")
            if lab[1] not in self.bob:
                raise InvalidStrategyError(f"messages: Bob has no measurement for message {lab[1]!r}")
        for pi, povm in self.bob.items():
            if povm.dim != self.alice.dim:
                raise InvalidStrategyError(f"dimension: Bob's POVM for {pi!r} has the wrong dim")
            try:
                povm.validate()
            except InvalidStrategyError as exc:
                raise InvalidStrategyError(f"{exc} (Bob, message {pi!r})") from None
        return self

    @classmethod
    def from_free(cls, alice: Povm, bob: Povm) -> "ClassicalStrategy":
        """Embed a free-model pair as a strategy with the single empty message."""
        return cls(Povm({(a, ""): e for a, e in alice.elements.items()}), {"": bob})


@dataclass(frozen=True)
class QuantumStrategy:
    subchannels: Mapping[str, quantum.QuantumChannel]
    bob: Povm

    @property
    def in_dim(self) -> int:
        return next(iter(self.subchannels.values())).in_dim

    @property
    def out_dim(self) -> int:
        return next(iter(self.subchannels.values())).out_dim

    def validate(self) -> "QuantumStrategy":
        if not self.subchannels:
            raise InvalidStrategyError("subchannels: strategy has no sub-channels")
        for a, c in self.subchannels.items():
            if (c.in_dim, c.out_dim) != (self.in_dim, self.out_dim):
                raise InvalidStrategyError(f"dimension: sub-channel {a!r} has mismatched dims")
            if not c.trace_nonincreasing:
                raise InvalidStrategyError(f"trace non-increasing: sub-channel {a!r} increases trace")
        total = sum(c.effect() for c in self.subchannels.values())
        err = float(np.max(np.abs(total - np.eye(self.in_dim))))
        if err > POVM_ATOL:
            raise InvalidStrategyError(
                f"trace preserving: sub-channels sum to a channel only within {err:.3e}")
        if self.bob.dim != self.in_dim * self.out_dim:
            raise InvalidStrategyError(
                f"dimension: Bob's POVM has dim {self.bob.dim}, expected {self.in_dim * self.out_dim}")
        self.bob.validate()
        return self


def _qubits(dim: int, what: str) -> int:
    n = int(round(math.log2(dim)))
    if 2 ** n != dim:
        raise DimensionError(f"{what} dimension {dim} is not a power of two")
    return n


def _check_n(dim: int, n: int):
    if dim != 2 ** n:
        raise DimensionError(f"strategy acts on dim {dim}, expected 2^{n}")


def _pair_sum_direct(pairs: Iterable[tuple[np.ndarray, np.ndarray]], rho: float, n: int) -> float:
    state = quantum.isotropic_state(rho, n)
    total = 0.0 + 0.0j
    for p, q in pairs:
        total += np.trace(linalg.kron(p, q) @ state)
    return _clamp_probability(float(total.real))


def _pair_sum_reduced(pairs: Iterable[tuple[np.ndarray, np.ndarray]], rho: float, n: int) -> float:
    total = 0.0 + 0.0j
    for p, q in pairs:
        total += np.trace(quantum.depolarize(p, rho, range(n), n) @ q.T)
    return _clamp_probability(float((2.0 ** -n * total).real))


def success_free(alice: Povm, bob: Povm, rho: float, n: int, method: str = "direct") -> float:
    """``sum_a Tr[Phi_rho^{(x)n} (P_a (x) Q_a)]``.

    ``method="reduced"`` evaluates ``2^{-n} sum_a Tr[Delta^{(x)n}(P_a) Q_a^T]``
    instead, without ever forming the ``4^n``-dimensional state.
    """
    _check_n(alice.dim, n)
    _check_n(bob.dim, n)
    pairs = [(p, bob.get(a)) for a, p in alice.elements.items()]
    return _evaluate(pairs, rho, n, method)


def _evaluate(pairs, rho, n, method):
    if method == "direct":
        return _pair_sum_direct(pairs, rho, n)
    if method == "reduced":
        return _pair_sum_reduced(pairs, rho, n)
    raise DomainError(f"unknown evaluation method {method!r}")


def success_classical(s: ClassicalStrategy, rho: float, n: int, method: str = "direct") -> float:
    """``sum_{a,pi} Tr[(P_{a,pi} (x) Q^pi_a) Phi_rho^{(x)n}]``."""
    _check_n(s.alice.dim, n)
    pairs = [(p, s.bob[pi].get(a)) for (a, pi), p in s.alice.elements.items()]
    return _evaluate(pairs, rho, n, method)


def success_quantum(s: QuantumStrategy, rho: float, n: int, t: int | None = None) -> float:
    """``sum_a Tr[(C_a (x) id)(Phi_rho^{(x)n}) Q_a]``."""
    _check_n(s.in_dim, n)
    if t is not None and s.out_dim != 2 ** t:
        raise DimensionError(f"sub-channels output dim {s.out_dim}, expected 2^{t}")
    state = quantum.isotropic_state(rho, n)
    total = 0.0 + 0.0j
    for a, c in s.subchannels.items():
        out = quantum.channel_apply(c, state, 0, [2 ** n, 2 ** n])
        total += np.trace(out @ s.bob.get(a))
    return _clamp_probability(float(total.real))


def output_distribution(strategy, n: int | None = None) -> dict:
    """Alice's output distribution ``mu(a)``; Alice's marginal is maximally mixed for every ``rho``.

    For a :class:`ClassicalStrategy` the keys are ``a`` (summed over messages).
    """
    if isinstance(strategy, QuantumStrategy):
        d = strategy.in_dim
        mixed = np.eye(d) / d
        return {a: float(np.trace(c(mixed)).real) for a, c in strategy.subchannels.items()}
    if isinstance(strategy, ClassicalStrategy):
        mu: dict = {}
        d = strategy.alice.dim
        for (a, _), p in strategy.alice.elements.items():
            mu[a] = mu.get(a, 0.0) + float(np.trace(p).real) / d
        return mu
    if isinstance(strategy, tuple) and len(strategy) == 2 and isinstance(strategy[0], Povm):
        strategy = strategy[0]
    if isinstance(strategy, Povm):
        d = strategy.dim
        return {a: float(np.trace(p).real) / d for a, p in strategy.elements.items()}
    raise TypeError(f"unsupported strategy type {type(strategy).__name__}")


def joint_distribution(s: ClassicalStrategy) -> dict:
    """Probability that Alice outputs ``a`` and sends ``pi``, keyed by ``(a, pi)``."""
    d = s.alice.dim
    return {lab: float(np.trace(p).real) / d for lab, p in s.alice.elements.items()}


def _min_entropy(mu: Mapping) -> float:
    support = [v for v in mu.values() if v > 0]
    if not support:
        raise DomainError("output distribution has empty support")
    return -math.log2(max(support))


def output_min_entropy(strategy, rho: float | None = None, n: int | None = None,
                       joint: bool = False) -> float:
    """``min_a log2(1/mu(a))`` over outcomes with ``mu(a) > 0``.

    ``joint=True`` (classical strategies only) uses the joint ``(a, pi)``
    distribution instead of Alice's output marginal.  ``rho`` and ``n`` are
    accepted for symmetry with the evaluators; Alice's local statistics do
    not depend on the noise.
    """
    if joint:
        if not isinstance(strategy, ClassicalStrategy):
            raise DomainError("joint min-entropy is defined for classical strategies only")
        return _min_entropy(joint_distribution(strategy))
    return _min_entropy(output_distribution(strategy, n))


def bit_labels(k: int) -> list[str]:
    return [format(i, f"0{k}b") if k else "" for i in range(2 ** k)]


def _basis_projector(dim: int, i: int) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=complex)
    e[i, i] = 1
    return e


def basis_povm(n: int, k: int | None = None) -> Povm:
    """Computational-basis measurement on ``n`` qubits, reporting the first ``k`` bits."""
    k = n if k is None else k
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")
    d = 2 ** n
    els = {}
    for x in range(d):
        lab = format(x, f"0{n}b")[:k]
        els[lab] = els.get(lab, 0) + _basis_projector(d, x)
    return Povm(els)


def basis_protocol(n: int) -> tuple[Povm, Povm]:
    """Both parties measure every qubit in the computational basis."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return basis_povm(n), basis_povm(n)


def full_communication_strategy(n: int) -> ClassicalStrategy:
    """Alice measures in the basis and sends her whole outcome; Bob repeats it."""
    d = 2 ** n
    labels = bit_labels(n)
    alice = Povm({(x, x): _basis_projector(d, i) for i, x in enumerate(labels)})
    bob = {}
    for x in labels:
        els = {y: np.zeros((d, d), dtype=complex) for y in labels}
        els[x] = np.eye(d, dtype=complex)
        bob[x] = Povm(els)
    return ClassicalStrategy(alice, bob)


def forward_qubit_strategy(n: int) -> QuantumStrategy:
    """Alice measures her qubits, outputs the result and forwards the collapsed qubits."""
    d = 2 ** n
    labels = bit_labels(n)
    subs = {x: quantum.QuantumChannel((_basis_projector(d, i),)) for i, x in enumerate(labels)}
    bob = Povm({x: linalg.kron(_basis_projector(d, i), np.eye(d)) for i, x in enumerate(labels)})
    return QuantumStrategy(subs, bob)


def measure_and_embed(s: ClassicalStrategy) -> QuantumStrategy:
    """Quantum-message form of a classical strategy.

    ``C_a(X) = sum_pi Tr[P_{a,pi} X] |pi><pi|`` writes the message into
    ``t`` qubits; Bob reads it in the basis and applies ``bob[pi]``.
    """
    messages = s.messages
    t = _qubits(len(messages), "message register") if len(messages) > 1 else 0
    if len(messages) != 2 ** t:
        raise InvalidStrategyError(f"messages: {len(messages)} messages do not fill {t} qubits")
    index = {pi: i for i, pi in enumerate(messages)}
    d_in = s.alice.dim
    d_msg = 2 ** t
    outcomes = sorted({a for (a, _) in s.alice.labels} | {a for p in s.bob.values() for a in p.labels})
    subs = {}
    for a in outcomes:
        kraus = []
        for (a2, pi), p in s.alice.elements.items():
            if a2 != a:
                continue
            root = linalg.psd_power(p, 0.5)
            for j in range(d_in):
                k = np.zeros((d_msg, d_in), dtype=complex)
                k[index[pi], :] = root[j, :]
                kraus.append(k)
        if not kraus:
            kraus.append(np.zeros((d_msg, d_in), dtype=complex))
        subs[a] = quantum.QuantumChannel(tuple(kraus))
    bob = {}
    for a in outcomes:
        q = np.zeros((d_msg * d_in, d_msg * d_in), dtype=complex)
        for pi in messages:
            q += linalg.kron(_basis_projector(d_msg, index[pi]), s.bob[pi].get(a))
        bob[a] = q
    return QuantumStrategy(subs, Povm(bob))


# ---------------------------------------------------------------------------
# Seesaw oracle for the communication-free model.


@dataclass
class SeesawResult:
    alice: Povm
    bob: Povm
    value: float
    history: list[float] = field(default_factory=list)
    seed: int = 0


def _objective(alice: list[np.ndarray], bob: list[np.ndarray], rho: float, n: int) -> float:
    total = 0.0
    for p, q in zip(alice, bob):
        total += float(np.trace(quantum.depolarize(p, rho, range(n), n) @ q.T).real)
    return 2.0 ** -n * total


def _solve_povm(weights: list[np.ndarray], trace_cap: float | None) -> list[np.ndarray] | None:
    """Maximize ``sum_a Re Tr[X_a W_a]`` over POVMs, optionally with ``Tr X_a <= trace_cap``."""
    import cvxpy as cp

    d = weights[0].shape[0]
    xs = [cp.Variable((d, d), hermitian=True) for _ in weights]
    cons = [x >> 0 for x in xs] + [sum(xs) == np.eye(d)]
    if trace_cap is not None:
        cons += [cp.real(cp.trace(x)) <= trace_cap for x in xs]
    w_sym = [(w + dagger(w)) / 2 for w in weights]
    obj = cp.Maximize(sum(cp.real(cp.trace(x @ w)) for x, w in zip(xs, w_sym)))
    prob = cp.Problem(obj, cons)
    try:
        with warnings.catch_warnings():
            # Inaccurate solutions are snapped onto the feasible set by _repair.
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        return None
    if prob.status not in ("optimal", "optimal_inaccurate") or any(x.value is None for x in xs):
        return None
    return [np.asarray(x.value, dtype=complex) for x in xs]


def _repair(elements: list[np.ndarray], trace_cap: float | None) -> list[np.ndarray] | None:
    """Snap an approximate solver output onto the feasible set exactly.

    Elements are projected to PSD and renormalized by ``S^{-1/2}``.  Elements
    whose trace exceeds ``trace_cap`` are scaled down by the exact ratio; the
    removed mass is handed to the remaining elements in proportion to their
    spare trace capacity, which keeps the sum equal to the identity.
    """
    from .inequalities import project_psd

    try:
        els = [project_psd(e) for e in elements]
        s_inv = linalg.psd_inverse_sqrt(sum(els))
    except ValueError:
        return None
    els = [s_inv @ e @ s_inv for e in els]
    els = [(e + dagger(e)) / 2 for e in els]
    if trace_cap is None:
        return els
    traces = [float(np.trace(e).real) for e in els]
    over = [i for i, tr in enumerate(traces) if tr > trace_cap]
    if not over:
        return els
    residual = np.zeros_like(els[0])
    for i in over:
        ratio = trace_cap / traces[i]
        residual += (1 - ratio) * els[i]
        els[i] = ratio * els[i]
    spare = {i: trace_cap - traces[i] for i in range(len(els)) if i not in over}
    total_spare = sum(spare.values())
    if total_spare <= 0:
        return None
    for i, cap in spare.items():
        els[i] = els[i] + (cap / total_spare) * residual
    if any(linalg.min_eigenvalue(e) < -POVM_ATOL for e in els):
        return None
    return els


def _seesaw_run(rho: float, n: int, k: int, iters: int, seed: int, start: str) -> SeesawResult:
    d = 2 ** n
    labels = bit_labels(k)
    cap = 2.0 ** (n - k)
    if start == "basis":
        alice = [basis_povm(n, k)[lab] for lab in labels]
        bob = [basis_povm(n, k)[lab] for lab in labels]
    else:
        from .inequalities import RandomEnsemble, sample

        bob = sample(RandomEnsemble("povm_element", d, seed), len(labels))
        alice = None
    value = _objective(alice, bob, rho, n) if alice is not None else -math.inf
    history = [] if alice is None else [value]
    for _ in range(iters):
        improved = False
        # Alice's half-step: effective operators Delta(Q_a^T) by self-adjointness.
        eff = [quantum.depolarize(q.T, rho, range(n), n) for q in bob]
        cand = _solve_povm(eff, cap)
        cand = _repair(cand, cap) if cand is not None else None
        if cand is not None:
            v = _objective(cand, bob, rho, n)
            if v > value:
                improved = improved or v - value > 1e-10
                alice, value = cand, v
        history.append(value)
        if alice is None:
            break
        eff = [quantum.depolarize(p, rho, range(n), n).T for p in alice]
        cand = _solve_povm(eff, None)
        cand = _repair(cand, None) if cand is not None else None
        if cand is not None:
            v = _objective(alice, cand, rho, n)
            if v > value:
                improved = improved or v - value > 1e-10
                bob, value = cand, v
        history.append(value)
        if not improved:
            break
    if alice is None:
        alice = [basis_povm(n, k)[lab] for lab in labels]
        value = _objective(alice, bob, rho, n)
    return SeesawResult(Povm(dict(zip(labels, alice))), Povm(dict(zip(labels, bob))),
                        value, history, seed)


def seesaw_search(rho: float, n: int, k: int, iters: int = 50, seed: int = 0,
                  restarts: int = 1) -> SeesawResult:
    """Best of ``restarts`` seesaw runs; the first starts from the basis protocol.

    Each half-step solves the exact POVM optimization for one party with the
    other fixed (a small SDP), snaps the result onto the feasible set and keeps
    it only if the agreement probability increases, so the recorded
    objective never decreases.  Alice's elements obey the min-entropy
    constraint ``2^{-n} Tr[P_a] <= 2^{-k}``.
    """
    rho = float(rho)
    if not 0 <= rho <= 1:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if not (1 <= n <= 3):
        raise DomainError(f"seesaw supports 1 <= n <= 3, got n={n}")
    if not (1 <= k <= n):
        raise DomainError(f"infeasible min-entropy target k={k} for n={n}")
    best: SeesawResult | None = None
    for r in range(max(1, restarts)):
        res = _seesaw_run(rho, n, k, iters, seed + r, "basis" if r == 0 else "random")
        if best is None or res.value > best.value:
            best = res
    return best


def seesaw_optimize(rho: float, n: int, k: int, iters: int = 50, seed: int = 0,
                    restarts: int = 1) -> tuple[Povm, Povm, float]:
    res = seesaw_search(rho, n, k, iters, seed, restarts)
    return res.alice, res.bob, res.value
