"""Seeded verification suites built on :mod:`isocr.inequalities`.

A suite draws ``trials`` random inputs, cycling through a fixed grid of
parameter cases, and reduces the resulting slacks with ``min``.  Each suite
also evaluates a few deterministic inputs where the inequality is known to
be tight and reports the largest ``|slack|`` among them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

import numpy as np

from . import linalg, quantum
from .inequalities import (
    SLACK_TOL,
    RandomEnsemble,
    SlackReport,
    check_epr_channel_norm,
    check_holder_sequences,
    check_hypercontractivity,
    check_partial_trace_norm,
    check_spectral_power,
    check_trace_identity,
    hypercontractive_rho,
    random_channel,
    sample,
)

SUITES = ("hypercontractivity", "holder", "partial-trace", "spectral-power", "epr-channel",
          "trace-identity")
EQUALITY_TOL = 1e-10
MAX_FAILURES_REPORTED = 5


@dataclass(frozen=True)
class SuiteConfig:
    trials: int = 200
    seed: int = 1
    tolerance: float = SLACK_TOL
    hc_sizes: tuple[int, ...] = (1, 2, 3)
    hc_p: tuple[float, ...] = (1.0, 1.5, 2.0)
    hc_q: tuple[float, ...] = (2.0, 3.0, 4.0)
    holder_q: tuple[float, ...] = (1.5, 2.0, 3.0)
    holder_lengths: tuple[int, ...] = (1, 2, 3, 4)
    pt_dims: tuple[tuple[int, int], ...] = ((2, 2), (2, 4), (4, 2), (3, 2))
    pt_p: tuple[float, ...] = (1.0, 2.0, 3.0)
    sp_q: tuple[float, ...] = (1.5, 2.0, 4.0)
    sp_dims: tuple[int, ...] = (2, 3, 4, 8)
    ti_n: tuple[int, ...] = (1, 2)
    ti_rho: tuple[float, ...] = (0.0, 0.3, 0.7, 1.0)
    epr_n: tuple[int, ...] = (1, 2)
    # Test hook: shifts the noise parameter actually applied by the
    # hypercontractivity suite, which should then report violations.
    tamper: float = 0.0


@dataclass
class SuiteResult:
    name: str
    trials: int
    tolerance: float
    min_slack: float
    worst: SlackReport | None
    failures: list[SlackReport] = field(default_factory=list)
    failure_count: int = 0
    equality_max_abs_slack: float | None = None

    @property
    def passed(self) -> bool:
        ok = self.failure_count == 0 and self.min_slack >= -self.tolerance
        if self.equality_max_abs_slack is not None:
            ok = ok and self.equality_max_abs_slack <= EQUALITY_TOL
        return ok

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "min_slack": self.min_slack,
            "equality_max_abs_slack": self.equality_max_abs_slack,
            "failure_count": self.failure_count,
            "worst": self.worst.to_dict(with_witness=False) if self.worst else None,
            "failures": [f.to_dict() for f in self.failures],
        }


def trial_seed(seed: int, suite: str, index: int) -> int:
    base = sum((i + 1) * ord(ch) for i, ch in enumerate(suite))
    return (seed * 0x9E3779B97F4A7C15 + base * 0x100000001B3 + index) % 2 ** 64


def _draw(kind: str, dim: int, seed: int, count: int = 1) -> list[np.ndarray]:
    return sample(RandomEnsemble(kind, dim, seed), count)


def _hypercontractivity(cfg: SuiteConfig) -> Iterator[SlackReport]:
    cases = [
        (n, total - n, p, q)
        for total in cfg.hc_sizes
        for n in range(1, total + 1)
        for p in cfg.hc_p
        for q in cfg.hc_q
        if p <= q
    ]
    for i in range(cfg.trials):
        n, m, p, q = cases[i % len(cases)]
        kind = ("psd", "hermitian")[(i // len(cases)) % 2]
        (a,) = _draw(kind, 2 ** (n + m), trial_seed(cfg.seed, "hypercontractivity", i))
        r = check_hypercontractivity(a, hypercontractive_rho(p, q), p, q, n, m,
                                     rho_offset=cfg.tamper)
        r.params.update(kind=kind, trial=i, seed=cfg.seed)
        yield r


def _hypercontractivity_equalities(cfg: SuiteConfig) -> Iterator[SlackReport]:
    for total in cfg.hc_sizes:
        for p, q in itertools.product(cfg.hc_p, cfg.hc_q):
            if p <= q:
                yield check_hypercontractivity(np.eye(2 ** total), hypercontractive_rho(p, q),
                                               p, q, total, 0, rho_offset=cfg.tamper)


def _holder(cfg: SuiteConfig) -> Iterator[SlackReport]:
    cases = list(itertools.product(cfg.holder_lengths, cfg.holder_q, (2, 4), ("psd", "ginibre")))
    for i in range(cfg.trials):
        length, q, dim, kind = cases[i % len(cases)]
        s = trial_seed(cfg.seed, "holder", i)
        as_ = _draw(kind, dim, s, length)
        bs = _draw(kind, dim, s + 2 ** 32, length)
        r = check_holder_sequences(as_, bs, q)
        r.params.update(kind=kind, dim=dim, trial=i, seed=cfg.seed)
        yield r


def _holder_equalities(cfg: SuiteConfig) -> Iterator[SlackReport]:
    yield check_holder_sequences([np.eye(2)], [np.eye(2)], 2.0)
    for i in range(4):
        xs = _draw("psd", 3, trial_seed(cfg.seed, "holder-eq", i), 4)
        yield check_holder_sequences(xs, xs, 2.0)


def _partial_trace(cfg: SuiteConfig) -> Iterator[SlackReport]:
    cases = list(itertools.product(cfg.pt_dims, cfg.pt_p))
    for i in range(cfg.trials):
        dims, p = cases[i % len(cases)]
        kind = ("hermitian", "psd", "ginibre")[(i // len(cases)) % 3]
        (m,) = _draw(kind, dims[0] * dims[1], trial_seed(cfg.seed, "partial-trace", i))
        r = check_partial_trace_norm(m, p, dims)
        r.params.update(kind=kind, trial=i, seed=cfg.seed)
        yield r


def _partial_trace_equalities(cfg: SuiteConfig) -> Iterator[SlackReport]:
    yield check_partial_trace_norm(np.eye(4), 1.0, (2, 2))
    yield check_partial_trace_norm(quantum.epr_state(1), 1.0, (2, 2))
    for p in cfg.pt_p:
        # I_A (x) I_B is tight for every p.
        yield check_partial_trace_norm(np.eye(8), p, (2, 4))


def _spectral_power(cfg: SuiteConfig) -> Iterator[SlackReport]:
    cases = list(itertools.product(cfg.sp_dims, cfg.sp_q))
    for i in range(cfg.trials):
        dim, q = cases[i % len(cases)]
        kind = ("hermitian", "ginibre", "psd")[(i // len(cases)) % 3]
        (m,) = _draw(kind, dim, trial_seed(cfg.seed, "spectral-power", i))
        r = check_spectral_power(m, q)
        r.params.update(kind=kind, dim=dim, trial=i, seed=cfg.seed)
        yield r


def _spectral_power_equalities(cfg: SuiteConfig) -> Iterator[SlackReport]:
    for d in cfg.sp_dims:
        for q in cfg.sp_q:
            yield check_spectral_power(np.eye(d), q)
    yield check_spectral_power(np.diag([2.0, 0.0]), 2.0)


def _epr_channel(cfg: SuiteConfig) -> Iterator[SlackReport]:
    cases = [(n, t) for n in cfg.epr_n for t in range(0, n + 1)]
    for i in range(cfg.trials):
        n, t = cases[i % len(cases)]
        rng = RandomEnsemble("ginibre", 2 ** n, trial_seed(cfg.seed, "epr-channel", i)).generator()
        n_kraus = 1 + int(rng.integers(0, 4))
        while 2 ** t * n_kraus < 2 ** n:
            n_kraus += 1
        c = random_channel(rng, 2 ** n, 2 ** t, n_kraus)
        sub = (i // len(cases)) % 2 == 1
        if sub:
            # Keep only a random subset of Kraus operators: a sub-channel.
            keep = max(1, int(rng.integers(1, n_kraus + 1)))
            c = quantum.QuantumChannel(c.kraus[:keep])
        r = check_epr_channel_norm(c, n)
        r.params.update(subchannel=sub, trial=i, seed=cfg.seed)
        yield r


def _epr_channel_equalities(cfg: SuiteConfig) -> Iterator[SlackReport]:
    for n in cfg.epr_n:
        yield check_epr_channel_norm(quantum.identity_channel(2 ** n), n)
        yield check_epr_channel_norm(quantum.trace_channel(2 ** n), n)


def _trace_identity(cfg: SuiteConfig) -> Iterator[SlackReport]:
    cases = list(itertools.product(cfg.ti_n, cfg.ti_rho))
    for i in range(cfg.trials):
        n, rho = cases[i % len(cases)]
        s = trial_seed(cfg.seed, "trace-identity", i)
        (a,) = _draw("ginibre", 2 ** n, s)
        (b,) = _draw("ginibre", 2 ** n, s + 2 ** 32)
        r = check_trace_identity(a, b, rho, n)
        r.params.update(trial=i, seed=cfg.seed)
        yield r


_RUNNERS: dict[str, tuple[Callable, Callable | None, Callable[[SuiteConfig], float]]] = {
    "hypercontractivity": (_hypercontractivity, _hypercontractivity_equalities, lambda c: c.tolerance),
    "holder": (_holder, _holder_equalities, lambda c: c.tolerance),
    "partial-trace": (_partial_trace, _partial_trace_equalities, lambda c: c.tolerance),
    "spectral-power": (_spectral_power, _spectral_power_equalities, lambda c: c.tolerance),
    "epr-channel": (_epr_channel, _epr_channel_equalities, lambda c: c.tolerance),
    # Both sides of an identity must agree to 1e-10 regardless of the slack tolerance.
    "trace-identity": (_trace_identity, None, lambda c: min(c.tolerance, EQUALITY_TOL)),
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> SuiteResult:
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
    cfg = cfg or SuiteConfig()
    random_cases, equality_cases, tol_of = _RUNNERS[name]
    tol = tol_of(cfg)
    worst: SlackReport | None = None
    failures: list[SlackReport] = []
    failure_count = 0
    count = 0
    for r in random_cases(cfg):
        count += 1
        if worst is None or r.slack < worst.slack:
            worst = r
        if not r.ok(tol):
            failure_count += 1
            if len(failures) < MAX_FAILURES_REPORTED:
                failures.append(r)
    eq = None
    if equality_cases is not None:
        eq_reports = list(equality_cases(cfg))
        eq = max(abs(r.slack) for r in eq_reports)
        for r in eq_reports:
            if not r.ok(tol):
                failure_count += 1
                if len(failures) < MAX_FAILURES_REPORTED:
                    failures.append(r)
    min_slack = worst.slack if worst is not None else math.inf
    return SuiteResult(name, count, tol, min_slack, worst, failures, failure_count, eq)


def run_suites(names, cfg: SuiteConfig | None = None) -> list[SuiteResult]:
    if isinstance(names, str):
        names = [names]
    expanded: list[str] = []
    for n in names:
        expanded.extend(SUITES if n == "all" else [n])
    return [run_suite(n, cfg) for n in expanded]
