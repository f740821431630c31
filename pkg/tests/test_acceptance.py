"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line (visible without ``-s``) before
asserting.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from isocr import bounds, linalg, quantum
from isocr import protocols as P
from isocr.suites import SuiteConfig, run_suite

RHO_11 = [i / 10 for i in range(11)]
RHO_101 = [i / 100 for i in range(101)]


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return emit


def test_c01_hypercontractivity_suite(report):
    start = time.perf_counter()
    res = run_suite("hypercontractivity", SuiteConfig(trials=1080, seed=1, tolerance=1e-9))
    elapsed = time.perf_counter() - start
    ok = res.trials >= 1000 and res.min_slack >= -1e-9 and res.failure_count == 0 and elapsed < 60
    report(1, ok, f"hypercontractivity trials={res.trials} min_slack={res.min_slack:.3e} time={elapsed:.1f}s")
    assert ok


def test_c02_trace_identity(report):
    res = run_suite("trace-identity", SuiteConfig(trials=200, seed=1))
    worst = -res.min_slack
    ok = res.trials == 200 and worst <= 1e-10 and res.failure_count == 0
    report(2, ok, f"trace identity pairs={res.trials} max|lhs-rhs|={worst:.3e}")
    assert ok


def test_c03_norm_suites(report):
    parts, ok = [], True
    for name in ("holder", "partial-trace", "spectral-power", "epr-channel"):
        res = run_suite(name, SuiteConfig(trials=200, seed=1, tolerance=1e-9))
        good = res.min_slack >= -1e-9 and res.failure_count == 0 and res.equality_max_abs_slack <= 1e-10
        ok = ok and good
        parts.append(f"{name} min={res.min_slack:.2e} eq={res.equality_max_abs_slack:.1e}")
    report(3, ok, "; ".join(parts))
    assert ok


def test_c04_closed_form_vs_sweep(report):
    k = 100
    worst_c = worst_q = 0.0
    for rho in [i / 10 for i in range(1, 10)]:
        for gamma in (0.01, 0.05, 0.1, 0.2):
            worst_c = max(worst_c, abs(bounds.bound_classical_lb(rho, gamma, k) - bounds.bound_classical_sweep(rho, gamma, k)))
            worst_q = max(worst_q, abs(bounds.bound_quantum_lb(rho, gamma, k) - bounds.bound_quantum_sweep(rho, gamma, k)))
    ok = worst_c <= 1e-6 * k and worst_q <= 1e-6 * k
    report(4, ok, f"max |closed - sweep| classical={worst_c:.2e} quantum={worst_q:.2e} (k={k})")
    assert ok


def test_c05_gamma_limits(report):
    dev_c = max(abs(bounds.bound_classical_lb(r, 1e-12, 1) - (1 - r * r)) for r in RHO_101)
    dev_q = max(abs(bounds.bound_quantum_lb(r, 1e-12, 1) - (1 - r * r) / (1 + r * r)) for r in RHO_101)
    ok = dev_c <= 1e-6 and dev_q <= 1e-6
    report(5, ok, f"gamma=1e-12 over 101 rho: classical dev={dev_c:.4e} quantum dev={dev_q:.4e}")
    assert ok


def test_c06_basis_protocol(report):
    worst, below = 0.0, True
    for n in (1, 2, 3):
        a, b = P.basis_protocol(n)
        for rho in RHO_11:
            s = P.success_free(a, b, rho, n)
            worst = max(worst, abs(s - ((1 + rho) / 2) ** n))
            below = below and s <= bounds.bound_free(rho, n) + 1e-12
    ok = worst <= 1e-12 and below
    report(6, ok, f"basis protocol max dev={worst:.2e}, below free bound={below}")
    assert ok


def test_c07_seesaw_bracket(report):
    mid = P.seesaw_search(0.5, 1, 1, iters=50, seed=1, restarts=20).value
    lo = P.seesaw_search(0.0, 1, 1, iters=50, seed=1, restarts=20).value
    hi = P.seesaw_search(1.0, 1, 1, iters=50, seed=1, restarts=20).value
    ceiling = 2 ** (-1 / 3)
    ok = 0.75 <= mid <= ceiling + 1e-9 and abs(lo - 0.5) <= 1e-9 and abs(hi - 1.0) <= 1e-9
    report(7, ok, f"seesaw rho=0.5 -> {mid:.12f} in [0.75, {ceiling:.12f}]; rho=0 -> {lo:.12f}; rho=1 -> {hi:.12f}")
    assert ok


def test_c08_rate_sandwich(report):
    ok = True
    worst = -math.inf
    for rho in RHO_101:
        lb = bounds.bound_quantum_lb(rho, 1e-12, 1)
        ach = bounds.achievable_quantum_rate(rho)
        sd = bounds.superdense_rate(rho)
        cap = bounds.capacity_upper(rho)
        ok = ok and lb <= ach and ach <= 1 - rho * rho + 1e-9 and sd <= cap + 1e-9
        worst = max(worst, lb - ach, ach - (1 - rho * rho), sd - cap)
    report(8, ok, f"rate sandwich over 101 rho, largest violation margin={worst:.3e}")
    assert ok


def test_c09_isotropic_spectrum(report):
    worst = 0.0
    for rho in RHO_11:
        w = linalg.hermitian_eig(quantum.isotropic_state(rho, 1)).eigenvalues
        expected = np.sort([(1 + 3 * rho) / 4] + [(1 - rho) / 4] * 3)
        worst = max(worst, float(np.max(np.abs(w - expected))))
    h1 = quantum.von_neumann_entropy(quantum.isotropic_state(1.0, 1))
    h0 = quantum.von_neumann_entropy(quantum.isotropic_state(0.0, 1))
    ok = worst <= 1e-10 and abs(h1) <= 1e-10 and abs(h0 - 2) <= 1e-10
    report(9, ok, f"spectrum max dev={worst:.2e}; H(Phi_1)={h1:.2e}; H(Phi_0)={h0:.12f}")
    assert ok


def _cli(*args):
    env = {k: v for k, v in os.environ.items() if k != "ISOCR_OUTPUT_DIR"}
    return subprocess.run([sys.executable, "-m", "isocr", *args], capture_output=True, env=env)


def test_c10_determinism(report, tmp_path):
    v1 = _cli("verify", "--suite", "all", "--seed", "1")
    v2 = _cli("verify", "--suite", "all", "--seed", "1")
    b1 = _cli("bounds", "--model", "classical", "--model", "quantum", "--rho", "0:1:101", "--gamma", "0.01,0.05")
    b2 = _cli("bounds", "--model", "classical", "--model", "quantum", "--rho", "0:1:101", "--gamma", "0.01,0.05")
    j1 = _cli("bounds", "--model", "superdense", "--rho", "0:1:11", "--format", "json", "--output-dir", str(tmp_path / "a"))
    j2 = _cli("bounds", "--model", "superdense", "--rho", "0:1:11", "--format", "json", "--output-dir", str(tmp_path / "b"))
    files_same = (tmp_path / "a" / "superdense.json").read_bytes() == (tmp_path / "b" / "superdense.json").read_bytes()
    ok = (v1.returncode == v2.returncode == 0 and v1.stdout == v2.stdout
          and b1.returncode == 0 and b1.stdout == b2.stdout
          and j1.returncode == j2.returncode == 0 and files_same)
    report(10, ok, f"verify report {len(v1.stdout)} bytes identical={v1.stdout == v2.stdout}; "
                   f"bounds csv identical={b1.stdout == b2.stdout}; json files identical={files_same}")
    assert ok
