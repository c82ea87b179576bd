"""Acceptance checks; each test prints one PASS/FAIL line.

The lines are collected in ``LINES`` and repeated in the pytest terminal
summary, so a plain ``pytest -v`` run shows them at the end.
"""

import functools
import math
import os
import subprocess
import sys
import time

import numpy as np
from scipy import special as sp

from indexkernel import cli
from indexkernel import identities as ids
from indexkernel import kernels as kn


LINES = {}


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    LINES[number] = line
    assert ok, line


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@functools.lru_cache(maxsize=None)
def suite_rows():
    start = time.perf_counter()
    rows = cli.run_suite(cli.RunConfig(parallel=False))
    return rows, time.perf_counter() - start


def test_criterion_1_reductions():
    worst = 0.0
    pts = (0.5, 1.0, 2.0, 8.0)
    for z in pts:
        worst = max(worst, rel(kn.parabolic_d(0.0, z), math.exp(-z * z / 4)))
        d1 = math.sqrt(math.pi / 2) * math.exp(z * z / 4) * sp.erfc(z / math.sqrt(2))
        worst = max(worst, rel(kn.parabolic_d(-1.0, z), d1))
        k_half = complex(kn.macdonald_complex_order(0.5, 0.0, z)).real
        worst = max(worst, rel(k_half, math.sqrt(math.pi / (2 * z)) * math.exp(-z)))
        for nu in (0.0, 0.3, 1.0):
            w0 = kn.whittaker_real_second_index(0.0, nu, 2 * z)
            worst = max(worst, rel(w0, math.sqrt(2 * z / math.pi) * sp.kv(nu, z)))
            we = kn.whittaker_real_second_index(nu + 0.5, nu, z)
            worst = max(worst, rel(we, z ** (nu + 0.5) * math.exp(-z / 2)))
    report(1, "reduction exactness", worst <= 1e-10, f"worst rel err {worst:.2e}, limit 1e-10")


def test_criterion_2_cross_representation():
    worst = 0.0
    for mu in (-0.5, 0.0, 0.25, 0.4):
        for tau in (0.0, 0.5, 2.0, 5.0):
            for x in (0.5, 1.0, 4.0):
                primary = kn.whittaker_imag(mu, tau, x, crosscheck=False)
                line = float(kn.whittaker_imag_mb(mu, [tau], x)[0])
                worst = max(worst, rel(primary, line))
    report(2, "Whittaker inverse-Fourier vs Mellin-Barnes", worst <= 1e-9, f"worst rel err {worst:.2e}, limit 1e-9")


def test_criterion_3_uniform_bound():
    rng = np.random.default_rng(3)
    worst = -math.inf
    for _ in range(100):
        tau, x = rng.uniform(0.0, 20.0), rng.uniform(0.05, 5.0)
        delta = rng.choice([0.0, math.pi / 6, math.pi / 3])
        lhs = abs(kn.macdonald_imag(tau, x))
        rhs = math.exp(-delta * tau) * kn.macdonald_imag(0.0, x * math.cos(delta))
        worst = max(worst, lhs - rhs)
    report(3, "uniform Macdonald bound", worst <= 1e-12, f"max excess {worst:.2e}, slack 1e-12")


def test_criterion_4_identity_suite():
    rows, elapsed = suite_rows()
    families = {r["case"] for r in rows}
    failed = [r for r in rows if not r["pass"]]
    worst_rel = max(r["rel_err"] for r in rows if r["rel_err"] is not None)
    worst_tail = max(max(r["lhs_tail_bound"], r["rhs_tail_bound"]) for r in rows if r["lhs_tail_bound"] is not None)
    ok = len(families) == 20 and not failed and worst_rel <= 1e-8 and worst_tail <= 1e-10 and elapsed <= 300
    detail = (
        f"{len(rows)} instances in {len(families)} families, {len(failed)} failed, worst rel err {worst_rel:.2e}, "
        f"worst tail {worst_tail:.2e}, {elapsed:.0f} s single-threaded"
    )
    report(4, "identity suite", ok, detail)


def test_criterion_5_mu_degeneracy():
    worst = 0.0
    for x in ids.GRID_X:
        for alpha in ids.GRID_ALPHA:
            d = ids.mu_degeneracy(x, alpha)
            worst = max(worst, d["lhs_rel_diff"], d["rhs_rel_diff"])
    report(5, "THM1 at mu = 0 against COR1", worst <= 1e-10, f"worst rel diff {worst:.2e}, limit 1e-10")


def test_criterion_6_fourier_pairs():
    worst, count, passed = 0.0, 0, 0
    for which in ("L1", "C8", "C9"):
        mu = 0.0 if which == "C8" else 0.25
        reps = ids.verify_fourier_pair(which, kn.EvalPoint(mu, 0.5, 1.0), [0.0, 0.5, 1.0, 2.0], tol=1e-7)
        reps.append(ids.verify(ids.make_case(f"FOURIER_PAIR_{which}", mu=mu, x=1.0, tau=2.0), 1e-7))
        for r in reps:
            count += 1
            passed += r.passed and r.rel_err <= 1e-7
            worst = max(worst, r.rel_err)
    report(6, "Fourier pairs forward and inverse", passed == count, f"{passed}/{count} checks, worst rel err {worst:.2e}")


def test_criterion_7_certificate_soundness():
    rows, _ = suite_rows()
    grid = ids.default_grid()
    rng = np.random.default_rng(7)
    picks = rng.choice(len(grid), size=10, replace=False)
    worst = 0.0
    ok = True
    for i in sorted(picks):
        case = grid[i]
        coarse = ids.verify(case, 1e-8)
        fine = ids.verify(case, 1e-10, quad_tol=1e-12)
        for side in ("lhs", "rhs"):
            moved = abs(getattr(fine, side) - getattr(coarse, side))
            budget = getattr(coarse, f"{side}_tail_bound") + getattr(coarse, f"{side}_quad_error")
            ok &= moved <= budget
            worst = max(worst, moved / budget if budget > 0 else (0.0 if moved == 0 else math.inf))
    report(7, "certificate soundness at tol/100", ok, f"10 cases, largest move/budget {worst:.2e}")


def test_criterion_8_determinism(tmp_path):
    rows, _ = suite_rows()
    serial = cli.to_json(rows)
    out = tmp_path / "parallel.json"
    env = {k: v for k, v in os.environ.items() if k != "INDEXKERNEL_TOL"}
    proc = subprocess.run(
        [sys.executable, "-m", "indexkernel", "suite", "--parallel=true", "--out", str(out)],
        capture_output=True, text=True, env=env, timeout=900,
    )
    same = proc.returncode == 0 and out.read_text() == serial
    report(8, "byte-identical suite JSON", same, f"serial in-process vs parallel CLI run, {len(serial)} bytes")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
