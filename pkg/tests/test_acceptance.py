"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line (collected into the terminal summary) and
then asserts. Criteria 5 and 6 share one paper-scale sweep and take tens of
minutes on a single core.
"""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, sparse_instance
from reference import fista
from ramsia import linop, weights
from ramsia.harness.cli import main
from ramsia.harness.generator import PRESETS, GeneratorSpec, generate_instance
from ramsia.harness.sweep import SweepSpec, run_sweep
from ramsia.model import SolverConfig, Variant
from ramsia.oracle import prox_check
from ramsia.solver import solve, solve_trace

PAPER_M = tuple(range(250, 601, 50))
PAPER_TRIALS = 20
# RAMSIA needs 1e4-2e4 iterations near the transition at lambda = 1e-5; the
# default cap of 1e4 would measure the budget rather than the method
PAPER_MAX_ITERS = 50_000
MID_M = (350, 400, 450, 500)


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_prox_matches_grid_search():
    start = time.perf_counter()
    res = prox_check(cases=1000, seed=0, tolerance=1e-6)
    elapsed = time.perf_counter() - start
    record(1, res.passed and elapsed < 10.0,
           f"{res.cases} cases, max diff {res.max_abs_diff:.2e}, {res.failures} failures, {elapsed:.1f}s")


def test_criterion_2_baselines_match_reference():
    worst = 0.0
    for variant, diffs in [(Variant.PLAIN_L1, ()), (Variant.L1_L1, (30,))]:
        inst = sparse_instance(np.random.default_rng(7), n=100, m=50, s=10, diffs=diffs)
        L = float(np.linalg.eigvalsh(inst.phi.T @ inst.phi)[-1])
        cfg = SolverConfig(variant=variant, lam=0.05, lipschitz=L, max_iters=50, stop_tol=1e-300)
        got = solve_trace(inst, cfg, keep_iterates=True).iterates
        ref = fista(np.asarray(inst.phi), np.asarray(inst.y), 0.05, L, 50,
                    z=inst.side_infos[0] if diffs else None)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    record(2, worst <= 1e-10, f"max iterate deviation over 50 iterations {worst:.1e}")


def test_criterion_3_weight_constraints():
    rng = np.random.default_rng(3)
    row_err = simplex_err = 0.0
    violations = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 40))
        num_sis = int(rng.integers(0, 4))
        eps = float(rng.uniform(1e-3, 1.0))
        x = rng.standard_normal(n) * (rng.random(n) < 0.5)
        zs = [x + rng.standard_normal(n) * (rng.random(n) < rng.random()) for _ in range(num_sis)]
        w = weights.refresh(x, zs, eps)
        res = np.abs(x - np.vstack([np.zeros(n)] + zs))
        row_err = max(row_err, float(np.max(np.abs(w.intra.sum(axis=1) - n))) / n)
        simplex_err = max(simplex_err, abs(float(w.inter.sum()) - 1.0))
        # larger residual never gets a larger weight, within each row
        for r, wr in zip(res, w.intra):
            violations += int(np.sum((r[:, None] < r[None, :]) & (wr[:, None] < wr[None, :])))
        # larger weighted residual never gets a larger inter weight
        norms = np.sum(w.intra * res, axis=1)
        violations += int(np.sum((norms[:, None] < norms[None, :]) & (w.inter[:, None] < w.inter[None, :])))
    ok = row_err <= 1e-9 and simplex_err <= 1e-9 and violations == 0
    record(3, ok, f"row-sum err {row_err:.1e}*n, simplex err {simplex_err:.1e}, {violations} ordering violations")


def test_criterion_4_gradient_finite_differences():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        m, n = int(rng.integers(5, 40)), int(rng.integers(5, 60))
        phi, y, u = rng.standard_normal((m, n)), rng.standard_normal(m), rng.standard_normal(n)
        f = lambda v: 0.5 * float(np.sum((phi @ v - y) ** 2))
        h = 1e-5
        fd = np.array([(f(u + h * e) - f(u - h * e)) / (2 * h) for e in np.eye(n)])
        g = linop.gradient(phi, y, u)
        worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    record(4, worst <= 1e-5, f"max relative deviation {worst:.1e} over 20 instances")


@pytest.fixture(scope="module")
def paper_sweep():
    gen = PRESETS["paper"].generator
    sweep = SweepSpec(m_values=PAPER_M, trials=PAPER_TRIALS, max_iters=PAPER_MAX_ITERS)
    return run_sweep(gen, sweep)


def curves(report):
    return {
        "PLAIN": np.array(report.curve(Variant.PLAIN_L1, 0)),
        "L1L1": np.array(report.curve(Variant.L1_L1, 1)),
        "R1": np.array(report.curve(Variant.RAMSIA, 1)),
        "R2": np.array(report.curve(Variant.RAMSIA, 2)),
        "R3": np.array(report.curve(Variant.RAMSIA, 3)),
    }


def fmt(c):
    return " ".join(f"{k}=[{' '.join(f'{p:.2f}' for p in v)}]" for k, v in c.items())


def ordered_with_one_inversion(hi, lo, step):
    gaps = lo - hi
    bad = gaps > 1e-12
    return bad.sum() == 0 or (bad.sum() == 1 and gaps.max() <= step + 1e-12)


@pytest.mark.slow
def test_criterion_5_more_side_information_helps(paper_sweep):
    c = curves(paper_sweep)
    step = 1 / PAPER_TRIALS
    monotone = ordered_with_one_inversion(c["R3"], c["R2"], step) and \
        ordered_with_one_inversion(c["R2"], c["R1"], step)
    wins = int(np.sum(c["R1"] > c["PLAIN"]))
    record(5, monotone and wins >= 3,
           f"m={list(PAPER_M)} {fmt(c)}; RAMSIA-1 beats PLAIN at {wins} m values")


@pytest.mark.slow
def test_criterion_6_poor_side_information(paper_sweep):
    c = curves(paper_sweep)
    step = 1 / PAPER_TRIALS
    mid = np.isin(PAPER_M, MID_M)
    l1l1_ok = bool(np.all(c["L1L1"][mid] <= c["PLAIN"][mid] + step + 1e-12))
    r1_ok = bool(np.all(c["R1"] >= c["PLAIN"] - step - 1e-12))
    strict = int(np.sum(c["R1"] > c["PLAIN"]))
    record(6, l1l1_ok and r1_ok and strict >= 2,
           f"mid-range m={list(MID_M)}; L1_L1 <= PLAIN+1/T: {l1l1_ok}; "
           f"RAMSIA-1 >= PLAIN-1/T everywhere: {r1_ok}; strictly greater at {strict} m values")


@pytest.mark.slow
def test_criterion_7_perfect_side_information():
    gen = GeneratorSpec(n=1000, sparsity=100, si_diff_supports=(0,), seed=0)
    m = gen.n // 10
    # lambda = 1e-5 makes the pull toward z_1 weak; the default 1e4 cap stops
    # long before the iterate settles, so the cap is raised here
    cfg = SolverConfig(variant=Variant.RAMSIA, max_iters=100_000)
    errs = []
    for trial in range(20):
        inst = generate_instance(gen, m, trial)
        x_hat = solve(inst, cfg).x_hat
        errs.append(np.linalg.norm(x_hat - inst.x_true) / np.linalg.norm(inst.x_true))
    hits = int(np.sum(np.array(errs) <= 1e-3))
    record(7, hits >= 19, f"{hits}/20 trials within 1e-3 at n=1000, m={m}; worst {max(errs):.1e}")


def test_criterion_8_reports_are_byte_identical(tmp_path):
    outputs = []
    for workers in (1, 8):
        stem = tmp_path / f"w{workers}"
        rc = main(["benchmark", "--preset", "desk", "--trials", "3", "--seed", "11",
                   "--workers", str(workers), "--out", str(stem)])
        assert rc == 0
        outputs.append((stem.with_suffix(".json").read_bytes(), stem.with_suffix(".csv").read_bytes()))
    same = outputs[0] == outputs[1]
    record(8, same, f"desk preset, 3 trials per cell, workers 1 vs 8: JSON and CSV identical={same}")
