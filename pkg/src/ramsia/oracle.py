"""Brute-force references for the closed-form proximal map."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prox import ProxCoordinateInput, prox_coordinate


def grid_argmin(inp: ProxCoordinateInput, coarse: float = 1e-3, fine: float = 1e-8) -> float:
    """Minimize the coordinate objective by a two-stage grid search.

    The minimizer lies between the smallest and largest of ``x_i`` and the
    knots, so the coarse grid covers that hull. By convexity the true minimizer
    is within one coarse step of the best coarse point; that window is then
    rescanned with the fine step.
    """
    pts = [inp.x_i] + [z for z, _ in inp.knots]
    lo, hi = min(pts) - coarse, max(pts) + coarse
    grid = np.arange(lo, hi + coarse, coarse)
    best = grid[np.argmin(inp.objective(grid))]
    window = np.arange(-coarse, coarse + fine, fine)
    fine_grid = best + window
    vals = inp.objective(fine_grid)
    return float(fine_grid[np.argmin(vals)])


def random_input(rng: np.random.Generator, num_sis: int) -> ProxCoordinateInput:
    """Random case: knots in [-3, 3], coefficients in [0, 2], x in [-5, 5]."""
    zs = np.concatenate(([0.0], rng.uniform(-3.0, 3.0, num_sis)))
    cs = rng.uniform(0.0, 2.0, num_sis + 1)
    return ProxCoordinateInput(float(rng.uniform(-5.0, 5.0)), tuple(zip(zs, cs)))


@dataclass(frozen=True)
class ProxCheckResult:
    cases: int
    max_abs_diff: float
    failures: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def prox_check(cases: int = 1000, seed: int = 0, tolerance: float = 1e-6) -> ProxCheckResult:
    """Compare :func:`prox_coordinate` with :func:`grid_argmin` on random cases.

    The number of side informations cycles through 0..3.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for k in range(cases):
        inp = random_input(rng, k % 4)
        diff = abs(prox_coordinate(inp) - grid_argmin(inp))
        worst = max(worst, diff)
        failures += diff > tolerance
    return ProxCheckResult(cases, worst, failures, tolerance)
