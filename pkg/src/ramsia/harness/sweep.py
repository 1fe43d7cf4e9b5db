"""Monte-Carlo success-probability sweeps over the number of measurements."""
from __future__ import annotations

import datetime
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import __version__
from ..model import InvariantError, SolverConfig, Termination, TrialReport, Variant
from ..solver import solve
from .generator import GeneratorSpec, generate_instance

logger = logging.getLogger(__name__)

DEFAULT_VARIANTS = (
    (Variant.PLAIN_L1, 0),
    (Variant.L1_L1, 1),
    (Variant.RAMSIA, 1),
    (Variant.RAMSIA, 2),
    (Variant.RAMSIA, 3),
)


@dataclass(frozen=True)
class SweepSpec:
    m_values: Tuple[int, ...]
    trials: int = 100
    success_threshold: float = 1e-3
    variants: Tuple[Tuple[Variant, int], ...] = DEFAULT_VARIANTS
    lam: float = 1e-5
    epsilon: float = 0.1
    stop_tol: float = 1e-8
    max_iters: int = 10_000
    stop_patience: int = 5

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(
            self, "variants", tuple((Variant(v), int(j)) for v, j in self.variants)
        )
        if self.trials < 1:
            raise InvariantError("trials must be >= 1")
        if not self.success_threshold > 0:
            raise InvariantError("success threshold must be positive")
        for v, j in self.variants:
            if j < 0 or (v is Variant.L1_L1 and j < 1):
                raise InvariantError(f"invalid SI count {j} for {v.value}")

    def validate_against(self, gen: GeneratorSpec) -> None:
        for m in self.m_values:
            if not 1 <= m <= gen.n:
                raise InvariantError(f"m={m} outside [1, n={gen.n}]")
        for v, j in self.variants:
            if j > len(gen.si_diff_supports):
                raise InvariantError(
                    f"{v.value} asks for {j} SIs but the generator provides {len(gen.si_diff_supports)}"
                )

    def solver_config(self, variant: Variant, seed: int) -> SolverConfig:
        return SolverConfig(
            lam=self.lam,
            epsilon=self.epsilon,
            variant=variant,
            stop_tol=self.stop_tol,
            max_iters=self.max_iters,
            rng_seed=seed,
            stop_patience=self.stop_patience,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["m_values"] = list(self.m_values)
        d["variants"] = [[v.value, j] for v, j in self.variants]
        return d


@dataclass(frozen=True)
class CellSummary:
    variant: str
    num_sis: int
    m: int
    trials: int
    successes: int
    success_probability: float
    mean_rel_err: float
    mean_iters: float


@dataclass
class SweepReport:
    cells: List[CellSummary]
    trials: List[TrialReport]
    metadata: Dict = field(default_factory=dict)

    def cell(self, variant, num_sis: int, m: int) -> CellSummary:
        variant = Variant(variant).value
        for c in self.cells:
            if (c.variant, c.num_sis, c.m) == (variant, num_sis, m):
                return c
        raise KeyError((variant, num_sis, m))

    def curve(self, variant, num_sis: int) -> List[float]:
        """Success probabilities ordered by ``m``."""
        variant = Variant(variant).value
        cells = sorted((c for c in self.cells if (c.variant, c.num_sis) == (variant, num_sis)),
                       key=lambda c: c.m)
        return [c.success_probability for c in cells]


def variant_label(variant: Variant, num_sis: int) -> str:
    if variant is Variant.PLAIN_L1:
        return "PLAIN_L1"
    return f"{variant.value}-{num_sis}"


def solver_seed(master_seed: int, variant: Variant, num_sis: int, m: int, trial: int) -> int:
    ss = np.random.SeedSequence([master_seed, 1, list(Variant).index(variant), num_sis, m, trial])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def run_trial(gen: GeneratorSpec, sweep: SweepSpec, m: int, trial: int) -> List[TrialReport]:
    """Draw one instance and solve it with every variant of the sweep."""
    inst = generate_instance(gen, m, trial)
    x = inst.x_true
    x_norm = float(np.linalg.norm(x))
    reports = []
    for variant, num_sis in sweep.variants:
        sub = inst.with_side_infos(inst.side_infos[:num_sis])
        cfg = sweep.solver_config(variant, solver_seed(gen.seed, variant, num_sis, m, trial))
        start = time.perf_counter()
        res = solve(sub, cfg)
        elapsed = time.perf_counter() - start
        rel = float(np.linalg.norm(res.x_hat - x)) / x_norm
        ok = res.termination is not Termination.STALLED and rel <= sweep.success_threshold
        reports.append(
            TrialReport(
                m=m,
                trial_index=trial,
                relative_error=rel,
                success=bool(ok),
                solver_variant=variant.value,
                num_sis_used=num_sis,
                iterations=res.iterations,
                wall_time=elapsed,
                termination=res.termination.value,
            )
        )
    return reports


def _run_trial_args(args):
    return run_trial(*args)


def summarize(trials: Sequence[TrialReport], sweep: SweepSpec) -> List[CellSummary]:
    cells = []
    for variant, num_sis in sweep.variants:
        for m in sweep.m_values:
            rows = [t for t in trials
                    if (t.solver_variant, t.num_sis_used, t.m) == (variant.value, num_sis, m)]
            rows.sort(key=lambda t: t.trial_index)
            successes = sum(t.success for t in rows)
            count = len(rows)
            cells.append(
                CellSummary(
                    variant=variant.value,
                    num_sis=num_sis,
                    m=m,
                    trials=count,
                    successes=successes,
                    success_probability=successes / count if count else 0.0,
                    mean_rel_err=float(np.mean([t.relative_error for t in rows])) if rows else 0.0,
                    mean_iters=float(np.mean([t.iterations for t in rows])) if rows else 0.0,
                )
            )
    return cells


def run_sweep(gen: GeneratorSpec, sweep: SweepSpec, workers: int = 1,
              progress: Optional[callable] = None) -> SweepReport:
    """Solve every (variant, m, trial) cell and aggregate success probabilities.

    Each trial is independent and fully seeded, so the report does not depend
    on ``workers``; results are merged in (variant, m, trial) order.
    """
    sweep.validate_against(gen)
    jobs = [(gen, sweep, m, t) for m in sweep.m_values for t in range(sweep.trials)]
    results: List[List[TrialReport]] = []
    if workers <= 1:
        for i, job in enumerate(jobs):
            results.append(run_trial(*job))
            if progress:
                progress(i + 1, len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, res in enumerate(pool.map(_run_trial_args, jobs, chunksize=1)):
                results.append(res)
                if progress:
                    progress(i + 1, len(jobs))

    order = {(v.value, j): k for k, (v, j) in enumerate(sweep.variants)}
    trials = [t for batch in results for t in batch]
    trials.sort(key=lambda t: (order[(t.solver_variant, t.num_sis_used)], t.m, t.trial_index))
    metadata = {
        "generator": gen.to_dict(),
        "sweep": sweep.to_dict(),
        "seeds": {
            "master_seed": gen.seed,
            "instance_seed": "SeedSequence([master_seed, 0, m, trial])",
            "solver_seed": "SeedSequence([master_seed, 1, variant, num_sis, m, trial])",
        },
        "trial_redraw": "x, side informations and phi are all redrawn per trial",
        "si_support_positions": "independent of supp(x), uniform without replacement",
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }
    return SweepReport(summarize(trials, sweep), trials, metadata)
