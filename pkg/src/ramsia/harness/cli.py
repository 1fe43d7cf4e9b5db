"""Command-line entry point: ``ramsia {generate,reconstruct,benchmark,prox-check}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..model import SolverConfig, Variant
from ..oracle import prox_check
from ..solver import solve
from . import io
from .generator import PHI_SCALINGS, PRESETS, GeneratorSpec, generate_instance
from .sweep import DEFAULT_VARIANTS, SweepSpec, run_sweep

logger = logging.getLogger("ramsia")


def _int_list(text: str):
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


def _add_generator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), default="paper",
                   help="named defaults for n, sparsity, SI diffs, m-list and trials (default: %(default)s)")
    p.add_argument("--n", type=int, help="signal length (preset paper: 1000, desk: 200)")
    p.add_argument("--sparsity", type=int, help="nonzeros of x (paper: 100, desk: 20)")
    p.add_argument("--si-diffs", type=_int_list,
                   help="comma list, nonzeros of x - z_j per SI (paper: 300,300,300, desk: 60,60,60)")
    p.add_argument("--phi-scaling", choices=PHI_SCALINGS, default="normalized",
                   help="variance of phi entries: normalized = 1/m, unit = 1 (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: %(default)s)")


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, default=1e-5,
                   help="regularization weight (default: %(default)g)")
    p.add_argument("--epsilon", type=float, default=0.1, help="weight smoothing (default: %(default)g)")
    p.add_argument("--stop-tol", type=float, default=1e-8,
                   help="relative objective variation that stops the solver (default: %(default)g)")
    p.add_argument("--max-iters", type=int, default=10_000, help="iteration cap (default: %(default)d)")
    p.add_argument("--stop-patience", type=int, default=5,
                   help="consecutive iterations below --stop-tol before stopping (default: %(default)d)")


def _generator(args) -> GeneratorSpec:
    base = PRESETS[args.preset].generator
    return GeneratorSpec(
        n=args.n or base.n,
        sparsity=args.sparsity or base.sparsity,
        si_diff_supports=args.si_diffs if args.si_diffs is not None else base.si_diff_supports,
        seed=args.seed,
        phi_scaling=args.phi_scaling,
    )


def cmd_generate(args) -> int:
    gen = _generator(args)
    inst = generate_instance(gen, args.m, args.trial)
    manifest = {"generator": gen.to_dict(), "trial": args.trial,
                "lambda": args.lam, "epsilon": args.epsilon}
    out = io.write_instance(args.out, inst, manifest)
    print(f"wrote instance n={inst.n} m={inst.m} J={inst.num_sis} to {out}")
    return 0


def cmd_reconstruct(args) -> int:
    inst, manifest = io.read_instance(args.instance)
    if args.num_sis is not None:
        inst = inst.with_side_infos(inst.side_infos[: args.num_sis])
    cfg = SolverConfig(
        lam=args.lam,
        epsilon=args.epsilon,
        variant=Variant(args.variant),
        stop_tol=args.stop_tol,
        max_iters=args.max_iters,
        rng_seed=args.seed,
        stop_patience=args.stop_patience,
    )
    res = solve(inst, cfg)
    if args.out:
        io.write_vectors(args.out, [res.x_hat])
    print(f"variant={cfg.variant.value} num_sis={inst.num_sis} iterations={res.iterations} "
          f"termination={res.termination.value}")
    if inst.x_true is not None:
        rel = np.linalg.norm(res.x_hat - inst.x_true) / np.linalg.norm(inst.x_true)
        print(f"relative_error={rel:.6e}")
    return 0


def _variants(args):
    if args.variant is None:
        return DEFAULT_VARIANTS
    counts = args.num_sis_list or (0,)
    return tuple((Variant(args.variant), j) for j in counts)


def cmd_benchmark(args) -> int:
    gen = _generator(args)
    preset = PRESETS[args.preset]
    sweep = SweepSpec(
        m_values=args.m_list or preset.m_values,
        trials=args.trials or preset.trials,
        success_threshold=args.threshold,
        variants=_variants(args),
        lam=args.lam,
        epsilon=args.epsilon,
        stop_tol=args.stop_tol,
        max_iters=args.max_iters,
        stop_patience=args.stop_patience,
    )

    def progress(done, total):
        if done == total or done % max(1, total // 20) == 0:
            logger.info("%d/%d trials", done, total)

    report = run_sweep(gen, sweep, workers=args.workers, progress=progress)
    out = Path(args.out)
    io.export_report(report, out.with_suffix(".csv"), "csv")
    io.export_report(report, out.with_suffix(".json"), "json", include_timing=args.with_timing)
    for c in report.cells:
        print(f"{c.variant:>8} J={c.num_sis} m={c.m:4d}  Pr(success)={c.success_probability:.3f}  "
              f"mean_rel_err={c.mean_rel_err:.2e}  mean_iters={c.mean_iters:.0f}")
    print(f"wrote {out.with_suffix('.csv')} and {out.with_suffix('.json')}")
    return 0


def cmd_prox_check(args) -> int:
    res = prox_check(args.cases, args.seed, args.tolerance)
    status = "PASS" if res.passed else "FAIL"
    print(f"{status} prox-check: {res.cases} cases, max |closed form - grid| = {res.max_abs_diff:.3e}, "
          f"{res.failures} above {res.tolerance:g}")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramsia",
        description="Sparse reconstruction with side information: instances, solving, benchmarks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic instance as CSV files plus a JSON manifest")
    _add_generator_args(p)
    _add_solver_args(p)
    p.add_argument("--m", type=int, required=True, help="number of measurements")
    p.add_argument("--trial", type=int, default=0, help="trial index (default: %(default)s)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reconstruct", help="solve one instance read from files")
    p.add_argument("instance", help="directory written by 'generate'")
    _add_solver_args(p)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="RAMSIA",
                   help="(default: %(default)s)")
    p.add_argument("--num-sis", type=int, help="use only the first J side informations")
    p.add_argument("--seed", type=int, default=0, help="power-iteration seed (default: %(default)s)")
    p.add_argument("--out", help="write the reconstruction as a one-row CSV")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("benchmark", help="success-probability sweep over m")
    _add_generator_args(p)
    _add_solver_args(p)
    p.add_argument("--m-list", type=_int_list, help="comma list of measurement counts (default: preset)")
    p.add_argument("--trials", type=int, help="trials per cell (paper: 100, desk: 20)")
    p.add_argument("--threshold", type=float, default=1e-3,
                   help="success if relative error <= threshold (default: %(default)g)")
    p.add_argument("--variant", choices=[v.value for v in Variant],
                   help="run only this variant (default: PLAIN_L1, L1_L1-1, RAMSIA-1/2/3)")
    p.add_argument("--num-sis", dest="num_sis_list", type=_int_list,
                   help="comma list of SI counts for --variant (default: 0)")
    p.add_argument("--workers", type=int, default=1, help="parallel trial workers (default: %(default)s)")
    p.add_argument("--with-timing", action="store_true",
                   help="keep wall times and timestamp in the JSON report")
    p.add_argument("--out", default="report", help="output path stem (default: %(default)s)")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("prox-check", help="compare the closed-form prox against grid search")
    p.add_argument("--cases", type=int, default=1000, help="(default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="(default: %(default)s)")
    p.add_argument("--tolerance", type=float, default=1e-6, help="(default: %(default)g)")
    p.set_defaults(func=cmd_prox_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
