"""Accelerated proximal-gradient reconstruction with adaptive weights.

The same loop serves three variants:

* ``PLAIN_L1``: weights stay at their initial value (unit weights on the
  origin only), which is classical FISTA on the l1-regularized least squares.
* ``L1_L1``: unit weights on the origin and on the first side information,
  never refreshed.
* ``RAMSIA``: intra- and inter-SI weights are refreshed after every proximal
  step from the new iterate.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from . import linop, weights
from .model import (
    InvariantError,
    PowerIteration,
    ProblemInstance,
    SolverConfig,
    SolverResult,
    Termination,
    Variant,
    WeightState,
    stack_side_infos,
)
from .prox import _prox_rows

logger = logging.getLogger(__name__)

# divergence guard: objective blown up relative to its starting value
_BLOWUP = 1e6
_H_FLOOR = 1e-12


def next_momentum(t: float) -> float:
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))


def lipschitz_constant(inst: ProblemInstance, cfg: SolverConfig) -> float:
    if isinstance(cfg.lipschitz, PowerIteration):
        stats = linop.estimate_lipschitz(
            inst.phi, cfg.lipschitz.iters, cfg.lipschitz.safety, seed=cfg.rng_seed
        )
        return stats.spectral_norm_sq
    return float(cfg.lipschitz)


def _prepare(inst: ProblemInstance, cfg: SolverConfig):
    """Side informations actually used and the starting weights."""
    n = inst.n
    if cfg.variant is Variant.PLAIN_L1:
        sis = ()
        w = WeightState.initial(0, n)
    elif cfg.variant is Variant.L1_L1:
        if inst.num_sis < 1:
            raise InvariantError("L1_L1 needs at least one side information")
        sis = inst.side_infos[:1]
        w = WeightState.uniform(1, n)
    else:
        sis = inst.side_infos
        w = WeightState.initial(len(sis), n)
    return sis, w


def solve(inst: ProblemInstance, cfg: SolverConfig) -> SolverResult:
    """Reconstruct ``x`` from ``inst.y`` using the variant selected in ``cfg``."""
    return _run(inst, cfg, record_weights=False, record_iterates=False)


def solve_trace(inst: ProblemInstance, cfg: SolverConfig, keep_iterates: bool = False) -> SolverResult:
    """Like :func:`solve`, also keeping the weights after every iteration.

    ``weight_history[k-1]`` holds the weights produced at iteration ``k``
    (the ones used by iteration ``k + 1``). With ``keep_iterates`` the
    result gains an ``iterates`` attribute, an array ``(iterations, n)``.
    """
    return _run(inst, cfg, record_weights=True, record_iterates=keep_iterates)


def _run(inst, cfg, record_weights, record_iterates) -> SolverResult:
    sis, w = _prepare(inst, cfg)
    adaptive = cfg.variant is Variant.RAMSIA
    phi, y, n = inst.phi, inst.y, inst.n
    L = lipschitz_constant(inst, cfg)
    step = 1.0 / L
    lam_over_L = cfg.lam / L
    knots = stack_side_infos(sis, n)

    x_prev = np.zeros(n)
    phi_x_prev = np.zeros(inst.m)
    u = x_prev
    phi_u = phi_x_prev
    t = 1.0
    h_prev = 0.5 * float(y @ y) + cfg.lam * float(np.sum(w.coefficients() * np.abs(knots)))
    h0 = h_prev
    coeffs = lam_over_L * w.coefficients()

    trace = []
    history = [] if record_weights else None
    iterates = [] if record_iterates else None
    termination = Termination.MAX_ITERS
    diagnostics = ""
    k = 0
    calm = 0
    x = x_prev
    while k < cfg.max_iters:
        k += 1
        grad = phi.T @ (phi_u - y)
        x = _prox_rows(u - step * grad, knots, coeffs)
        phi_x = phi @ x
        r = phi_x - y
        res = np.abs(x - knots)
        h = 0.5 * float(r @ r) + cfg.lam * float(np.einsum("j,ji,ji->", w.inter, w.intra, res))
        if not math.isfinite(h) or h > _BLOWUP * max(h0, 1.0):
            termination = Termination.STALLED
            diagnostics = f"objective {h!r} at iteration {k} (start {h0!r}, L={L!r})"
            logger.warning("solver stalled: %s", diagnostics)
            x = x_prev
            k -= 1
            break
        trace.append(h)

        if adaptive:
            intra = weights.intra_from_residuals(res, cfg.epsilon)
            w = WeightState(intra, weights.inter_from_residuals(res, intra, cfg.epsilon))
            coeffs = lam_over_L * w.coefficients()
        if history is not None:
            history.append(w.copy())
        if iterates is not None:
            iterates.append(x.copy())

        t_next = next_momentum(t)
        a = (t - 1.0) / t_next
        u = x + a * (x - x_prev)
        phi_u = phi_x + a * (phi_x - phi_x_prev)
        t = t_next
        x_prev, phi_x_prev = x, phi_x

        calm = calm + 1 if abs(h - h_prev) / max(h_prev, _H_FLOOR) < cfg.stop_tol else 0
        if calm >= cfg.stop_patience:
            termination = Termination.TOLERANCE_REACHED
            break
        h_prev = h

    result = SolverResult(
        x_hat=x,
        objective_trace=np.asarray(trace),
        iterations=k,
        termination=termination,
        final_weights=w.copy(),
        lipschitz=L,
        initial_objective=h0,
        weight_history=history,
        diagnostics=diagnostics,
    )
    if iterates is not None:
        result.iterates = np.asarray(iterates).reshape(-1, n)
    return result
