"""Dense measurement-operator helpers and Lipschitz estimation."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import InvariantError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorStats:
    spectral_norm_sq: float
    power_iters_used: int
    converged: bool


def _check(phi: np.ndarray, v: np.ndarray, axis: int) -> None:
    if phi.ndim != 2 or v.ndim != 1 or phi.shape[axis] != v.shape[0]:
        raise InvariantError(f"cannot combine matrix {phi.shape} with vector {v.shape}")


def apply(phi, v) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _check(phi, v, 1)
    return phi @ v


def apply_transpose(phi, u) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    _check(phi, u, 0)
    return phi.T @ u


def gradient(phi, y, u) -> np.ndarray:
    """Gradient of ``0.5 * ||phi u - y||^2``, i.e. ``phi^T (phi u - y)``."""
    y = np.asarray(y, dtype=np.float64)
    r = apply(phi, u)
    if r.shape != y.shape:
        raise InvariantError(f"y has shape {y.shape}, expected {r.shape}")
    return apply_transpose(phi, r - y)


def estimate_lipschitz(phi, iters: int = 100, safety: float = 1.01, seed: int = 0,
                       rtol: float = 1e-12, return_history: bool = False):
    """Largest eigenvalue of ``phi^T phi`` by power iteration.

    Parameters
    ----------
    phi : array, shape (m, n)
    iters : int
        Maximum number of power iterations.
    safety : float
        Factor >= 1 applied to the final Rayleigh quotient.
    seed : int
        Seed of the random start vector.
    rtol : float
        Early exit once successive Rayleigh quotients agree to this
        relative tolerance.
    return_history : bool
        Also return the list of Rayleigh quotients, one per iteration.

    Returns
    -------
    stats : OperatorStats
    history : list of float, only if ``return_history``
    """
    phi = np.asarray(phi, dtype=np.float64)
    if phi.ndim != 2:
        raise InvariantError(f"phi must be 2-D, got shape {phi.shape}")
    if iters < 1:
        raise InvariantError("iters must be >= 1")
    if safety < 1.0:
        raise InvariantError("safety must be >= 1")
    if not np.any(phi):
        raise InvariantError("zero measurement matrix has no valid step size")

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(phi.shape[1])
    v /= np.linalg.norm(v)
    history = []
    rayleigh = 0.0
    converged = False
    used = 0
    for used in range(1, iters + 1):
        w = phi.T @ (phi @ v)
        prev, rayleigh = rayleigh, float(v @ w)
        history.append(rayleigh)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            # start vector fell into the null space; restart from a fresh draw
            v = rng.standard_normal(phi.shape[1])
            v /= np.linalg.norm(v)
            continue
        v = w / nrm
        if used > 1 and abs(rayleigh - prev) <= rtol * rayleigh:
            converged = True
            break
    if rayleigh <= 0.0:
        raise InvariantError("power iteration did not find a positive eigenvalue")
    logger.debug("power iteration: %d iterations, lambda_max ~ %.6g", used, rayleigh)
    stats = OperatorStats(rayleigh * safety, used, converged)
    if return_history:
        return stats, history
    return stats
