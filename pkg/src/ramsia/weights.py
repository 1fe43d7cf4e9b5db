"""Two-level adaptive weights.

Intra-SI weights are inversely proportional to the smoothed residual
``|x_i - z_ji| + eps`` and each row is scaled to sum to ``n``. Inter-SI
weights are inversely proportional to ``||W_j (x - z_j)||_1 + eps`` and are
scaled onto the unit simplex.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .model import InvariantError, WeightState, stack_side_infos


def _residuals(x: np.ndarray, z_list: Sequence[np.ndarray]) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvariantError(f"x must be one-dimensional, got shape {x.shape}")
    for j, zj in enumerate(z_list, start=1):
        if np.shape(zj) != x.shape:
            raise InvariantError(f"side information {j} has shape {np.shape(zj)}, expected {x.shape}")
    return np.abs(x[None, :] - stack_side_infos(z_list, x.shape[0]))


def intra_from_residuals(res: np.ndarray, epsilon: float) -> np.ndarray:
    inv = 1.0 / (res + epsilon)
    return res.shape[1] * inv / inv.sum(axis=1, keepdims=True)


def inter_from_residuals(res: np.ndarray, intra: np.ndarray, epsilon: float) -> np.ndarray:
    inv = 1.0 / (np.einsum("ji,ji->j", intra, res) + epsilon)
    return inv / inv.sum()


def update_intra(x, z_list: Sequence[np.ndarray], epsilon: float) -> np.ndarray:
    """Rows ``w_j``, j = 0..J, each summing to ``n``."""
    if not epsilon > 0:
        raise InvariantError("epsilon must be positive")
    return intra_from_residuals(_residuals(x, z_list), epsilon)


def update_inter(x, z_list: Sequence[np.ndarray], intra: np.ndarray, epsilon: float) -> np.ndarray:
    """Simplex weights ``beta_j`` from the intra-weighted residual norms."""
    if not epsilon > 0:
        raise InvariantError("epsilon must be positive")
    res = _residuals(x, z_list)
    intra = np.asarray(intra, dtype=np.float64)
    if intra.shape != res.shape:
        raise InvariantError(f"intra weights have shape {intra.shape}, expected {res.shape}")
    return inter_from_residuals(res, intra, epsilon)


def refresh(x, z_list: Sequence[np.ndarray], epsilon: float) -> WeightState:
    """Intra update followed by the inter update, both at ``x``."""
    if not epsilon > 0:
        raise InvariantError("epsilon must be positive")
    res = _residuals(x, z_list)
    intra = intra_from_residuals(res, epsilon)
    return WeightState(intra, inter_from_residuals(res, intra, epsilon))
