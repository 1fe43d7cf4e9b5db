"""Proximal operator of the weighted n-l1 penalty.

Coordinate-wise the penalty is a weighted sum of absolute deviations from a
handful of knots, so the proximal map of coordinate ``i`` minimizes

    h(v) = sum_j c_j |v - z_j| + 0.5 (v - x_i)^2

with ``c_j = (lam / L) * beta_j * w_ji``. Between two consecutive knots ``h`` is
a smooth quadratic and the stationary point is ``x_i - s_l``, where ``s_l`` is
the sum of coefficients of the knots at or below the interval minus those
above it. If no interval holds its own stationary point, the minimizer sits on
the knot whose band ``z_l + s_{l-1} <= x_i <= z_l + s_l`` contains ``x_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numba
import numpy as np

from .model import InvariantError, WeightState, stack_side_infos


@dataclass(frozen=True)
class ProxCoordinateInput:
    """One coordinate of the proximal problem.

    ``knots`` holds ``(z_ji, coeff_j)`` pairs for j = 0..J, with ``z_0i = 0``.
    """

    x_i: float
    knots: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple((float(z), float(c)) for z, c in self.knots))
        object.__setattr__(self, "x_i", float(self.x_i))

    def objective(self, v):
        """Evaluate ``h`` at scalar or array ``v``."""
        v = np.asarray(v, dtype=np.float64)
        total = 0.5 * (v - self.x_i) ** 2
        for z, c in self.knots:
            total = total + c * np.abs(v - z)
        return total


def _merged_knots(knots) -> Tuple[np.ndarray, np.ndarray]:
    # zero-coefficient knots create no kink and are dropped
    acc = {}
    for z, c in knots:
        if c > 0.0:
            acc[z] = acc.get(z, 0.0) + c
    zs = np.array(sorted(acc), dtype=np.float64)
    cs = np.array([acc[z] for z in zs], dtype=np.float64)
    return zs, cs


def prox_coordinate(inp: ProxCoordinateInput) -> float:
    """Global minimizer of the coordinate objective ``h``.

    Scans the open intervals between sorted knots for a stationary point; if
    none lies strictly inside its interval, returns the knot whose band
    contains ``x_i``.
    """
    if not inp.knots:
        raise InvariantError("prox_coordinate needs at least one knot")
    values = [inp.x_i] + [v for pair in inp.knots for v in pair]
    if not np.all(np.isfinite(values)):
        raise InvariantError("prox_coordinate inputs must be finite")
    if any(c < 0.0 for _, c in inp.knots):
        raise InvariantError("knot coefficients must be non-negative")

    zs, cs = _merged_knots(inp.knots)
    x = inp.x_i
    if zs.size == 0:
        return x
    total = float(cs.sum())
    k = zs.size
    # s[l] for interval l = (zs[l-1], zs[l]), l = 0..k
    below = np.concatenate(([0.0], np.cumsum(cs)))
    s = below - (total - below)
    lo = np.concatenate(([-np.inf], zs))
    hi = np.concatenate((zs, [np.inf]))
    for l in range(k + 1):
        v = x - s[l]
        if lo[l] < v < hi[l]:
            return float(v)
    for l in range(k):
        if zs[l] + s[l] <= x <= zs[l] + s[l + 1]:
            return float(zs[l])
    raise AssertionError("no interval or knot case matched; inputs were not finite?")


def prox_vector(x, w: WeightState, z_list: Sequence[np.ndarray], lam_over_L: float) -> np.ndarray:
    """Coordinate-wise proximal map for the whole vector.

    Vectorized over coordinates; the per-coordinate logic matches
    :func:`prox_coordinate`.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if not lam_over_L > 0:
        raise InvariantError("lam_over_L must be positive")
    if w.intra.shape != (len(z_list) + 1, n):
        raise InvariantError(
            f"weights have shape {w.intra.shape}, expected {(len(z_list) + 1, n)}"
        )
    bad = ~np.isfinite(x)
    if bad.any():
        raise InvariantError(f"non-finite input at coordinate {int(np.flatnonzero(bad)[0])}")
    z = stack_side_infos(z_list, n)
    c = lam_over_L * w.coefficients()
    return _prox_rows(x, z, c)


@numba.njit(cache=True)
def _prox_kernel(x, z, c, out):
    k, n = z.shape
    zs = np.empty(k)
    cs = np.empty(k)
    s = np.empty(k + 1)
    for i in range(n):
        # insertion sort of the active knots of coordinate i
        cnt = 0
        for j in range(k):
            cj = c[j, i]
            if cj > 0.0:
                zj = z[j, i]
                p = cnt
                while p > 0 and zs[p - 1] > zj:
                    zs[p] = zs[p - 1]
                    cs[p] = cs[p - 1]
                    p -= 1
                zs[p] = zj
                cs[p] = cj
                cnt += 1
        xi = x[i]
        if cnt == 0:
            out[i] = xi
            continue
        total = 0.0
        for j in range(cnt):
            total += cs[j]
        below = 0.0
        s[0] = -total
        for j in range(cnt):
            below += cs[j]
            s[j + 1] = 2.0 * below - total

        found = False
        lo = -np.inf
        for l in range(cnt + 1):
            hi = zs[l] if l < cnt else np.inf
            v = xi - s[l]
            if lo < v and v < hi:
                out[i] = v
                found = True
                break
            lo = hi
        if not found:
            for l in range(cnt):
                if zs[l] + s[l] <= xi and xi <= zs[l] + s[l + 1]:
                    out[i] = zs[l]
                    found = True
                    break
        if not found:
            return i
    return -1


def _prox_rows(x: np.ndarray, z: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Batched piecewise prox.

    ``x`` has shape (n,); knots ``z`` and coefficients ``c`` have shape (K, n),
    one row per side-information slot. Zero coefficients are skipped.
    """
    if np.any(c < 0.0):
        i = int(np.flatnonzero((c < 0.0).any(axis=0))[0])
        raise InvariantError(f"negative knot coefficient at coordinate {i}")
    out = np.empty_like(x)
    bad = _prox_kernel(x, z, c, out)
    if bad >= 0:
        raise InvariantError(f"no interval or knot case matched at coordinate {bad}")
    return out


def soft_threshold(x, thresh):
    """Classical shrinkage, the single-knot special case."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - thresh, 0.0)
