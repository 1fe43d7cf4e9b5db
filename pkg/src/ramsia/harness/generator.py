"""Synthetic sparse sources with side information of controlled quality."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Tuple

import numpy as np

from ..model import InvariantError, ProblemInstance

PHI_SCALINGS = ("normalized", "unit")


@dataclass(frozen=True)
class GeneratorSpec:
    """How to draw one synthetic trial.

    ``si_diff_supports[j]`` is the number of nonzeros of ``x - z_j``; the
    difference has standard-normal amplitudes on uniformly drawn positions,
    independent of the support of ``x``.

    ``phi_scaling`` selects the variance of the measurement entries:
    ``"normalized"`` draws N(0, 1/m), ``"unit"`` draws N(0, 1).
    """

    n: int = 1000
    sparsity: int = 100
    si_diff_supports: Tuple[int, ...] = (300, 300, 300)
    amplitude_law: str = "standard_normal"
    seed: int = 0
    phi_scaling: str = "normalized"

    def __post_init__(self):
        object.__setattr__(self, "si_diff_supports", tuple(int(d) for d in self.si_diff_supports))
        if self.n < 1:
            raise InvariantError("n must be positive")
        if not 0 < self.sparsity <= self.n:
            raise InvariantError(f"sparsity must be in (0, n], got {self.sparsity}")
        for d in self.si_diff_supports:
            if not 0 <= d <= self.n:
                raise InvariantError(f"SI difference support must be in [0, n], got {d}")
        if self.amplitude_law != "standard_normal":
            raise InvariantError(f"unsupported amplitude law {self.amplitude_law!r}")
        if self.phi_scaling not in PHI_SCALINGS:
            raise InvariantError(f"phi_scaling must be one of {PHI_SCALINGS}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["si_diff_supports"] = list(self.si_diff_supports)
        return d


@dataclass(frozen=True)
class Preset:
    generator: GeneratorSpec
    m_values: Tuple[int, ...]
    trials: int
    extra: dict = field(default_factory=dict)


PRESETS = {
    "paper": Preset(GeneratorSpec(1000, 100, (300, 300, 300)), tuple(range(250, 601, 50)), 100),
    "desk": Preset(GeneratorSpec(200, 20, (60, 60, 60)), tuple(range(50, 121, 10)), 20),
}


def trial_rng(seed: int, m: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, m, trial) cell.

    ``stream`` separates the instance draw (0) from solver-side randomness.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, m, trial])))


def _sparse(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    v = np.zeros(n)
    if k:
        v[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k)
    return v


def generate_instance(spec: GeneratorSpec, m: int, trial: int = 0) -> ProblemInstance:
    """Draw ``x``, the side informations and ``phi`` for one trial.

    Everything is redrawn per trial; the result depends only on
    ``(spec.seed, m, trial)``.
    """
    if not 1 <= m:
        raise InvariantError(f"m must be positive, got {m}")
    n = spec.n
    rng = trial_rng(spec.seed, m, trial)
    x = _sparse(rng, n, spec.sparsity)
    # a draw of exactly 0.0 would silently shrink the support
    while np.count_nonzero(x) != spec.sparsity:
        x = _sparse(rng, n, spec.sparsity)
    side_infos = []
    for d in spec.si_diff_supports:
        while True:
            z = x - _sparse(rng, n, d)
            # rounding in x - diff could cancel a tiny difference entry
            if np.count_nonzero(x - z) == d:
                break
        side_infos.append(z)
    phi = rng.standard_normal((m, n))
    if spec.phi_scaling == "normalized":
        phi /= np.sqrt(m)
    return ProblemInstance(phi, phi @ x, tuple(side_infos), x)
