"""Domain types shared by the solver, the weight updates and the harness.

The implicit all-zero side information ``z_0`` is never stored: every
container indexed by side information carries ``J + 1`` slots where slot 0
refers to the origin and slots ``1..J`` refer to ``side_infos[0..J-1]``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np


class InvariantError(ValueError):
    """Raised when inputs violate a dimensional or value invariant."""


class Variant(str, enum.Enum):
    PLAIN_L1 = "PLAIN_L1"
    L1_L1 = "L1_L1"
    RAMSIA = "RAMSIA"


class Termination(str, enum.Enum):
    TOLERANCE_REACHED = "TOLERANCE_REACHED"
    MAX_ITERS = "MAX_ITERS"
    STALLED = "STALLED"


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InvariantError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Measurements ``y = phi @ x`` plus the side-information vectors.

    Parameters
    ----------
    phi : array, shape (m, n)
        Measurement matrix.
    y : array, shape (m,)
        Measurement vector.
    side_infos : sequence of arrays, each shape (n,)
        Side information ``z_1 .. z_J``; may be empty.
    x_true : array, shape (n,), optional
        Source vector, known only for synthetic instances. When given, the
        instance is checked for ``phi @ x_true == y`` up to 1e-12 relative.
    """

    phi: np.ndarray
    y: np.ndarray
    side_infos: Tuple[np.ndarray, ...] = ()
    x_true: Optional[np.ndarray] = None

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=np.float64)
        if phi.ndim != 2 or phi.shape[0] < 1 or phi.shape[1] < 1:
            raise InvariantError(f"phi must be a non-empty 2-D matrix, got shape {phi.shape}")
        m, n = phi.shape
        y = _as_vector(self.y, "y")
        if y.shape[0] != m:
            raise InvariantError(f"y has length {y.shape[0]}, expected {m}")
        sis = tuple(_as_vector(z, f"side_infos[{j}]") for j, z in enumerate(self.side_infos))
        for j, z in enumerate(sis):
            if z.shape[0] != n:
                raise InvariantError(f"side_infos[{j}] has length {z.shape[0]}, expected {n}")
        x_true = None
        if self.x_true is not None:
            x_true = _as_vector(self.x_true, "x_true")
            if x_true.shape[0] != n:
                raise InvariantError(f"x_true has length {x_true.shape[0]}, expected {n}")
            mismatch = np.linalg.norm(phi @ x_true - y) / max(1.0, np.linalg.norm(y))
            if not mismatch <= 1e-12:
                raise InvariantError(f"phi @ x_true differs from y (relative {mismatch:.3e})")
        for arr in (phi, y, *sis) + ((x_true,) if x_true is not None else ()):
            arr.flags.writeable = False
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "side_infos", sis)
        object.__setattr__(self, "x_true", x_true)

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]

    @property
    def num_sis(self) -> int:
        return len(self.side_infos)

    def with_side_infos(self, side_infos: Sequence[np.ndarray]) -> "ProblemInstance":
        return ProblemInstance(self.phi, self.y, tuple(side_infos), self.x_true)


def stack_side_infos(side_infos: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Return a ``(J + 1, n)`` array whose row 0 is the zero vector."""
    z = np.zeros((len(side_infos) + 1, n))
    for j, zj in enumerate(side_infos, start=1):
        z[j] = zj
    return z


@dataclass(eq=False)
class WeightState:
    """Intra-SI weight rows ``w_j`` and inter-SI scalars ``beta_j``, j = 0..J."""

    intra: np.ndarray
    inter: np.ndarray

    def __post_init__(self):
        self.intra = np.asarray(self.intra, dtype=np.float64)
        self.inter = np.asarray(self.inter, dtype=np.float64)
        if self.intra.ndim != 2 or self.inter.ndim != 1 or self.intra.shape[0] != self.inter.shape[0]:
            raise InvariantError(
                f"intra must be (J+1, n) and inter (J+1,), got {self.intra.shape} and {self.inter.shape}"
            )

    @property
    def num_sis(self) -> int:
        return self.inter.shape[0] - 1

    @classmethod
    def initial(cls, num_sis: int, n: int) -> "WeightState":
        """Start of the iteration: unit weights on the origin, nothing on the SIs."""
        intra = np.zeros((num_sis + 1, n))
        intra[0] = 1.0
        inter = np.zeros(num_sis + 1)
        inter[0] = 1.0
        return cls(intra, inter)

    @classmethod
    def uniform(cls, num_sis: int, n: int, active: Optional[int] = None) -> "WeightState":
        """Unit weights and unit betas on slots ``0..active``, zero elsewhere."""
        active = num_sis if active is None else active
        intra = np.zeros((num_sis + 1, n))
        intra[: active + 1] = 1.0
        inter = np.zeros(num_sis + 1)
        inter[: active + 1] = 1.0
        return cls(intra, inter)

    def coefficients(self) -> np.ndarray:
        """Per-slot, per-coordinate products ``beta_j * w_ji``, shape (J+1, n)."""
        return self.inter[:, None] * self.intra

    def copy(self) -> "WeightState":
        return WeightState(self.intra.copy(), self.inter.copy())


@dataclass(frozen=True)
class PowerIteration:
    """Directive to estimate the Lipschitz constant by power iteration."""

    iters: int = 100
    safety: float = 1.01

    def __post_init__(self):
        if self.iters < 1:
            raise InvariantError("power iteration needs iters >= 1")
        if not self.safety >= 1.0:
            raise InvariantError("safety factor must be >= 1")


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 1e-5
    epsilon: float = 0.1
    variant: Variant = Variant.RAMSIA
    stop_tol: float = 1e-8
    max_iters: int = 10_000
    lipschitz: Union[float, PowerIteration] = field(default_factory=PowerIteration)
    rng_seed: int = 0
    # consecutive iterations the relative variation must stay below stop_tol;
    # FISTA's objective is not monotone and a single small step can be a
    # turning point rather than convergence
    stop_patience: int = 5

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.lam > 0:
            raise InvariantError("lambda must be positive")
        if not self.epsilon > 0:
            raise InvariantError("epsilon must be positive")
        if not self.stop_tol > 0:
            raise InvariantError("stop_tol must be positive")
        if self.max_iters < 1:
            raise InvariantError("max_iters must be >= 1")
        if self.stop_patience < 1:
            raise InvariantError("stop_patience must be >= 1")
        if not isinstance(self.lipschitz, PowerIteration) and not self.lipschitz > 0:
            raise InvariantError("an explicit Lipschitz constant must be positive")


@dataclass
class SolverResult:
    x_hat: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    termination: Termination
    final_weights: WeightState
    lipschitz: float
    initial_objective: float = 0.0
    weight_history: Optional[list] = None
    iterates: Optional[np.ndarray] = None
    diagnostics: str = ""


@dataclass(frozen=True)
class TrialReport:
    m: int
    trial_index: int
    relative_error: float
    success: bool
    solver_variant: str
    num_sis_used: int
    iterations: int
    wall_time: float
    termination: str = Termination.MAX_ITERS.value


def objective_value(inst: ProblemInstance, w: WeightState, cfg: SolverConfig, x) -> float:
    """Weighted n-l1 objective.

    ``0.5 * ||phi x - y||^2 + lam * sum_j beta_j * sum_i w_ji |x_i - z_ji|``
    with ``z_0 = 0``.
    """
    x = _as_vector(x, "x")
    if x.shape[0] != inst.n:
        raise InvariantError(f"x has length {x.shape[0]}, expected {inst.n}")
    if w.intra.shape != (inst.num_sis + 1, inst.n):
        raise InvariantError(
            f"weights have shape {w.intra.shape}, expected {(inst.num_sis + 1, inst.n)}"
        )
    r = inst.phi @ x - inst.y
    return 0.5 * float(r @ r) + cfg.lam * penalty(x, inst.side_infos, w)


def penalty(x: np.ndarray, side_infos: Sequence[np.ndarray], w: WeightState) -> float:
    """Unscaled penalty ``sum_j beta_j * ||W_j (x - z_j)||_1``."""
    total = w.inter[0] * float(w.intra[0] @ np.abs(x))
    for j, z in enumerate(side_infos, start=1):
        total += w.inter[j] * float(w.intra[j] @ np.abs(x - z))
    return total
