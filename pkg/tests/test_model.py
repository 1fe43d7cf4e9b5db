import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramsia.model import (
    InvariantError,
    PowerIteration,
    ProblemInstance,
    SolverConfig,
    WeightState,
    objective_value,
)


def test_objective_zero_at_origin_with_zero_measurements():
    phi = np.ones((3, 4))
    inst = ProblemInstance(phi, np.zeros(3), (np.ones(4),))
    w = WeightState(np.full((2, 4), 2.0), np.array([0.3, 0.7]))
    # z_1 = 1 contributes at x = 0, so use zero SI for the all-vanishing case
    inst0 = ProblemInstance(phi, np.zeros(3))
    assert objective_value(inst0, WeightState.initial(0, 4), SolverConfig(lam=1.0), np.zeros(4)) == 0.0
    assert objective_value(inst, w, SolverConfig(lam=1.0), np.zeros(4)) == pytest.approx(0.7 * 2.0 * 4)


def test_objective_scalar_hand_value():
    inst = ProblemInstance(np.array([[2.0]]), np.array([2.0]))
    w = WeightState(np.array([[1.0]]), np.array([1.0]))
    value = objective_value(inst, w, SolverConfig(lam=0.5), np.array([1.0]))
    # independent scalar evaluation: 0.5*(2*1-2)^2 + 0.5*1*1*|1|
    expected = 0.5 * (2.0 * 1.0 - 2.0) ** 2 + 0.5 * 1.0 * 1.0 * abs(1.0)
    assert value == expected == 0.5


def test_objective_reduces_to_l1_l1(rng):
    n, m = 20, 8
    phi = rng.standard_normal((m, n))
    y = rng.standard_normal(m)
    z = rng.standard_normal(n)
    x = rng.standard_normal(n)
    inst = ProblemInstance(phi, y, (z,))
    lam = 0.3
    ref = 0.5 * np.sum((phi @ x - y) ** 2) + lam * (np.sum(np.abs(x)) + np.sum(np.abs(x - z)))
    got = objective_value(inst, WeightState.uniform(1, n), SolverConfig(lam=lam), x)
    assert got == pytest.approx(ref, rel=1e-14)


def test_objective_plain_l1_exact(rng):
    n, m = 15, 6
    phi = rng.standard_normal((m, n))
    y = rng.standard_normal(m)
    x = rng.standard_normal(n)
    inst = ProblemInstance(phi, y)
    lam = 0.2
    r = phi @ x - y
    ref = 0.5 * float(r @ r) + lam * float(np.abs(x).sum())
    assert objective_value(inst, WeightState.initial(0, n), SolverConfig(lam=lam), x) == ref


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), theta=st.floats(0.0, 1.0), num_sis=st.integers(0, 3))
def test_objective_convex_in_x(seed, theta, num_sis):
    rng = np.random.default_rng(seed)
    n, m = 12, 5
    inst = ProblemInstance(
        rng.standard_normal((m, n)), rng.standard_normal(m),
        tuple(rng.standard_normal(n) for _ in range(num_sis)),
    )
    w = WeightState(rng.uniform(0.1, 2.0, (num_sis + 1, n)), rng.dirichlet(np.ones(num_sis + 1)))
    cfg = SolverConfig(lam=0.7)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    lhs = objective_value(inst, w, cfg, theta * a + (1 - theta) * b)
    rhs = theta * objective_value(inst, w, cfg, a) + (1 - theta) * objective_value(inst, w, cfg, b)
    assert lhs <= rhs + 1e-10


def test_objective_dimension_mismatch():
    inst = ProblemInstance(np.eye(3), np.zeros(3))
    with pytest.raises(InvariantError):
        objective_value(inst, WeightState.initial(0, 3), SolverConfig(), np.zeros(4))
    with pytest.raises(InvariantError):
        objective_value(inst, WeightState.initial(1, 3), SolverConfig(), np.zeros(3))


def test_instance_invariants():
    with pytest.raises(InvariantError):
        ProblemInstance(np.eye(3), np.zeros(2))
    with pytest.raises(InvariantError):
        ProblemInstance(np.eye(3), np.zeros(3), (np.zeros(4),))
    with pytest.raises(InvariantError):
        ProblemInstance(np.eye(3), np.zeros(3), x_true=np.ones(3))
    with pytest.raises(InvariantError):
        ProblemInstance(np.zeros((0, 3)), np.zeros(0))
    # m > n is allowed
    inst = ProblemInstance(np.ones((5, 2)), np.full(5, 2.0), x_true=np.array([1.0, 1.0]))
    assert (inst.m, inst.n, inst.num_sis) == (5, 2, 0)


def test_instance_is_read_only():
    inst = ProblemInstance(np.eye(2), np.ones(2), (np.ones(2),))
    with pytest.raises(ValueError):
        inst.phi[0, 0] = 3.0
    with pytest.raises(ValueError):
        inst.side_infos[0][0] = 3.0


def test_initial_weights_follow_algorithm_start():
    w = WeightState.initial(3, 5)
    np.testing.assert_array_equal(w.intra[0], np.ones(5))
    np.testing.assert_array_equal(w.intra[1:], np.zeros((3, 5)))
    np.testing.assert_array_equal(w.inter, [1.0, 0.0, 0.0, 0.0])


@pytest.mark.parametrize(
    "kwargs",
    [dict(lam=0.0), dict(epsilon=-1.0), dict(stop_tol=0.0), dict(max_iters=0), dict(lipschitz=-2.0)],
)
def test_config_invariants(kwargs):
    with pytest.raises(InvariantError):
        SolverConfig(**kwargs)


def test_power_iteration_directive_validation():
    with pytest.raises(InvariantError):
        PowerIteration(iters=0)
    with pytest.raises(InvariantError):
        PowerIteration(safety=0.9)
