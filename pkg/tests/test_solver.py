import numpy as np
import pytest

from conftest import (
    constrained_null_overlap_instance,
    hard_case_instance,
    load_fixture,
    random_nonconvex_instance,
)
from trskit import (
    LinearConstraintBlock,
    SolveSettings,
    SymSparseMatrix,
    TrsInstance,
    boundary_push,
    secular_solve,
    solve,
)
from trskit.core import HollowSpec
from trskit.errors import (
    BadDirection,
    HollowConditionViolated,
    InfeasibleRegion,
    TightnessNotCertified,
)
from trskit.solver import project_ball, project_ball_and_halfspaces


def test_project_ball():
    assert np.array_equal(project_ball(np.array([0.3, 0.4])), [0.3, 0.4])
    out = project_ball(np.array([3.0, 4.0]))
    assert np.allclose(out, [0.6, 0.8])


def test_dykstra_matches_direct_projection():
    # projection onto ball intersect halfspace {y_2 >= 0.5}; cross-check
    # against a fine grid search over the feasible set
    rng = np.random.default_rng(40)
    A = np.array([[0.0, 1.0]])
    b = np.array([0.5])
    for _ in range(10):
        z = rng.standard_normal(2) * 2.0
        p = project_ball_and_halfspaces(z, A, b, 500)
        assert np.linalg.norm(p) <= 1.0 + 1e-8
        assert p[1] >= 0.5 - 1e-8
        # optimality: no feasible grid point is closer to z
        ys = np.linspace(-1, 1, 201)
        xs = np.linspace(-1, 1, 201)
        X, Y = np.meshgrid(xs, ys)
        mask = (X**2 + Y**2 <= 1.0) & (Y >= 0.5)
        d2 = (X - z[0]) ** 2 + (Y - z[1]) ** 2
        assert np.sum((p - z) ** 2) <= d2[mask].min() + 1e-4


def test_dykstra_infeasible_row():
    with pytest.raises(InfeasibleRegion):
        project_ball_and_halfspaces(
            np.zeros(2), np.array([[0.0, 0.0]]), np.array([1.0]), 50
        )


def test_boundary_push_reaches_sphere():
    rng = np.random.default_rng(41)
    for _ in range(30):
        n = int(rng.integers(1, 10))
        y = rng.standard_normal(n)
        y *= rng.random() * 0.95 / max(np.linalg.norm(y), 1e-12)
        d = rng.standard_normal(n)
        out, eps = boundary_push(y, d)
        assert eps >= 0.0
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)


def test_boundary_push_bad_direction():
    with pytest.raises(BadDirection):
        boundary_push(np.zeros(2), np.zeros(2))
    with pytest.raises(BadDirection):
        boundary_push(np.array([2.0, 0.0]), np.array([1.0, 0.0]))


def test_classical_matches_oracle():
    rng = np.random.default_rng(42)
    for trial in range(15):
        inst = random_nonconvex_instance(rng, int(rng.integers(5, 30)))
        sol = solve(inst, SolveSettings(seed=trial))
        _, exact, _ = secular_solve(inst.Q.to_dense(), inst.g)
        scale = max(1.0, abs(exact))
        assert abs(sol.h_value - exact) <= 1e-5 * scale
        assert abs(sol.norm_y - 1.0) <= 1e-6
        assert sol.tight


def test_hard_case_same_code_path():
    rng = np.random.default_rng(43)
    for trial in range(10):
        inst = hard_case_instance(rng, int(rng.integers(5, 25)))
        sol = solve(inst, SolveSettings(seed=trial))
        _, exact, _ = secular_solve(inst.Q.to_dense(), inst.g)
        assert abs(sol.h_value - exact) <= 1e-5 * max(1.0, abs(exact))
        assert abs(sol.norm_y - 1.0) <= 1e-6


def test_lower_bound_invariant():
    # the surrogate value never exceeds the original objective value
    rng = np.random.default_rng(44)
    for trial in range(10):
        inst = random_nonconvex_instance(rng, 12)
        sol = solve(inst, SolveSettings(seed=trial))
        assert sol.f_value <= sol.h_value + 1e-8 * max(1.0, abs(sol.h_value))


def test_constrained_lower_bound_only():
    inst = load_fixture("example_2_9.trs")
    with pytest.raises(TightnessNotCertified) as err:
        solve(inst)
    sol = err.value.solution
    assert sol.f_value == pytest.approx(-2.75, abs=1e-6)
    assert sol.norm_y < 1.0 - 1e-3
    assert not sol.tight


def test_constrained_tight_with_witness_push():
    rng = np.random.default_rng(45)
    for trial in range(8):
        inst = constrained_null_overlap_instance(rng)
        sol = solve(inst, SolveSettings(seed=trial))
        assert abs(sol.norm_y - 1.0) <= 1e-6
        assert sol.tight
        if inst.constraints is not None:
            assert np.min(inst.constraints.A @ sol.y - inst.constraints.b) >= -1e-8


def test_annulus_variant():
    inst = load_fixture("annulus.trs")
    sol = solve(inst)
    bare = solve(TrsInstance(inst.Q, inst.g))
    assert sol.h_value == pytest.approx(bare.h_value, abs=1e-8)
    assert sol.norm_y >= 0.9


def test_hollow_ellipsoid_variant():
    inst = load_fixture("hollow_ellipsoid.trs")
    sol = solve(inst)
    assert sol.tight
    assert not inst.hollow.excludes(sol.y)


def test_hollow_violation_raises():
    # excluded ellipsoid touching the unit sphere: containment fails
    Q = SymSparseMatrix.from_dense(np.diag([1.0, -1.0]))
    from trskit import Ellipsoid

    e = Ellipsoid(np.eye(2), np.zeros(2), -1.0)  # the whole unit ball
    inst = TrsInstance(Q, np.zeros(2), hollow=HollowSpec.ellipsoid_union([e]))
    with pytest.raises(HollowConditionViolated):
        solve(inst)


def test_infeasible_constraints_detected():
    Q = SymSparseMatrix.from_dense(np.diag([1.0, -1.0]))
    inst = TrsInstance(
        Q, np.zeros(2), LinearConstraintBlock(np.array([[1.0, 0.0]]), np.array([2.0]))
    )
    with pytest.raises(InfeasibleRegion):
        solve(inst)


def test_convex_instance_direct_path():
    Q = SymSparseMatrix.from_dense(np.diag([1.0, 2.0]))
    sol = solve(TrsInstance(Q, np.array([0.3, -0.2])))
    # interior unconstrained minimum of a convex quadratic
    expected = -(0.3**2 / 1.0 + 0.2**2 / 2.0)
    assert sol.h_value == pytest.approx(expected, abs=1e-6)
    assert sol.diagnostics.get("convex_path")


def test_determinism():
    rng = np.random.default_rng(46)
    inst = random_nonconvex_instance(rng, 15)
    a = solve(inst, SolveSettings(seed=7))
    b = solve(inst, SolveSettings(seed=7))
    assert np.array_equal(a.y, b.y)
    assert a.h_value == b.h_value


def test_iteration_scaling_with_smoothness():
    # doubling the smoothness (Q - cI with compensated shift) should not blow
    # iterations up by more than ~sqrt(2) on matched instances
    rng = np.random.default_rng(47)
    ratios = []
    for trial in range(5):
        inst = random_nonconvex_instance(rng, 20)
        base = solve(inst, SolveSettings(seed=trial))
        norm = np.abs(np.linalg.eigvalsh(inst.Q.to_dense())).max()
        Q2 = SymSparseMatrix.from_dense(inst.Q.to_dense() - norm * np.eye(20))
        inst2 = TrsInstance(Q2, inst.g)
        doubled = solve(inst2, SolveSettings(seed=trial))
        ratios.append(doubled.iterations / max(base.iterations, 1))
    assert np.median(ratios) <= 1.6 + 0.3
