import numpy as np
import pytest

from conftest import load_fixture
from trskit import (
    Ellipsoid,
    HollowSpec,
    LinearConstraintBlock,
    SymSparseMatrix,
    TrsInstance,
    parse_instance,
    serialize_instance,
    validate,
)
from trskit.errors import DimensionMismatch, NotPositiveDefinite, ParseError


def test_sym_sparse_roundtrip():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((6, 6))
    M = (M + M.T) / 2
    Q = SymSparseMatrix.from_dense(M)
    assert np.allclose(Q.to_dense(), M)


def test_sym_sparse_rejects_lower_triangle():
    with pytest.raises(DimensionMismatch):
        SymSparseMatrix(2, [1], [0], [1.0])


def test_sym_sparse_rejects_duplicates_and_range():
    with pytest.raises(DimensionMismatch):
        SymSparseMatrix(2, [0, 0], [1, 1], [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        SymSparseMatrix(2, [0], [5], [1.0])
    with pytest.raises(DimensionMismatch):
        SymSparseMatrix(2, [0], [1], [np.nan])


def test_ellipsoid_requires_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        Ellipsoid(np.diag([1.0, -1.0]), np.zeros(2), -1.0)


def test_instance_dimension_checks():
    Q = SymSparseMatrix.from_dense(np.diag([1.0, -1.0]))
    with pytest.raises(DimensionMismatch):
        TrsInstance(Q, np.zeros(3))
    with pytest.raises(DimensionMismatch):
        TrsInstance(Q, np.zeros(2), LinearConstraintBlock(np.zeros((1, 3)), np.zeros(1)))


def test_parse_minimal():
    inst = parse_instance("dim 2\nQ 0 0 1.0\nQ 1 1 -1.0\ng 0 1.0\n")
    assert inst.n == 2
    assert np.allclose(inst.Q.to_dense(), np.diag([1.0, -1.0]))
    assert np.allclose(inst.g, [1.0, 0.0])
    assert inst.constraints is None


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_instance("")  # missing dim
    with pytest.raises(ParseError):
        parse_instance("Q 0 0 1.0\n")  # entries before dim
    with pytest.raises(ParseError):
        parse_instance("dim 2\nwhat 1\n")
    with pytest.raises(ParseError):
        parse_instance("dim 2\ng 0 nan\n")
    with pytest.raises(ParseError):
        parse_instance("dim 2\ndim 3\n")


def test_parse_constraint_block_and_comments():
    text = """
# comment line
dim 2
Q 0 0 1.0   # trailing comment
Q 1 1 -1.0
m 1
A 0 1 -1.0
b 0 0.5
"""
    inst = parse_instance(text)
    assert inst.constraints.m == 1
    assert np.allclose(inst.constraints.A, [[0.0, -1.0]])
    assert np.allclose(inst.constraints.b, [0.5])


def test_parse_hollow_variants():
    annulus = parse_instance("dim 2\nQ 1 1 -1.0\nhollow norm_lb 0.5\n")
    assert annulus.hollow.variant == "norm_lb"
    assert annulus.hollow.norm_lb == 0.5

    ell = parse_instance(
        "dim 2\nQ 1 1 -1.0\nhollow ellipsoid\nW 0 0 1.0\nW 1 1 2.0\nb 0 0.1\nc -0.5\n"
    )
    assert ell.hollow.variant == "ellipsoids"
    e = ell.hollow.ellipsoids[0]
    assert np.allclose(e.W, np.diag([1.0, 2.0]))
    assert np.allclose(e.b, [0.1, 0.0])
    assert e.c == -0.5


def test_b_lines_bind_to_enclosing_ellipsoid():
    text = (
        "dim 2\nQ 1 1 -1.0\nm 1\nA 0 0 1.0\nb 0 0.25\n"
        "hollow ellipsoid\nW 0 0 1.0\nW 1 1 1.0\nb 1 0.5\nc -0.2\n"
    )
    inst = parse_instance(text)
    assert np.allclose(inst.constraints.b, [0.25])
    assert np.allclose(inst.hollow.ellipsoids[0].b, [0.0, 0.5])


def test_serialize_roundtrip_exact():
    for name in (
        "classical_diag.trs",
        "example_2_6.trs",
        "example_2_9.trs",
        "annulus.trs",
        "hollow_ellipsoid.trs",
    ):
        inst = load_fixture(name)
        again = parse_instance(serialize_instance(inst))
        assert np.array_equal(again.Q.to_dense(), inst.Q.to_dense())
        assert np.array_equal(again.g, inst.g)
        if inst.constraints is None:
            assert again.constraints is None
        else:
            assert np.array_equal(again.constraints.A, inst.constraints.A)
            assert np.array_equal(again.constraints.b, inst.constraints.b)
        assert again.hollow.variant == inst.hollow.variant


def test_roundtrip_random_instances():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 8))
        M = rng.standard_normal((n, n))
        Q = SymSparseMatrix.from_dense((M + M.T) / 2)
        g = rng.standard_normal(n)
        inst = TrsInstance(Q, g)
        again = parse_instance(serialize_instance(inst))
        assert np.array_equal(again.Q.to_dense(), inst.Q.to_dense())
        assert np.array_equal(again.g, inst.g)


def test_validate_flags_convex_q():
    Q = SymSparseMatrix.from_dense(np.diag([1.0, 2.0]))
    diags = validate(TrsInstance(Q, np.zeros(2)))
    assert any("lambda_min" in d for d in diags)


def test_validate_flags_bad_hollow_bounds():
    Q = SymSparseMatrix.from_dense(np.diag([1.0, -1.0]))
    diags = validate(TrsInstance(Q, np.zeros(2), hollow=HollowSpec.norm_lower_bound(1.5)))
    assert any("l > 1" in d for d in diags)


def test_hollow_excludes():
    h = HollowSpec.norm_lower_bound(0.5)
    assert h.excludes(np.array([0.1, 0.1]))
    assert not h.excludes(np.array([0.9, 0.0]))
    e = Ellipsoid(np.eye(2), np.zeros(2), -0.25)
    hu = HollowSpec.ellipsoid_union([e])
    assert hu.excludes(np.array([0.1, 0.0]))
    assert not hu.excludes(np.array([0.9, 0.0]))
