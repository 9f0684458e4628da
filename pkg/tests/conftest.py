import pathlib

import numpy as np
import pytest

from trskit import LinearConstraintBlock, SymSparseMatrix, TrsInstance

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def load_fixture(name):
    from trskit import parse_instance

    return parse_instance((FIXTURES / name).read_text())


def random_symmetric(rng, n, density=0.3, scale=1.0):
    """Random sparse symmetric matrix as a SymSparseMatrix."""
    M = np.zeros((n, n))
    mask = rng.random((n, n)) < density
    vals = rng.standard_normal((n, n)) * scale
    M[mask] = vals[mask]
    M = (M + M.T) / 2.0
    return SymSparseMatrix.from_dense(M, drop_tol=0.0)


def random_nonconvex_instance(rng, n, density=0.3, g_scale=0.5):
    """Random instance with a guaranteed negative minimum eigenvalue."""
    Q = random_symmetric(rng, n, density)
    lam = np.linalg.eigvalsh(Q.to_dense())[0]
    if lam >= -0.1:
        # shift the diagonal down until properly indefinite
        D = Q.to_dense() - (lam + 0.5) * np.eye(n)
        Q = SymSparseMatrix.from_dense(D)
    g = rng.standard_normal(n) * g_scale
    return TrsInstance(Q, g)


def hard_case_instance(rng, n, density=0.3, g_scale=0.5):
    """Instance with g orthogonal to the entire bottom eigenspace."""
    inst = random_nonconvex_instance(rng, n, density, g_scale)
    M = inst.Q.to_dense()
    w, V = np.linalg.eigh(M)
    lam = w[0]
    scale = max(1.0, np.abs(w).max())
    basis = V[:, w - lam <= 1e-8 * scale]
    g = inst.g - basis @ (basis.T @ inst.g)
    return TrsInstance(inst.Q, g)


def constrained_null_overlap_instance(rng, n=3):
    """Constraints constructed so a bottom eigenvector lies in Null(A)."""
    inst = random_nonconvex_instance(rng, n)
    w, V = np.linalg.eigh(inst.Q.to_dense())
    d = V[:, 0]
    # two rows orthogonal to d; right-hand sides keep the origin feasible
    rows = []
    while len(rows) < 2:
        a = rng.standard_normal(n)
        a -= (a @ d) * d
        if np.linalg.norm(a) > 1e-6:
            rows.append(a / np.linalg.norm(a))
    A = np.array(rows)
    b = -rng.random(2) * 0.5 - 0.2
    return TrsInstance(inst.Q, inst.g, LinearConstraintBlock(A, b))
