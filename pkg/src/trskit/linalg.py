"""Dense and sparse numerical kernels.

Sparse symmetric matvec, dense symmetric eigendecomposition, null-space
extraction, Cholesky with pivot reporting, and a small two-phase simplex
used only for LP feasibility questions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    CycleGuardTripped,
    DimensionMismatch,
    NotPositiveDefinite,
)

FEAS_TOL = 1e-9


def matvec(Q, v):
    """Product Qv for a SymSparseMatrix with implicit symmetric completion.

    Cost is O(nnz).
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (Q.n,):
        raise DimensionMismatch(f"vector has shape {v.shape}, expected ({Q.n},)")
    out = np.zeros(Q.n)
    np.add.at(out, Q.rows, Q.vals * v[Q.cols])
    off = Q.rows != Q.cols
    np.add.at(out, Q.cols[off], Q.vals[off] * v[Q.rows[off]])
    return out


@dataclass
class DenseEig:
    """Full spectrum of a symmetric matrix: ascending eigenvalues paired with
    orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def dense_eig(M, cap=500):
    """Full symmetric eigendecomposition (dense path, n <= cap)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("matrix must be square")
    if M.shape[0] > cap:
        raise DimensionMismatch(f"dense eigendecomposition capped at n={cap}")
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise ConvergenceFailure(str(exc)) from exc
    return DenseEig(w, V)


def null_space_basis(M, tol=1e-10):
    """Orthonormal basis of the span of eigenvectors with |eigenvalue|
    <= tol * ||M||.  Returns an (n, k) matrix, possibly with k = 0."""
    eig = dense_eig(M)
    scale = float(np.max(np.abs(eig.eigenvalues))) if eig.eigenvalues.size else 0.0
    if scale == 0.0:
        return eig.eigenvectors
    mask = np.abs(eig.eigenvalues) <= tol * scale
    return eig.eigenvectors[:, mask]


def cholesky(W):
    """Lower-triangular L with LL' = W; raises NotPositiveDefinite with the
    failing pivot index when W is not positive definite."""
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[0]
    if W.ndim != 2 or W.shape[1] != n:
        raise DimensionMismatch("matrix must be square")
    L = np.zeros((n, n))
    for j in range(n):
        d = W[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0 or not np.isfinite(d):
            raise NotPositiveDefinite(j)
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (W[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass
class LpResult:
    feasible: bool
    witness: np.ndarray | None = None


def lp_feasible(A_ineq=None, b_ineq=None, A_eq=None, b_eq=None, box=None):
    """Feasibility of {A_ineq x <= b_ineq, A_eq x = b_eq, lo <= x <= hi}.

    `box` is a (lo, hi) pair of vectors; finite bounds on every variable are
    required (they guarantee termination of the phase-I simplex).  Returns
    LpResult(feasible, witness).  Bland's rule is used throughout, so cycling
    cannot occur; an iteration guard is kept defensively.
    """
    lo, hi = box
    lo = np.asarray(lo, dtype=np.float64).ravel()
    hi = np.asarray(hi, dtype=np.float64).ravel()
    nv = lo.shape[0]
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("box bounds must be finite")

    A_ineq = np.zeros((0, nv)) if A_ineq is None else np.atleast_2d(A_ineq)
    b_ineq = np.zeros(0) if b_ineq is None else np.asarray(b_ineq, float).ravel()
    A_eq = np.zeros((0, nv)) if A_eq is None else np.atleast_2d(A_eq)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
    if A_ineq.shape[1] != nv or A_eq.shape[1] != nv:
        raise DimensionMismatch("constraint matrices do not match box dimension")

    # shift to z = x - lo in [0, u]; upper bounds become explicit rows
    u = hi - lo
    if np.any(u < -FEAS_TOL):
        return LpResult(False)
    u = np.maximum(u, 0.0)

    rows_A = [A_ineq, np.eye(nv), A_eq]
    rows_b = [b_ineq - A_ineq @ lo, u, b_eq - A_eq @ lo]
    senses = ["<="] * (A_ineq.shape[0] + nv) + ["="] * A_eq.shape[0]
    A = np.vstack(rows_A)
    b = np.concatenate(rows_b)
    m = A.shape[0]

    # slack columns for inequality rows
    n_slack = senses.count("<=")
    T = np.zeros((m, nv + n_slack))
    T[:, :nv] = A
    k = 0
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, nv + k] = 1.0
            k += 1
    # normalize to nonnegative right-hand sides
    neg = b < 0
    T[neg] *= -1.0
    b = np.where(neg, -b, b)

    # phase-I: artificial variable per row, minimize their sum
    ncols = T.shape[1]
    tab = np.hstack([T, np.eye(m), b[:, None]])
    basis = list(range(ncols, ncols + m))
    cost = np.zeros(ncols + m)
    cost[ncols:] = 1.0

    total = ncols + m
    for _ in range(20000):
        # reduced costs under the current basis
        cb = cost[basis]
        y = cb @ tab[:, :total]
        red = cost - y
        red[basis] = 0.0
        entering = -1
        for j in range(total):  # Bland: smallest eligible index
            if red[j] < -1e-12:
                entering = j
                break
        if entering < 0:
            break
        col = tab[:, entering]
        best = -1
        best_ratio = np.inf
        for i in range(m):
            if col[i] > 1e-12:
                ratio = tab[i, -1] / col[i]
                if ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15
                    and (best < 0 or basis[i] < basis[best])
                ):
                    best = i
                    best_ratio = ratio
        if best < 0:
            # phase-I objective is bounded below by 0, so this is unreachable
            raise CycleGuardTripped("unbounded phase-I pivot column")
        piv = tab[best, entering]
        tab[best] /= piv
        for i in range(m):
            if i != best and tab[i, entering] != 0.0:
                tab[i] -= tab[i, entering] * tab[best]
        basis[best] = entering
    else:  # pragma: no cover - Bland's rule precludes cycling
        raise CycleGuardTripped("phase-I iteration guard tripped")

    obj = sum(tab[i, -1] for i in range(m) if basis[i] >= ncols)
    if obj > FEAS_TOL:
        return LpResult(False)

    z = np.zeros(ncols + m)
    for i, bi in enumerate(basis):
        z[bi] = tab[i, -1]
    witness = z[:nv] + lo
    return LpResult(True, witness)
