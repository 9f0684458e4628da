"""Randomized Lanczos estimation of the extreme eigenvalues of Q.

The minimum-eigenvalue estimate drives the convex reformulation shift; the
spectral-norm estimate sizes the gradient-method step.  Full
reorthogonalization is used: the matrices here are desk scale, and it
removes ghost eigenvalues entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import IterationCapExceeded
from .linalg import matvec

#: iteration-budget constant in ceil(C * sqrt(||Q||/eps) * log(n/delta))
BUDGET_CONSTANT = 4.0

_BREAKDOWN_TOL = 1e-13


@dataclass
class EigenEstimate:
    """Minimum-eigenvalue estimate from a Krylov subspace.

    lambda_hat is a Rayleigh quotient over the subspace, hence always an
    upper bound on the true minimum eigenvalue.
    """

    lambda_hat: float
    vector_hat: np.ndarray
    epsilon: float
    delta: float
    iterations: int
    seed: int
    restarts: int = 0
    residual: float = 0.0


def gershgorin_norm_bound(Q):
    """Cheap O(nnz) upper bound on the spectral norm of Q."""
    row_sums = np.zeros(Q.n)
    np.add.at(row_sums, Q.rows, np.abs(Q.vals))
    off = Q.rows != Q.cols
    np.add.at(row_sums, Q.cols[off], np.abs(Q.vals[off]))
    return float(row_sums.max(initial=0.0))


def iteration_budget(Q, epsilon, delta):
    """Budget ceil(C * sqrt(||Q||_est / eps) * log(n / delta)), capped at n."""
    norm_bound = max(gershgorin_norm_bound(Q), epsilon)
    budget = math.ceil(
        BUDGET_CONSTANT * math.sqrt(norm_bound / epsilon) * math.log(max(Q.n, 2) / delta)
    )
    return min(max(budget, 1), Q.n)


def _lanczos(Q, seed, max_iter, stop):
    """Lanczos with full reorthogonalization.

    `stop(ritz_values, ritz_vectors_T, betas_next)` is called once per step
    with the current tridiagonal eigenpairs and must return True to halt.
    Returns (V, alphas, betas, ritz_values, S, iterations, restarts).
    """
    n = Q.n
    rng = np.random.default_rng(seed)
    scale = max(gershgorin_norm_bound(Q), 1.0)

    V = np.zeros((n, max_iter))
    alphas = np.zeros(max_iter)
    betas = np.zeros(max_iter)  # betas[j] links vector j to j+1
    restarts = 0

    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    j = 0
    w = None
    while j < max_iter:
        V[:, j] = q
        u = matvec(Q, q)
        alphas[j] = q @ u
        r = u - alphas[j] * q
        if j > 0:
            r -= betas[j - 1] * V[:, j - 1]
        # full reorthogonalization, twice for safety
        r -= V[:, : j + 1] @ (V[:, : j + 1].T @ r)
        r -= V[:, : j + 1] @ (V[:, : j + 1].T @ r)
        beta = np.linalg.norm(r)

        w, S = eigh_tridiagonal(alphas[: j + 1], betas[:j])
        if stop(w, S, beta) or j + 1 >= max_iter:
            j += 1
            break

        if beta < _BREAKDOWN_TOL * scale:
            if j + 1 >= n:
                j += 1
                break
            # invariant subspace found: continue with a fresh random vector
            restarts += 1
            r = rng.standard_normal(n)
            r -= V[:, : j + 1] @ (V[:, : j + 1].T @ r)
            beta = np.linalg.norm(r)
            betas[j] = 0.0
        else:
            betas[j] = beta
        q = r / np.linalg.norm(r)
        j += 1

    return V[:, :j], w, S, j, restarts


def min_eigenvalue(Q, epsilon, delta, seed):
    """Estimate the minimum eigenvalue and eigenvector of Q.

    Runs seeded randomized Lanczos until the minimum Ritz pair has residual
    ||Q v - theta v|| <= epsilon, so |lambda_hat - lambda_min| <= epsilon
    whenever the Krylov space has seen the bottom of the spectrum (which the
    random start guarantees with probability 1 - delta at the budgeted
    iteration count).
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")

    def stop(w, S, beta_next):
        # margin under epsilon: the cheap estimate must survive the exact
        # residual check below
        return beta_next * abs(S[-1, 0]) <= 0.5 * epsilon

    V, w, S, iters, restarts = _lanczos(Q, seed, Q.n, stop)
    v = V @ S[:, 0]
    v /= np.linalg.norm(v)
    residual = float(np.linalg.norm(matvec(Q, v) - w[0] * v))
    if residual > epsilon:
        # the cheap in-loop estimate passed but the true residual did not
        raise IterationCapExceeded(
            f"Lanczos residual {residual:.3e} > epsilon {epsilon:.3e} "
            f"after {iters} iterations (cap n={Q.n})",
            estimate=EigenEstimate(
                float(w[0]), v, epsilon, delta, iters, seed, restarts, residual
            ),
        )
    return EigenEstimate(float(w[0]), v, epsilon, delta, iters, seed, restarts, residual)


def spectral_norm_estimate(Q, seed):
    """Upper estimate of ||Q|| from the extreme Ritz values, inflated by 1%.

    The inflation covers the residual of the extreme pairs, so the returned
    value is an upper bound in practice while staying within a few percent of
    the truth.
    """
    if Q.nnz == 0:
        return 0.0

    def stop(w, S, beta_next):
        spread = max(abs(w[0]), abs(w[-1]))
        if spread == 0.0:
            return beta_next == 0.0
        res = beta_next * max(abs(S[-1, 0]), abs(S[-1, -1]))
        return res <= 0.009 * spread

    _, w, _, _, _ = _lanczos(Q, seed, Q.n, stop)
    return 1.01 * float(max(abs(w[0]), abs(w[-1])))
