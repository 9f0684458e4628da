"""Convex surrogate objective built from the eigenvalue-shift.

Given an estimate lambda_hat of the minimum eigenvalue with accuracy
epsilon, the shift gamma = lambda_hat - epsilon is a guaranteed
underestimate of lambda_min, so Q - gamma*I stays positive semidefinite and

    f_gamma(y) = y'(Q - gamma I)y + 2g'y + gamma

is a convex underestimator of h(y) = y'Qy + 2g'y on the unit ball, with
equality exactly on the unit sphere.  The shift is applied inside the
matvec; Q - gamma*I is never materialized, preserving sparsity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import EigenEstimate, spectral_norm_estimate
from .errors import DimensionMismatch, NotNonconvex
from .linalg import matvec


@dataclass
class ReformulatedObjective:
    """Shifted convex quadratic with its gradient and smoothness constant."""

    Q: object  # SymSparseMatrix
    g: np.ndarray
    gamma: float
    epsilon_used: float
    smoothness_L: float


def build(Q, g, est: EigenEstimate, norm_estimate=None):
    """Build the convex surrogate from an eigenvalue estimate.

    Requires est.lambda_hat < 0 (the nonconvex regime); otherwise raises
    NotNonconvex and the caller should minimize h directly, which is already
    convex.
    """
    if est.lambda_hat >= 0.0:
        raise NotNonconvex(
            f"lambda_hat = {est.lambda_hat:.6g} >= 0; the objective appears convex"
        )
    g = np.asarray(g, dtype=np.float64).ravel()
    if g.shape[0] != Q.n:
        raise DimensionMismatch("g dimension does not match Q")
    gamma = est.lambda_hat - est.epsilon
    if norm_estimate is None:
        norm_estimate = spectral_norm_estimate(Q, est.seed)
    L = 2.0 * (norm_estimate - gamma)
    return ReformulatedObjective(Q, g, gamma, est.epsilon, L)


def eval_f(obj, y):
    """Surrogate value f_gamma(y); one matvec."""
    return eval_and_grad_f(obj, y)[0]


def grad_f(obj, y):
    """Surrogate gradient 2(Q - gamma I)y + 2g; one matvec."""
    return eval_and_grad_f(obj, y)[1]


def eval_and_grad_f(obj, y):
    """Value and gradient sharing a single matvec."""
    y = np.asarray(y, dtype=np.float64).ravel()
    Qy = matvec(obj.Q, y) - obj.gamma * y
    val = float(y @ Qy + 2.0 * obj.g @ y + obj.gamma)
    grad = 2.0 * (Qy + obj.g)
    return val, grad


def eval_h(Q, g, y):
    """Original objective h(y) = y'Qy + 2g'y."""
    y = np.asarray(y, dtype=np.float64).ravel()
    g = np.asarray(g, dtype=np.float64).ravel()
    return float(y @ matvec(Q, y) + 2.0 * g @ y)
