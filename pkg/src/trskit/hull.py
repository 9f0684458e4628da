"""Epigraph convex-hull certification machinery.

The epigraph set is

    X = { (y, x_last) : ||y|| <= 1, Ay - b >= 0, h(y) <= x_last },

viewed in homogenized coordinates x = [y; 1; x_last].  The pencil
W_t = (1-t) W_0 + t W_1 aggregates the ball constraint with the objective;
at the critical weight s = 1/(1 - lambda_Q) the aggregate becomes the
second-order-cone-representable inequality (written at the slice x_{n+1}=1)

    y'(Q - lambda_Q I) y + 2 g'y + lambda_Q <= x_last,

i.e. f(y) <= x_last.  When some minimum eigenvector d of Q satisfies Ad = 0,
intersecting this with the ball and the linear constraints describes conv(X)
exactly, and interior points decompose as convex combinations of two
boundary points along d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conditions import check_condition_convexify
from .errors import DomainError, SpectrumPropertyViolated, WitnessUnavailable
from .linalg import dense_eig
from .reformulate import eval_h


@dataclass
class EpigraphPoint:
    """A point (y, x_last) of the homogenized slice x = [y; 1; x_last]."""

    y: np.ndarray
    x_last: float

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        self.x_last = float(self.x_last)


def compute_s(lambda_q):
    """Critical aggregation weight s = 1/(1 - lambda_Q), in (0, 1)."""
    if lambda_q >= 0.0:
        raise DomainError(f"lambda_Q = {lambda_q} must be negative")
    return 1.0 / (1.0 - lambda_q)


def build_Wt(inst, t):
    """Dense (n+2)x(n+2) pencil matrix W_t = (1-t) W_0 + t W_1.

    W_0 = diag(I_n, -1, 0) encodes ||y||^2 <= 1; W_1 stacks Q, g, and the
    -1/2 coupling of the homogenizing and epigraph coordinates.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t = {t} outside [0, 1]")
    n = inst.n
    W0 = np.zeros((n + 2, n + 2))
    W0[:n, :n] = np.eye(n)
    W0[n, n] = -1.0
    W1 = np.zeros((n + 2, n + 2))
    W1[:n, :n] = inst.Q.to_dense()
    W1[:n, n] = inst.g
    W1[n, :n] = inst.g
    W1[n, n + 1] = -0.5
    W1[n + 1, n] = -0.5
    return (1.0 - t) * W0 + t * W1


def _lambda_q(inst):
    return float(dense_eig(inst.Q.to_dense()).eigenvalues[0])


@dataclass
class SpectrumPathReport:
    s: float
    grid_points: int
    singular_value_at_s: float
    negative_counts: list


def verify_spectrum_path(inst, grid_points=101):
    """Certify the eigenvalue trajectory of the pencil.

    Exactly one negative eigenvalue of W_t for t in [0, s], singularity at
    t = s, and at least two negatives once t clears s by one grid step.
    Raises SpectrumPropertyViolated on any failure.
    """
    lam = _lambda_q(inst)
    s = compute_s(lam)
    counts = []
    step = 1.0 / (grid_points - 1)
    for t in np.linspace(0.0, 1.0, grid_points):
        W = build_Wt(inst, float(t))
        w = dense_eig(W).eigenvalues
        scale = max(1.0, float(np.abs(w).max()))
        neg = int(np.sum(w < -1e-10 * scale))
        counts.append(neg)
        if t <= s + 1e-12 and neg != 1:
            raise SpectrumPropertyViolated(float(t), neg)
        if t > s + step and neg < 2:
            raise SpectrumPropertyViolated(float(t), neg)
    Ws = build_Wt(inst, s)
    w = dense_eig(Ws).eigenvalues
    scale = max(1.0, float(np.abs(w).max()))
    min_abs = float(np.min(np.abs(w)))
    if min_abs > 1e-8 * scale:
        raise SpectrumPropertyViolated(s, counts)
    return SpectrumPathReport(s, grid_points, min_abs, counts)


def _f_value(inst, lam, y):
    return float(y @ (inst.Q.to_dense() @ y) - lam * (y @ y) + 2.0 * inst.g @ y + lam)


def in_Fs(inst, p):
    """Aggregate inequality f(y) <= x_last at the homogenized slice."""
    lam = _lambda_q(inst)
    fv = _f_value(inst, lam, p.y)
    scale = max(1.0, abs(fv), abs(p.x_last))
    return fv <= p.x_last + 1e-10 * scale


def in_conv_X(inst, p):
    """Membership in the hull description: ball, linear constraints, and the
    aggregate inequality.  Exact hull iff the convexify condition holds;
    otherwise this is an outer approximation."""
    tol = 1e-10 * max(1.0, float(np.linalg.norm(p.y)))
    if float(np.linalg.norm(p.y)) > 1.0 + tol:
        return False
    if inst.constraints is not None and inst.constraints.m > 0:
        resid = inst.constraints.A @ p.y - inst.constraints.b
        if np.min(resid) < -1e-10 * max(1.0, float(np.abs(inst.constraints.b).max())):
            return False
    return in_Fs(inst, p)


def in_X(inst, p, tol=1e-10):
    """Membership in the epigraph set X itself (h instead of f)."""
    if float(np.linalg.norm(p.y)) > 1.0 + tol:
        return False
    if inst.constraints is not None and inst.constraints.m > 0:
        if np.min(inst.constraints.A @ p.y - inst.constraints.b) < -tol:
            return False
    hv = eval_h(inst.Q, inst.g, p.y)
    return hv <= p.x_last + tol * max(1.0, abs(hv), abs(p.x_last))


@dataclass
class Combination:
    """Decomposition p = w_delta * x_delta + w_eps * x_eps with both
    endpoints in X."""

    x_delta: EpigraphPoint
    x_eps: EpigraphPoint
    weights: tuple


IN_X = "InX"


def _sphere_steps(y, d):
    """Roots -delta < 0 < eps of ||y + eta d||^2 = 1, via the stable
    quadratic variant (the root pair multiplies to (||y||^2 - 1)/||d||^2,
    avoiding cancellation for interior y)."""
    a = float(d @ d)
    bq = float(y @ d)
    c = float(y @ y) - 1.0
    disc = bq * bq - a * c
    root = np.sqrt(max(disc, 0.0))
    if bq >= 0.0:
        eta_neg = (-bq - root) / a
        eta_pos = c / (a * eta_neg) if eta_neg != 0.0 else 0.0
    else:
        eta_pos = (-bq + root) / a
        eta_neg = c / (a * eta_pos) if eta_pos != 0.0 else 0.0
    return -eta_neg, eta_pos  # (delta, eps), both nonnegative


def hull_witness(inst, p):
    """Decompose a hull member that is not in X into two X boundary points.

    Returns the string InX when p already lies in X; otherwise a Combination
    along the convexify-condition witness d: both endpoints sit on the unit
    sphere (where f = h) and on the same constraint slice (Ad = 0), with
    epigraph coordinates shifted linearly by 2 g'd eta.
    """
    if in_X(inst, p):
        return IN_X
    report = check_condition_convexify(inst)
    if not report.satisfied:
        raise WitnessUnavailable(
            "no minimum eigenvector lies in the constraint null space; the "
            "hull description is only an outer approximation here"
        )
    d = report.witness
    delta, eps = _sphere_steps(p.y, d)
    gd = float(inst.g @ d)
    x_delta = EpigraphPoint(p.y - delta * d, p.x_last - 2.0 * gd * delta)
    x_eps = EpigraphPoint(p.y + eps * d, p.x_last + 2.0 * gd * eps)
    w_delta = eps / (delta + eps)
    w_eps = delta / (delta + eps)
    return Combination(x_delta, x_eps, (w_delta, w_eps))


def extreme_point_filter(inst, p):
    """Necessary test for extremality in conv(X): certified non-extreme
    (False) when ||y|| < 1; True only flags an uncertified candidate."""
    return float(np.linalg.norm(p.y)) >= 1.0 - 1e-10
