"""Independent ground-truth solvers.

The secular-equation solver is deliberately algorithmically disjoint from
the first-order pipeline (full eigendecomposition + root finding in the
multiplier, versus shift + projected gradient), so agreement between the
two is meaningful evidence of correctness.  The grid solver brute-forces
constrained and hollow variants at n <= 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import HOLLOW_ELLIPSOIDS, HOLLOW_NORM_LB
from .errors import ConvergenceFailure, NoFeasibleGridPoint


@dataclass
class KktCertificate:
    """Optimality system residuals for a classical ball-constrained quadratic
    minimum: (Q + mu I) y = -g, mu >= 0, mu (1 - ||y||) = 0, Q + mu I >= 0."""

    y: np.ndarray
    mu: float
    stationarity: float
    complementarity: float
    dual_margin: float


def secular_solve(Q_dense, g):
    """Exact classical-TRS solution via eigendecomposition and the secular
    equation in the multiplier.

    Handles the hard case (g orthogonal to the minimum eigenspace) by adding
    a minimum-eigenvector component to reach the boundary.  Returns
    (y, value, KktCertificate).
    """
    Q_dense = np.asarray(Q_dense, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64).ravel()
    n = g.shape[0]
    w, U = np.linalg.eigh(Q_dense)
    gt = U.T @ g
    q1 = w[0]
    scale = max(1.0, float(np.abs(w).max()), float(np.linalg.norm(g)))

    def y_of(mu):
        with np.errstate(divide="ignore", invalid="ignore"):
            coeff = np.where(np.abs(w + mu) > 0, -gt / (w + mu), 0.0)
        return coeff

    def norm_sq(mu):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            terms = (gt / (w + mu)) ** 2
        # 0/0 components (zero load on a singular direction) contribute nothing
        return float(np.nansum(terms))

    mu_lo = max(0.0, -q1)
    sing = np.abs(w + mu_lo) <= 1e-12 * scale  # components singular at mu_lo
    reg = ~sing
    with np.errstate(divide="ignore"):
        phi_reg = float(np.sum((gt[reg] / (w[reg] + mu_lo)) ** 2))
    g_sing = float(np.sqrt(np.sum(gt[sing] ** 2)))

    if q1 > 1e-12 * scale and norm_sq(0.0) <= 1.0:
        # convex objective with interior unconstrained minimum
        mu = 0.0
        coeff = y_of(0.0)
    elif g_sing <= 1e-10 * scale and phi_reg <= 1.0:
        # hard case: multiplier pinned at mu_lo, pad with a minimum
        # eigenvector component to reach the boundary (only when mu_lo > 0)
        mu = mu_lo
        coeff = np.where(reg, y_of(mu_lo), 0.0)
        if mu > 0.0:
            tau = np.sqrt(max(0.0, 1.0 - phi_reg))
            idx = int(np.argmax(sing))
            coeff[idx] += tau
    else:
        # easy case: unique root of ||y(mu)|| = 1 in (mu_lo, mu_hi]
        def psi(mu):
            s = norm_sq(mu)
            if not np.isfinite(s):
                return -1.0
            return 1.0 / np.sqrt(s) - 1.0

        a = mu_lo + 1e-300
        b = mu_lo + float(np.linalg.norm(gt)) + 1.0
        if psi(a) >= 0.0:
            # root collapses onto mu_lo within machine precision
            mu = mu_lo
        else:
            try:
                mu = brentq(psi, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=500)
            except ValueError as exc:  # pragma: no cover - defensive
                raise ConvergenceFailure(f"secular bracket collapse: {exc}") from exc
        coeff = y_of(mu)

    y = U @ coeff
    value = float(y @ Q_dense @ y + 2.0 * g @ y)
    cert = KktCertificate(
        y=y,
        mu=float(mu),
        stationarity=float(np.linalg.norm(Q_dense @ y + mu * y + g)),
        complementarity=float(abs(mu * (1.0 - np.linalg.norm(y)))),
        dual_margin=float(q1 + mu),
    )
    return y, value, cert


@dataclass
class GridResult:
    value: float
    argmin: np.ndarray
    accuracy: float  # O(resolution * Lipschitz bound) on the reported value


def _feasible_mask(inst, pts):
    mask = np.einsum("ij,ij->i", pts, pts) <= 1.0 + 1e-12
    if inst.constraints is not None:
        blk = inst.constraints
        mask &= np.all(pts @ blk.A.T >= blk.b - 1e-12, axis=1)
    if inst.hollow.variant == HOLLOW_NORM_LB:
        mask &= np.einsum("ij,ij->i", pts, pts) >= inst.hollow.norm_lb**2 - 1e-12
    elif inst.hollow.variant == HOLLOW_ELLIPSOIDS:
        for e in inst.hollow.ellipsoids:
            vals = np.einsum("ij,jk,ik->i", pts, e.W, pts) + 2.0 * pts @ e.b + e.c
            mask &= vals > 0.0
    return mask


def _eval_h_batch(Q_dense, g, pts):
    return np.einsum("ij,jk,ik->i", pts, Q_dense, pts) + 2.0 * pts @ g


def _axis_grids(center, half_width, resolution, n):
    axes = []
    for k in range(n):
        lo = max(-1.0, center[k] - half_width)
        hi = min(1.0, center[k] + half_width)
        axes.append(np.arange(lo, hi + resolution / 2, resolution))
    return axes


def _grid_scan(inst, Q_dense, axes, chunk=2_000_000):
    """Best feasible grid value over the tensor grid given by `axes`."""
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    best_val = np.inf
    best_pt = None
    for start in range(0, pts.shape[0], chunk):
        block = pts[start : start + chunk]
        mask = _feasible_mask(inst, block)
        if not mask.any():
            continue
        feas = block[mask]
        vals = _eval_h_batch(Q_dense, inst.g, feas)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_pt = feas[i].copy()
    return best_val, best_pt


def grid_minimize(inst, resolution, refine_resolution=None):
    """Exhaustive grid minimization over the feasible set (n <= 3).

    With `refine_resolution`, a second pass rescans boxes around the best
    coarse candidates at the finer step; the reported accuracy uses the
    finest resolution employed.
    """
    n = inst.n
    if n > 3:
        raise ValueError("grid oracle limited to n <= 3")
    Q_dense = inst.Q.to_dense()

    axes = [np.arange(-1.0, 1.0 + resolution / 2, resolution) for _ in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    mask = _feasible_mask(inst, pts)
    if not mask.any():
        raise NoFeasibleGridPoint("no grid point satisfies the constraints")
    feas = pts[mask]
    vals = _eval_h_batch(Q_dense, inst.g, feas)
    order = np.argsort(vals)
    best_val = float(vals[order[0]])
    best_pt = feas[order[0]].copy()

    lipschitz = 2.0 * (float(np.linalg.norm(Q_dense, 2)) + float(np.linalg.norm(inst.g)))
    final_res = resolution

    if refine_resolution is not None and refine_resolution < resolution:
        margin = lipschitz * resolution * np.sqrt(n)
        cand = feas[order[: min(200, order.size)]]
        cand = cand[vals[order[: cand.shape[0]]] <= best_val + margin]
        # spatially dedupe candidates so plateaus refine only once per basin
        reps = []
        for p in cand:
            if all(np.linalg.norm(p - r) > 3.0 * resolution for r in reps):
                reps.append(p)
            if len(reps) >= 10:
                break
        for p in reps:
            axes = _axis_grids(p, 1.5 * resolution, refine_resolution, n)
            val, pt = _grid_scan(inst, Q_dense, axes)
            if pt is not None and val < best_val:
                best_val, best_pt = val, pt
        final_res = refine_resolution

    accuracy = lipschitz * final_res * np.sqrt(n)
    return GridResult(best_val, best_pt, accuracy)
