"""Structural-condition checkers.

Four checks on an instance, all sharing the minimum eigenspace of Q:

  * relaxation      — exists d != 0 with Qd = lambda_Q d, Ad >= 0, g'd <= 0;
                      certifies that the shifted convex relaxation is tight
                      and provides the boundary-push direction.
  * dimensionality  — dim Null(Q - lambda_Q I) >= n - dim Null(A) + 1, a
                      sufficient (strictly weaker to satisfy) criterion that
                      implies the relaxation condition.
  * convexify       — the minimum eigenspace meets Null(A), i.e. exists an
                      eigenvector d with Ad = 0; implies the relaxation
                      condition and makes the epigraph hull description exact.
  * hollow          — every excluded region sits strictly inside the unit
                      ball and inside the linear constraints, so hollows
                      cannot cut off boundary optima.

The relaxation check reduces to LP feasibility in eigenspace coordinates;
with w the coordinates of d in an orthonormal eigenbasis V, the search splits
into the g'd < 0 case (scaled to g'd <= -1) and the g'd = 0 case (some
coordinate pinned to +-1), which together cover every ray of the witness cone
exactly when the cone is the nonnegative orthant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import HOLLOW_ELLIPSOIDS, HOLLOW_NONE, HOLLOW_NORM_LB
from .linalg import cholesky, dense_eig, lp_feasible

SATISFIED = "Satisfied"
VIOLATED = "Violated"
INCONCLUSIVE = "Inconclusive"

#: box bound on eigenbasis coordinates in the witness LPs (scale-invariant
#: search, so any finite bound > 1 works)
LP_BOX = 1e3

#: eigenspace clustering tolerance relative to the spectral scale
EIGENSPACE_TOL = 1e-8

#: singular values of A V below this (times ||A||) count as zero
NULLSPACE_TOL = 1e-9

#: required clearance of the v_i ellipsoid-containment margin
V_MARGIN_TOL = 1e-8


@dataclass
class ConditionReport:
    status: str
    condition_id: str
    witness: np.ndarray | None = None
    reason: str = ""
    tolerances: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def satisfied(self):
        return self.status == SATISFIED


def _min_eigenspace(inst):
    """(lambda_Q, V) with V an orthonormal basis of the minimum eigenspace."""
    eig = dense_eig(inst.Q.to_dense())
    w = eig.eigenvalues
    lam = float(w[0])
    scale = max(1.0, float(np.abs(w).max()))
    mask = w - lam <= EIGENSPACE_TOL * scale
    return lam, eig.eigenvectors[:, mask]


def _sign_fix(d, g):
    return -d if float(g @ d) > 0.0 else d


def check_condition_relaxation(inst):
    """Witness search for the tight-relaxation condition."""
    lam, V = _min_eigenspace(inst)
    if lam >= 0.0:
        return ConditionReport(
            INCONCLUSIVE,
            "relaxation",
            reason="minimum eigenvalue is nonnegative; the nonconvexity "
            "assumption does not hold",
        )
    k = V.shape[1]
    tols = {"eigenspace_tol": EIGENSPACE_TOL, "lp_box": LP_BOX}

    if inst.constraints is None or inst.constraints.m == 0:
        d = _sign_fix(V[:, 0].copy(), inst.g)
        return ConditionReport(SATISFIED, "relaxation", witness=d, tolerances=tols)

    A = inst.constraints.A
    AV = A @ V
    gV = inst.g @ V
    box = (np.full(k, -LP_BOX), np.full(k, LP_BOX))

    # case g'd < 0, scaled to g'd <= -1:  -AV w <= 0 and gV w <= -1
    res = lp_feasible(
        A_ineq=np.vstack([-AV, gV[None, :]]),
        b_ineq=np.concatenate([np.zeros(AV.shape[0]), [-1.0]]),
        box=box,
    )
    if res.feasible:
        d = V @ res.witness
        return ConditionReport(
            SATISFIED, "relaxation", witness=d / np.linalg.norm(d), tolerances=tols
        )

    # case g'd = 0: pin each coordinate to +-1 in turn
    for j in range(k):
        for sign in (1.0, -1.0):
            lo = box[0].copy()
            hi = box[1].copy()
            lo[j] = hi[j] = sign
            res = lp_feasible(
                A_ineq=-AV,
                b_ineq=np.zeros(AV.shape[0]),
                A_eq=gV[None, :],
                b_eq=np.zeros(1),
                box=(lo, hi),
            )
            if res.feasible:
                d = V @ res.witness
                return ConditionReport(
                    SATISFIED,
                    "relaxation",
                    witness=d / np.linalg.norm(d),
                    tolerances=tols,
                )
    return ConditionReport(VIOLATED, "relaxation", tolerances=tols)


def check_condition_dimensionality(inst):
    """dim Null(Q - lambda_Q I) >= n - dim Null(A) + 1."""
    lam, V = _min_eigenspace(inst)
    if lam >= 0.0:
        return ConditionReport(
            INCONCLUSIVE, "dimensionality", reason="minimum eigenvalue is nonnegative"
        )
    n = inst.n
    k = V.shape[1]
    if inst.constraints is None or inst.constraints.m == 0:
        null_a = n
    else:
        A = inst.constraints.A
        sv = np.linalg.svd(A, compute_uv=False)
        scale = float(sv.max(initial=0.0))
        rank = int(np.sum(sv > NULLSPACE_TOL * max(scale, 1.0)))
        null_a = n - rank
    details = {"eigenspace_dim": k, "nullspace_dim_A": null_a, "required": n - null_a + 1}
    if k >= n - null_a + 1:
        # the implied relaxation witness doubles as this report's witness
        rel = check_condition_relaxation(inst)
        if rel.satisfied:
            return ConditionReport(
                SATISFIED, "dimensionality", witness=rel.witness, details=details
            )
        return ConditionReport(
            INCONCLUSIVE,
            "dimensionality",
            reason="dimension count holds but no witness could be extracted",
            details=details,
        )
    return ConditionReport(VIOLATED, "dimensionality", details=details)


def check_condition_convexify(inst):
    """Exists eigenvector d of lambda_Q with Ad = 0 (exact hull condition)."""
    lam, V = _min_eigenspace(inst)
    if lam >= 0.0:
        return ConditionReport(
            INCONCLUSIVE, "convexify", reason="minimum eigenvalue is nonnegative"
        )
    if inst.constraints is None or inst.constraints.m == 0:
        d = _sign_fix(V[:, 0].copy(), inst.g)
        return ConditionReport(SATISFIED, "convexify", witness=d)
    A = inst.constraints.A
    AV = A @ V
    a_scale = max(float(np.linalg.norm(A, 2)), 1.0)
    U_, sv, Wt = np.linalg.svd(AV)
    small = sv <= NULLSPACE_TOL * a_scale
    # pad: AV has at most min(m, k) singular values; extra right-singular
    # directions are exact null directions
    k = V.shape[1]
    null_dirs = [Wt[i] for i in range(len(sv)) if small[i]]
    null_dirs += [Wt[i] for i in range(len(sv), k)]
    if not null_dirs:
        return ConditionReport(
            VIOLATED, "convexify", tolerances={"nullspace_tol": NULLSPACE_TOL}
        )
    d = _sign_fix(V @ null_dirs[0], inst.g)
    return ConditionReport(
        SATISFIED,
        "convexify",
        witness=d / np.linalg.norm(d),
        tolerances={"nullspace_tol": NULLSPACE_TOL},
    )


def _ellipsoid_geometry(e):
    """(center, radius, L) of {y'Wy + 2b'y + c <= 0} as y = center + r L^-T u,
    ||u|| <= 1, with LL' = W.  radius < 0 flags an empty ellipsoid."""
    L = cholesky(e.W)
    # center = -W^{-1} b via the factor
    z = np.linalg.solve(L, -e.b)
    center = np.linalg.solve(L.T, z)
    r_sq = float(z @ z) - e.c
    if r_sq < 0.0:
        return center, -1.0, L
    return center, float(np.sqrt(r_sq)), L


def _max_norm_sq_over_ellipsoid(center, r, L):
    """max ||y||^2 over the ellipsoid, via the exact ball-constrained oracle
    applied to the negated objective in the unit-ball coordinates."""
    from .oracle import secular_solve

    B = r * np.linalg.inv(L).T
    _, value, _ = secular_solve(-(B.T @ B), -(B.T @ center))
    return float(center @ center) - value


def check_hollow_containment(inst):
    """Each excluded region must sit strictly inside the ball and weakly
    inside the linear constraints; then hollows never affect boundary optima."""
    tols = {"v_margin_tol": V_MARGIN_TOL}
    hollow = inst.hollow
    if hollow.variant == HOLLOW_NONE:
        return ConditionReport(
            SATISFIED, "hollow", reason="no hollow present", tolerances=tols
        )

    if hollow.variant == HOLLOW_NORM_LB:
        l = hollow.norm_lb
        if l >= 1.0 - V_MARGIN_TOL:
            return ConditionReport(
                VIOLATED,
                "hollow",
                reason=f"norm lower bound {l} does not leave the boundary clear",
                tolerances=tols,
            )
        if inst.constraints is not None:
            A, b = inst.constraints.A, inst.constraints.b
            for j in range(A.shape[0]):
                if b[j] + l * np.linalg.norm(A[j]) > 1e-9:
                    return ConditionReport(
                        VIOLATED,
                        "hollow",
                        reason=f"excluded ball of radius {l} exits constraint row {j}",
                        tolerances=tols,
                    )
        return ConditionReport(SATISFIED, "hollow", tolerances=tols)

    # union of ellipsoids: v_i = min { 1 - ||y||^2 : y in E_i } must be > 0
    margins = []
    for idx, e in enumerate(hollow.ellipsoids):
        center, r, L = _ellipsoid_geometry(e)
        if r < 0.0:
            margins.append(float("inf"))  # empty region is vacuously contained
            continue
        v = 1.0 - _max_norm_sq_over_ellipsoid(center, r, L)
        margins.append(v)
        if v <= V_MARGIN_TOL:
            return ConditionReport(
                VIOLATED,
                "hollow",
                reason=f"ellipsoid {idx} reaches the unit sphere (margin {v:.3e})",
                tolerances=tols,
                details={"margins": margins},
            )
        if inst.constraints is not None:
            A, b = inst.constraints.A, inst.constraints.b
            Linv_at = np.linalg.solve(L, A.T)  # columns L^{-1} a_j
            for j in range(A.shape[0]):
                low = float(A[j] @ center) - r * float(np.linalg.norm(Linv_at[:, j]))
                if low < b[j] - 1e-9:
                    return ConditionReport(
                        VIOLATED,
                        "hollow",
                        reason=f"ellipsoid {idx} exits constraint row {j}",
                        tolerances=tols,
                        details={"margins": margins},
                    )
    return ConditionReport(
        SATISFIED, "hollow", tolerances=tols, details={"margins": margins}
    )


def verify_witness(inst, d, condition_id):
    """Independent recheck of a reported witness at fixed tolerances."""
    if condition_id == "hollow":
        return check_hollow_containment(inst).satisfied
    if d is None:
        return False
    d = np.asarray(d, dtype=np.float64).ravel()
    nd = float(np.linalg.norm(d))
    if nd == 0.0 or d.shape[0] != inst.n:
        return False
    Qd = inst.Q.to_dense() @ d
    lam, _ = _min_eigenspace(inst)
    scale = max(1.0, abs(lam))
    if np.linalg.norm(Qd - lam * d) > 1e-6 * nd * scale:
        return False
    if condition_id in ("relaxation", "dimensionality"):
        if float(inst.g @ d) > 1e-9 * max(1.0, float(np.linalg.norm(inst.g))) * nd:
            return False
        if inst.constraints is not None and inst.constraints.m > 0:
            if np.min(inst.constraints.A @ d) < -1e-9 * nd:
                return False
        return True
    if condition_id == "convexify":
        if inst.constraints is not None and inst.constraints.m > 0:
            a_scale = max(float(np.linalg.norm(inst.constraints.A, 2)), 1.0)
            if np.max(np.abs(inst.constraints.A @ d)) > 1e-8 * a_scale * nd:
                return False
        return True
    raise ValueError(f"unknown condition id {condition_id!r}")
