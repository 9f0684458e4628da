"""First-order solve pipeline.

Accelerated projected gradient on the shifted convex surrogate, projection
oracles for the ball alone and for the ball intersected with halfspaces
(Dykstra), boundary-push recovery of a norm-one optimum, and the end-to-end
`solve` entry point covering the classical, linearly constrained, and hollow
variants.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import reformulate
from .conditions import check_condition_relaxation, check_hollow_containment
from .core import HOLLOW_ELLIPSOIDS, HOLLOW_NORM_LB, TrsSolution
from .eigen import min_eigenvalue, spectral_norm_estimate
from .errors import (
    BadDirection,
    HollowConditionViolated,
    InfeasibleRegion,
    MaxItersExceeded,
    ProjectionNotConverged,
    TightnessNotCertified,
)
from .linalg import lp_feasible


@dataclass
class SolveSettings:
    """Tolerance and budget knobs for one solve call."""

    eigen_epsilon: float = 1e-8
    eigen_delta: float = 1e-2
    apg_gap: float = 1e-8
    certify_tol: float = 1e-6
    max_apg_iters: int | None = None  # default 10 * ceil(sqrt(L / apg_gap))
    dykstra_iters: int = 500
    seed: int = 0


@dataclass
class ProjectionOracle:
    """Euclidean projection onto the feasible convex set plus a feasibility
    violation measure used for diagnostics."""

    project: object  # vector -> vector
    violation: object  # vector -> float


def project_ball(y):
    """Projection onto the unit ball; O(n)."""
    y = np.asarray(y, dtype=np.float64)
    nrm = float(np.linalg.norm(y))
    if nrm <= 1.0:
        return y.copy()
    return y / nrm


def project_ball_and_halfspaces(y, A, b, iters):
    """Dykstra's alternating projection onto the ball intersected with the
    halfspaces {a_i'y >= b_i}.

    Raises ProjectionNotConverged when the feasibility violation of the
    returned point exceeds 1e-8 after `iters` sweeps.
    """
    y = np.asarray(y, dtype=np.float64).copy()
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).ravel()
    m = A.shape[0]
    row_sq = np.einsum("ij,ij->i", A, A)
    for j in range(m):
        if row_sq[j] == 0.0 and b[j] > 1e-12:
            raise InfeasibleRegion(f"constraint row {j} is 0'y >= {b[j]}")

    # one correction vector per set (ball first, then each halfspace)
    p = np.zeros((m + 1, y.shape[0]))
    x = y
    for _ in range(iters):
        x_prev = x
        z = x + p[0]
        x = project_ball(z)
        p[0] = z - x
        for j in range(m):
            if row_sq[j] == 0.0:
                continue
            z = x + p[j + 1]
            gap = b[j] - float(A[j] @ z)
            if gap > 0.0:
                xj = z + (gap / row_sq[j]) * A[j]
            else:
                xj = z
            p[j + 1] = z - xj
            x = xj
        if np.linalg.norm(x - x_prev) <= 1e-14 and _hs_violation(x, A, b) <= 1e-10:
            break
    viol = _hs_violation(x, A, b)
    if viol > 1e-8:
        raise ProjectionNotConverged(viol)
    return x


def _hs_violation(y, A, b):
    v = max(0.0, float(np.linalg.norm(y)) - 1.0)
    if A.shape[0]:
        v = max(v, float(np.max(b - A @ y, initial=0.0)))
    return v


def make_projection_oracle(inst, settings):
    """Build the projection oracle for the instance's convex feasible hull
    {||y|| <= 1, Ay >= b} (hollows are excluded regions and do not enter the
    convex relaxation).  Verifies nonemptiness once."""
    if inst.constraints is None or inst.constraints.m == 0:
        return ProjectionOracle(
            project=project_ball,
            violation=lambda y: max(0.0, float(np.linalg.norm(y)) - 1.0),
        )
    A, b = inst.constraints.A, inst.constraints.b
    n = inst.n

    # circumscribed box [-1,1]^n: infeasible there means truly infeasible
    outer = lp_feasible(A_ineq=-A, b_ineq=-b, box=(-np.ones(n), np.ones(n)))
    if not outer.feasible:
        raise InfeasibleRegion("no point of [-1,1]^n satisfies the constraints")
    # inscribed box [-1/sqrt(n), 1/sqrt(n)]^n: feasible there proves the ball
    # intersection nonempty; otherwise fall back to a Dykstra probe
    s = 1.0 / math.sqrt(n)
    inner = lp_feasible(A_ineq=-A, b_ineq=-b, box=(-s * np.ones(n), s * np.ones(n)))
    if not inner.feasible:
        try:
            project_ball_and_halfspaces(np.zeros(n), A, b, settings.dykstra_iters)
        except ProjectionNotConverged as exc:
            raise InfeasibleRegion(
                f"could not locate a feasible point (violation {exc.violation:.3e})"
            ) from exc

    def project(y):
        return project_ball_and_halfspaces(y, A, b, settings.dykstra_iters)

    return ProjectionOracle(project=project, violation=lambda y: _hs_violation(y, A, b))


def dual_gap_bound(obj, y, grad=None):
    """Computable upper bound on f(y) - min f over any feasible subset of the
    unit ball: by convexity f* >= f(y) + min_{||u||<=1} grad'(u - y), so
    f(y) - f* <= grad'y + ||grad||."""
    if grad is None:
        _, grad = reformulate.eval_and_grad_f(obj, y)
    return max(0.0, float(grad @ y) + float(np.linalg.norm(grad)))


def apg_minimize(obj, proj, settings):
    """Accelerated projected gradient with adaptive restart.

    Stops on whichever fires first: the dual gap bound <= apg_gap, the
    gradient-mapping surrogate L * ||y_{k+1} - z_k|| * diameter <= apg_gap,
    or best-objective stagnation below 1e-3 * apg_gap over 50 iterations
    (covers constrained optima where the ball-based gap bound cannot close).
    Returns (y, gap_certificate, iterations, diagnostics).
    """
    L = obj.smoothness_L
    max_iters = settings.max_apg_iters
    if max_iters is None:
        max_iters = 10 * math.ceil(math.sqrt(L / settings.apg_gap))

    y = proj.project(np.zeros(obj.Q.n))
    z = y.copy()
    t = 1.0
    f_y, grad_y = reformulate.eval_and_grad_f(obj, y)
    best_y, best_f = y.copy(), f_y
    best_gap = dual_gap_bound(obj, y, grad_y)
    stall_anchor = best_f
    stall_count = 0
    restarts = 0
    reason = None

    for k in range(1, max_iters + 1):
        _, grad_z = reformulate.eval_and_grad_f(obj, z)
        y_new = proj.project(z - grad_z / L)
        f_new, grad_new = reformulate.eval_and_grad_f(obj, y_new)

        restarted = f_new > f_y
        if restarted:  # adaptive restart on objective increase
            t = 1.0
            z = y.copy()
            restarts += 1
        else:
            mapping = L * float(np.linalg.norm(y_new - z)) * 2.0
            t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
            z = y_new + ((t - 1.0) / t_new) * (y_new - y)
            y, f_y, t = y_new, f_new, t_new

            if f_y < best_f:
                best_y, best_f = y.copy(), f_y
            gap = dual_gap_bound(obj, y, grad_new)
            # the running-minimum gap certifies the best iterate too: its f
            # value is lowest, so f(best) - f* <= f(y_gap) - f* <= gap(y_gap)
            best_gap = min(best_gap, gap)

            if gap <= settings.apg_gap:
                reason = "dual_gap"
                break
            if mapping <= settings.apg_gap:
                reason = "gradient_mapping"
                break
        # stagnation accounting covers restart iterations too, so repeated
        # no-progress restarts cannot spin until the iteration cap
        if stall_anchor - best_f < 1e-3 * settings.apg_gap:
            stall_count += 1
            if stall_count >= 50:
                reason = "stagnation"
                break
        else:
            stall_anchor = best_f
            stall_count = 0
    else:
        raise MaxItersExceeded(best_y, best_gap)

    diagnostics = {
        "stop_reason": reason,
        "restarts": restarts,
        "smoothness_L": L,
        "final_violation": float(proj.violation(best_y)),
    }
    return best_y, best_gap, k, diagnostics


def boundary_push(y, d):
    """Positive step eps with ||y + eps d|| = 1 (requires ||y|| <= 1, d != 0).

    Returns (y_pushed, eps).  Along a minimum eigenvector with g'd <= 0 this
    never increases the surrogate value, so it recovers a norm-one optimum.
    """
    y = np.asarray(y, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    a = float(d @ d)
    if a <= 0.0 or not np.isfinite(a):
        raise BadDirection("push direction is zero or non-finite")
    bq = float(y @ d)
    c = float(y @ y) - 1.0
    if c > 1e-12:
        raise BadDirection("starting point lies outside the unit ball")
    disc = bq * bq - a * min(c, 0.0)
    root = math.sqrt(disc)
    if bq <= 0.0:
        eps = (-bq + root) / a
    else:  # numerically stable branch when bq > 0
        eps = -min(c, 0.0) / (bq + root)
    return y + eps * d, eps


def _sign_fix(d, g):
    return -d if float(g @ d) > 0.0 else d


def solve(inst, settings=None):
    """End-to-end solve of the instance.

    Pipeline: estimate the minimum eigenvalue, build the shifted convex
    surrogate, minimize it with APG over the convex feasible hull, then
    certify/recover tightness: boundary-push along a minimum eigenvector
    (classical and annulus cases) or along a verified condition witness
    (linear constraints); ellipsoid hollows must pass the containment check.
    """
    if settings is None:
        settings = SolveSettings()
    diagnostics = {"timings": {}}

    t0 = time.perf_counter()
    est = min_eigenvalue(inst.Q, settings.eigen_epsilon, settings.eigen_delta, settings.seed)
    diagnostics["timings"]["eigen"] = time.perf_counter() - t0
    diagnostics["lambda_hat"] = est.lambda_hat
    proj = make_projection_oracle(inst, settings)

    if est.lambda_hat >= 0.0:
        # objective already convex: minimize h directly (gamma only corrects
        # for estimation slack when lambda_hat sits inside [0, epsilon))
        gamma = min(0.0, est.lambda_hat - settings.eigen_epsilon)
        norm_est = spectral_norm_estimate(inst.Q, settings.seed)
        obj = reformulate.ReformulatedObjective(
            inst.Q, inst.g, gamma, settings.eigen_epsilon, 2.0 * (norm_est - gamma)
        )
        y, gap, iters, apg_diag = apg_minimize(obj, proj, settings)
        diagnostics.update(apg_diag)
        diagnostics["convex_path"] = True
        h_val = reformulate.eval_h(inst.Q, inst.g, y)
        f_val = reformulate.eval_f(obj, y)
        scale = max(1.0, abs(h_val))
        return TrsSolution(
            y=y,
            h_value=h_val,
            f_value=f_val,
            norm_y=float(np.linalg.norm(y)),
            tight=abs(h_val - f_val) <= settings.certify_tol * scale,
            iterations=iters,
            eigen_estimate=est,
            gap_certificate=gap,
            diagnostics=diagnostics,
        )

    t0 = time.perf_counter()
    obj = reformulate.build(inst.Q, inst.g, est)
    diagnostics["timings"]["reformulate"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    y, gap, iters, apg_diag = apg_minimize(obj, proj, settings)
    diagnostics["timings"]["apg"] = time.perf_counter() - t0
    diagnostics.update(apg_diag)

    hollow = inst.hollow
    if hollow.variant == HOLLOW_ELLIPSOIDS:
        report = check_hollow_containment(inst)
        diagnostics["hollow_check"] = report.status
        if not report.satisfied:
            raise HollowConditionViolated(
                f"hollow containment not certified: {report.reason}"
            )

    has_constraints = inst.constraints is not None and inst.constraints.m > 0
    norm_y = float(np.linalg.norm(y))
    pushed = False
    if norm_y < 1.0 - settings.certify_tol:
        if not has_constraints:
            d = _sign_fix(est.vector_hat, inst.g)
            y, eps = boundary_push(y, d)
            pushed = True
            diagnostics["push_eps"] = eps
        else:
            report = check_condition_relaxation(inst)
            diagnostics["relaxation_check"] = report.status
            if report.satisfied:
                # witness keeps Ay >= b since A d >= 0 componentwise
                y, eps = boundary_push(y, report.witness)
                pushed = True
                diagnostics["push_eps"] = eps
            else:
                h_val = reformulate.eval_h(inst.Q, inst.g, y)
                f_val = reformulate.eval_f(obj, y)
                sol = TrsSolution(
                    y=y,
                    h_value=h_val,
                    f_value=f_val,
                    norm_y=norm_y,
                    tight=False,
                    iterations=iters,
                    eigen_estimate=est,
                    gap_certificate=gap,
                    diagnostics=diagnostics,
                )
                raise TightnessNotCertified(sol, diagnostics)
    diagnostics["pushed"] = pushed

    norm_y = float(np.linalg.norm(y))
    if hollow.variant == HOLLOW_NORM_LB and norm_y < hollow.norm_lb - settings.certify_tol:
        raise HollowConditionViolated(
            f"solution norm {norm_y:.6g} below the required lower bound "
            f"{hollow.norm_lb:.6g}"
        )
    if hollow.variant == HOLLOW_ELLIPSOIDS and hollow.excludes(y, tol=1e-10):
        raise HollowConditionViolated(
            "solution landed inside an excluded ellipsoid despite certified "
            "containment"
        )

    h_val = reformulate.eval_h(inst.Q, inst.g, y)
    f_val = reformulate.eval_f(obj, y)
    scale = max(1.0, abs(h_val))
    tight = (
        abs(h_val - f_val) <= settings.certify_tol * scale
        and abs(norm_y - 1.0) <= settings.certify_tol
    )
    return TrsSolution(
        y=y,
        h_value=h_val,
        f_value=f_val,
        norm_y=norm_y,
        tight=tight,
        iterations=iters,
        eigen_estimate=est,
        gap_certificate=gap,
        diagnostics=diagnostics,
    )
