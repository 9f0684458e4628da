"""Verb handlers shared by the HTTP service and the in-process CLI path.

Every handler maps instance text plus options to a RunReport and never
raises for expected failure modes; those become exit codes instead:

    0  success
    1  unexpected library error
    2  instance parse/validation error
    3  infeasible region
    4  relaxation value is a lower bound only (tightness not certified)
"""

from __future__ import annotations

import hashlib
import time

import numpy as np

from .. import hull
from ..conditions import (
    check_condition_convexify,
    check_condition_dimensionality,
    check_condition_relaxation,
    check_hollow_containment,
)
from ..core import parse_instance
from ..eigen import min_eigenvalue
from ..errors import (
    InfeasibleRegion,
    ParseError,
    TightnessNotCertified,
    TrskitError,
)
from ..linalg import dense_eig
from ..oracle import grid_minimize, secular_solve
from ..solver import SolveSettings, solve
from .schemas import (
    CertifyReport,
    ConditionResult,
    EigenReport,
    RunOptions,
    RunReport,
    SolutionReport,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_TIGHT = 4


def _digest(text):
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _settings(options: RunOptions) -> SolveSettings:
    return SolveSettings(
        eigen_epsilon=options.eps,
        eigen_delta=options.delta,
        apg_gap=options.gap,
        seed=options.seed,
    )


def _solution_report(sol) -> SolutionReport:
    est = sol.eigen_estimate
    return SolutionReport(
        y=[float(v) for v in sol.y],
        h_value=sol.h_value,
        f_value=sol.f_value,
        norm_y=sol.norm_y,
        tight=sol.tight,
        iterations=sol.iterations,
        gap_certificate=sol.gap_certificate,
        lambda_hat=None if est is None else est.lambda_hat,
        stop_reason=sol.diagnostics.get("stop_reason"),
    )


def _parse(instance_text, report):
    try:
        return parse_instance(instance_text)
    except TrskitError as exc:
        report.exit_code = EXIT_PARSE
        report.error = str(exc)
        return None


def handle_solve(instance_text, options: RunOptions) -> RunReport:
    report = RunReport(command="solve", digest=_digest(instance_text))
    t0 = time.perf_counter()
    inst = _parse(instance_text, report)
    report.timings["parse"] = time.perf_counter() - t0
    if inst is None:
        return report
    try:
        t0 = time.perf_counter()
        sol = solve(inst, _settings(options))
        report.timings["solve"] = time.perf_counter() - t0
        report.timings.update(sol.diagnostics.get("timings", {}))
        report.solution = _solution_report(sol)
    except TightnessNotCertified as exc:
        report.exit_code = EXIT_NOT_TIGHT
        report.error = str(exc)
        report.solution = _solution_report(exc.solution)
    except InfeasibleRegion as exc:
        report.exit_code = EXIT_INFEASIBLE
        report.error = str(exc)
    except TrskitError as exc:
        report.exit_code = EXIT_ERROR
        report.error = str(exc)
    return report


def handle_check(instance_text, options: RunOptions) -> RunReport:
    report = RunReport(command="check", digest=_digest(instance_text))
    inst = _parse(instance_text, report)
    if inst is None:
        return report
    results = []
    try:
        t0 = time.perf_counter()
        for checker in (
            check_condition_relaxation,
            check_condition_dimensionality,
            check_condition_convexify,
            check_hollow_containment,
        ):
            r = checker(inst)
            results.append(
                ConditionResult(
                    condition_id=r.condition_id,
                    status=r.status,
                    witness=None if r.witness is None else [float(v) for v in r.witness],
                    reason=r.reason,
                )
            )
        report.timings["check"] = time.perf_counter() - t0
    except TrskitError as exc:
        report.exit_code = EXIT_ERROR
        report.error = str(exc)
        return report
    report.conditions = results
    if not all(r.status == "Satisfied" for r in results):
        report.exit_code = EXIT_ERROR
    return report


def handle_certify(instance_text, options: RunOptions) -> RunReport:
    report = RunReport(command="certify", digest=_digest(instance_text))
    inst = _parse(instance_text, report)
    if inst is None:
        return report
    cert = CertifyReport()
    try:
        t0 = time.perf_counter()
        try:
            sol = solve(inst, _settings(options))
        except TightnessNotCertified as exc:
            sol = exc.solution
            report.exit_code = EXIT_NOT_TIGHT
            report.error = str(exc)
            cert.notes.append("relaxation value is a lower bound only")
        report.solution = _solution_report(sol)

        checks_ok = True
        classical = (
            (inst.constraints is None or inst.constraints.m == 0)
            and inst.hollow.variant == "none"
        )
        if classical and inst.n <= options.dense_cap:
            _, value, _ = secular_solve(inst.Q.to_dense(), inst.g)
            cert.oracle_kind = "secular"
            cert.oracle_value = float(value)
        elif inst.n <= 3:
            res = grid_minimize(inst, 1e-3 if inst.n <= 2 else 2e-2,
                                refine_resolution=None if inst.n <= 2 else 5e-4)
            cert.oracle_kind = "grid"
            cert.oracle_value = float(res.value)
        if cert.oracle_value is not None:
            cert.oracle_abs_gap = abs(sol.h_value - cert.oracle_value)
            scale = max(1.0, abs(cert.oracle_value))
            tol = 1e-5 * scale if cert.oracle_kind == "secular" else 2e-3 * scale
            if report.exit_code != EXIT_NOT_TIGHT and cert.oracle_abs_gap > tol:
                checks_ok = False
                cert.notes.append("solution value disagrees with the oracle")

        lam = float(dense_eig(inst.Q.to_dense()).eigenvalues[0])
        if lam < 0.0 and inst.n <= options.dense_cap:
            path = hull.verify_spectrum_path(inst)
            cert.spectrum_path_ok = True
            cert.spectrum_s = path.s
            p = hull.EpigraphPoint(np.asarray(sol.y), sol.h_value)
            cert.hull_member = hull.in_conv_X(inst, p)
            if not cert.hull_member:
                checks_ok = False
                cert.notes.append("solution epigraph point outside the hull description")
        cert.passed = checks_ok and report.exit_code == EXIT_OK
        report.timings["certify"] = time.perf_counter() - t0
        if not checks_ok and report.exit_code == EXIT_OK:
            report.exit_code = EXIT_ERROR
    except InfeasibleRegion as exc:
        report.exit_code = EXIT_INFEASIBLE
        report.error = str(exc)
    except TrskitError as exc:
        report.exit_code = EXIT_ERROR
        report.error = str(exc)
    report.certify = cert
    return report


def handle_eig(instance_text, options: RunOptions) -> RunReport:
    report = RunReport(command="eig", digest=_digest(instance_text))
    inst = _parse(instance_text, report)
    if inst is None:
        return report
    try:
        t0 = time.perf_counter()
        est = min_eigenvalue(inst.Q, options.eps, options.delta, options.seed)
        report.timings["eigen"] = time.perf_counter() - t0
        eig = EigenReport(
            lambda_hat=est.lambda_hat,
            iterations=est.iterations,
            restarts=est.restarts,
            residual=est.residual,
        )
        if inst.n <= options.dense_cap:
            dense = float(dense_eig(inst.Q.to_dense()).eigenvalues[0])
            eig.dense_lambda_min = dense
            eig.dense_abs_error = abs(est.lambda_hat - dense)
        report.eigen = eig
    except TrskitError as exc:
        report.exit_code = EXIT_ERROR
        report.error = str(exc)
    return report


HANDLERS = {
    "solve": handle_solve,
    "check": handle_check,
    "certify": handle_certify,
    "eig": handle_eig,
}
