"""Command-line client.

Thin wrapper over the service handlers: by default each verb runs in-process;
with --url the same request is POSTed to a running server and the returned
report is rendered identically.  `trskit serve` starts the HTTP server.

Exit codes: 0 success, 2 parse error, 3 infeasible region, 4 relaxation not
certified tight (the bound is still printed), 1 other errors.

Structured output (--format json) is deterministic for a fixed seed; stage
timings are excluded unless --timings is passed, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .service.handlers import HANDLERS
from .service.schemas import RunOptions, RunReport


def _default_seed():
    env = os.environ.get("TRSKIT_SEED")
    return int(env) if env else 0


def _add_common(p):
    p.add_argument("path", help="instance file")
    p.add_argument("--eps", type=float, default=1e-8, help="eigenvalue accuracy")
    p.add_argument("--delta", type=float, default=1e-2, help="failure probability")
    p.add_argument("--gap", type=float, default=1e-8, help="target optimality gap")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (env TRSKIT_SEED)")
    p.add_argument("--dense-cap", type=int, default=500, help="dense cross-check cap")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true", help="include stage timings")
    p.add_argument("--url", default=None, help="send to a running server instead")


def build_parser():
    parser = argparse.ArgumentParser(prog="trskit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for verb, doc in (
        ("solve", "solve an instance end to end"),
        ("check", "run all structural-condition checkers"),
        ("certify", "solve and cross-check against the exact oracle and hull"),
        ("eig", "standalone minimum-eigenvalue estimation"),
    ):
        _add_common(sub.add_parser(verb, help=doc))
    serve = sub.add_parser("serve", help="start the HTTP server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _render_text(report: RunReport, show_timings):
    lines = [f"command: {report.command}", f"digest: {report.digest}"]
    if report.error:
        lines.append(f"error: {report.error}")
    sol = report.solution
    if sol is not None:
        label = "value" if sol.tight else "lower bound (not certified tight)"
        lines.append(f"{label}: {sol.f_value:.12g}")
        lines.append(f"h(y): {sol.h_value:.12g}  ||y||: {sol.norm_y:.9f}")
        lines.append(f"tight: {sol.tight}  iterations: {sol.iterations}")
        lines.append(f"gap certificate: {sol.gap_certificate:.3e}")
        if sol.lambda_hat is not None:
            lines.append(f"lambda_hat: {sol.lambda_hat:.12g}")
    if report.conditions is not None:
        for c in report.conditions:
            extra = f"  ({c.reason})" if c.reason else ""
            lines.append(f"condition {c.condition_id}: {c.status}{extra}")
    if report.certify is not None:
        c = report.certify
        if c.oracle_kind:
            lines.append(
                f"oracle ({c.oracle_kind}): {c.oracle_value:.12g}  "
                f"gap {c.oracle_abs_gap:.3e}"
            )
        if c.spectrum_path_ok is not None:
            lines.append(f"spectrum path: ok (s = {c.spectrum_s:.9f})")
        if c.hull_member is not None:
            lines.append(f"hull membership: {c.hull_member}")
        lines.append(f"certify passed: {c.passed}")
        for note in c.notes:
            lines.append(f"note: {note}")
    if report.eigen is not None:
        e = report.eigen
        lines.append(
            f"lambda_hat: {e.lambda_hat:.12g}  iterations: {e.iterations}  "
            f"residual: {e.residual:.3e}"
        )
        if e.dense_lambda_min is not None:
            lines.append(
                f"dense lambda_min: {e.dense_lambda_min:.12g}  "
                f"abs error: {e.dense_abs_error:.3e}"
            )
    if show_timings and report.timings:
        for stage, sec in report.timings.items():
            lines.append(f"time {stage}: {sec:.4f}s")
    lines.append(f"exit: {report.exit_code}")
    return "\n".join(lines)


def _render(report: RunReport, fmt, show_timings):
    if fmt == "json":
        data = report.model_dump(by_alias=True)
        if not show_timings:
            data.pop("timings", None)
        return json.dumps(data, indent=2, sort_keys=True)
    return _render_text(report, show_timings)


def _run_remote(url, verb, instance_text, options: RunOptions) -> RunReport:
    import httpx

    resp = httpx.post(
        f"{url.rstrip('/')}/v1/{verb}",
        json={"instance_text": instance_text, "options": options.model_dump()},
        timeout=300.0,
    )
    resp.raise_for_status()
    return RunReport.model_validate(resp.json())


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    try:
        with open(args.path, encoding="utf-8") as fh:
            instance_text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return 2

    seed = args.seed if args.seed is not None else _default_seed()
    options = RunOptions(
        eps=args.eps,
        delta=args.delta,
        gap=args.gap,
        seed=seed,
        dense_cap=args.dense_cap,
    )
    if args.url:
        report = _run_remote(args.url, args.command, instance_text, options)
    else:
        report = HANDLERS[args.command](instance_text, options)
    print(_render(report, args.format, args.timings))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
