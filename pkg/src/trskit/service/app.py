"""FastAPI application exposing the solver verbs.

POST /v1/{solve,check,certify,eig} take a RunRequest and return a RunReport;
expected failures are reported inside the envelope (exit_code/error), not as
HTTP errors, so clients see one shape everywhere.
"""

from __future__ import annotations

from fastapi import FastAPI

from .handlers import handle_certify, handle_check, handle_eig, handle_solve
from .schemas import RunReport, RunRequest


def create_app() -> FastAPI:
    app = FastAPI(title="trskit", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/solve", response_model=RunReport, response_model_by_alias=True)
    def solve(req: RunRequest):
        return handle_solve(req.instance_text, req.options)

    @app.post("/v1/check", response_model=RunReport, response_model_by_alias=True)
    def check(req: RunRequest):
        return handle_check(req.instance_text, req.options)

    @app.post("/v1/certify", response_model=RunReport, response_model_by_alias=True)
    def certify(req: RunRequest):
        return handle_certify(req.instance_text, req.options)

    @app.post("/v1/eig", response_model=RunReport, response_model_by_alias=True)
    def eig(req: RunRequest):
        return handle_eig(req.instance_text, req.options)

    return app
