"""Request/response models for the solve service.

RunReport is the single versioned report envelope shared by every verb and
by the CLI's structured output; field names are a stable contract
(schema: 1).
"""

from __future__ import annotations

from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


class RunOptions(BaseModel):
    """Tolerances and reproducibility knobs, mirroring SolveSettings."""

    eps: float = Field(default=1e-8, gt=0, description="eigenvalue accuracy")
    delta: float = Field(default=1e-2, gt=0, lt=1, description="failure probability")
    gap: float = Field(default=1e-8, gt=0, description="target optimality gap")
    seed: int = 0
    dense_cap: int = Field(default=500, gt=0)


class RunRequest(BaseModel):
    instance_text: str
    options: RunOptions = Field(default_factory=RunOptions)


class EigenReport(BaseModel):
    lambda_hat: float
    iterations: int
    restarts: int
    residual: float
    dense_lambda_min: float | None = None
    dense_abs_error: float | None = None


class SolutionReport(BaseModel):
    y: list[float]
    h_value: float
    f_value: float
    norm_y: float
    tight: bool
    iterations: int
    gap_certificate: float
    lambda_hat: float | None = None
    stop_reason: str | None = None


class ConditionResult(BaseModel):
    condition_id: str
    status: str
    witness: list[float] | None = None
    reason: str = ""


class CertifyReport(BaseModel):
    oracle_kind: str | None = None  # "secular" | "grid" | None (skipped)
    oracle_value: float | None = None
    oracle_abs_gap: float | None = None
    spectrum_path_ok: bool | None = None
    spectrum_s: float | None = None
    hull_member: bool | None = None
    passed: bool = False
    notes: list[str] = Field(default_factory=list)


class RunReport(BaseModel):
    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    command: str
    digest: str = ""
    exit_code: int = 0
    error: str | None = None
    solution: SolutionReport | None = None
    conditions: list[ConditionResult] | None = None
    certify: CertifyReport | None = None
    eigen: EigenReport | None = None
    timings: dict[str, float] = Field(default_factory=dict)

    model_config = {"populate_by_name": True}
