from typing import Any, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    command: str
    params: dict[str, Any] = Field(default_factory=dict)
    timestamp: str
    input_digest: Optional[str] = None
    versions: dict[str, str] = Field(default_factory=dict)


class BenchRow(BaseModel):
    dataset: str
    algo: str
    k: int
    seed: int
    time_ms: float
    cost: float


class BenchSummary(BaseModel):
    algo: str
    k: int
    runs: int
    mean_time_ms: float
    median_time_ms: float
    mean_cost: float


class ScalingReport(BaseModel):
    eps_hat: float
    r2_beta: float
    ci95_beta: tuple[float, float]
    eta_slope: float
    r2_eta: float
    ci95_eta: tuple[float, float]
    d_eps: float
    aggregate: str
    points: list[dict[str, Any]]


class IdEntry(BaseModel):
    k_nn: int
    estimates: list[float]
    mean: float


class IdReport(BaseModel):
    per_k: list[IdEntry]
    grand_mean: float
    subsample: Optional[int] = None
    repeats: int


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: dict[str, Any] = Field(default_factory=dict)


class ValidationReport(BaseModel):
    passed: bool
    checks: list[CheckResult]

    @property
    def failed(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]
