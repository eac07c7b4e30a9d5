from typing import Optional

from pydantic import BaseModel, Field, model_validator


class PowerLawFit(BaseModel):
    slope: float
    intercept: float
    r_squared: float = Field(..., ge=0.0, le=1.0)
    ci95_slope: tuple[float, float]
    points_used: int

    @model_validator(mode="after")
    def check_interval(self):
        lo, hi = self.ci95_slope
        if not lo <= self.slope <= hi:
            raise ValueError("ci95_slope 가 slope 를 포함하지 않습니다")
        return self


class GeomParams(BaseModel):
    beta: float
    eta_centers: float
    eta_data: Optional[float] = None
    eta_data_subsampled: bool = False


class BetaCurvePoint(BaseModel):
    k: int
    beta: float
    eta_centers: float
    eta_centers_pre_lloyd: float
    cost: float
    runs: int


class NoiseLevelPoint(BaseModel):
    nsr: float
    eps_hat: float
    r_squared: float
    curve: list[BetaCurvePoint]


class RejectionCell(BaseModel):
    m: int
    k: int
    runs: int
    fallback_fraction: float
    mean_proposals: float
    failure_bound_mean: float


class GeomRequest(BaseModel):
    points: list[list[float]]
    centers: list[list[float]]
    include_data: bool = False


class PowerLawRequest(BaseModel):
    ks: list[float]
    values: list[float]


class IntrinsicDimRequest(BaseModel):
    points: list[list[float]]
    k_nn: int = 20
    subsample: Optional[int] = None
    seed: int = 0


class IntrinsicDimResponse(BaseModel):
    estimate: float
    k_nn: int
    n: int
