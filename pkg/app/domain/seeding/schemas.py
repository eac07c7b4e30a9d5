import math
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from app.domain.ann.schemas import AnnBackend
from app.exceptions.ann_exceptions import InvalidRhoException
from app.exceptions.seeding_exceptions import InvalidChainLengthException


class SeedingAlgorithm(str, Enum):
    QKMEANS = "qkmeans"
    KMEANSPP = "kmeanspp"
    UNIFORM = "uniform"
    RHO_DELTA = "rho-delta"


class RejectionConfig(BaseModel):
    m: Union[int, float] = 10
    rho: float = 1.0
    rng_seed: int = 0
    ann_backend: AnnBackend = AnnBackend.EXACT
    # None 이면 settings.LSH_CERTIFY
    ann_certify: Optional[bool] = None

    @field_validator("m", mode="before")
    @classmethod
    def check_m(cls, value):
        if isinstance(value, str):
            value = math.inf if value.strip().lower() == "inf" else float(value)
        if value == math.inf:
            return math.inf
        if not math.isfinite(value) or value < 1 or value != int(value):
            raise InvalidChainLengthException()
        return int(value)

    @model_validator(mode="after")
    def check_rho(self):
        if not 0.0 < self.rho <= 1.0:
            raise InvalidRhoException()
        return self

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.m)

    def iteration_cap(self, k: int) -> int | None:
        """ceil(m ln max(k,2)); m = inf 이면 None"""
        if not self.bounded:
            return None
        return math.ceil(self.m * math.log(max(k, 2)))


class SeedingResult(BaseModel):
    algo: str
    k: int
    center_indices: list[int]
    center_coords: list[list[float]]
    per_step_proposals: list[int] = Field(default_factory=list)
    fallback_count: int = 0
    fallback_steps: list[int] = Field(default_factory=list)
    clamp_count: int = 0
    elapsed_ns: int = 0
    final_cost: float = 0.0


class SeedingRequest(BaseModel):
    points: list[list[float]]
    k: int = Field(..., ge=1)
    algo: SeedingAlgorithm = SeedingAlgorithm.QKMEANS
    m: Union[int, str] = 10
    rho: float = 1.0
    ann: AnnBackend = AnnBackend.EXACT
    ann_certify: Optional[bool] = None
    delta: float = 0.0
    seed: int = 0
    jl_eps: Optional[float] = None
