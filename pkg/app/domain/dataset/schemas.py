from enum import Enum

from pydantic import BaseModel, Field, model_validator

from app.exceptions.dataset_exceptions import (
    DimensionException,
    InvalidJLParameterException,
)


class DatasetFormat(str, Enum):
    CSV = "csv"
    BIN = "bin"


class ManifoldKind(str, Enum):
    UNIT_CUBE = "unit-cube"
    UNIT_SPHERE = "unit-sphere"


class SyntheticSpec(BaseModel):
    intrinsic_dim: int = Field(..., ge=1)
    ambient_dim: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    kind: ManifoldKind = ManifoldKind.UNIT_CUBE
    rng_seed: int = 0

    @model_validator(mode="after")
    def check_dims(self):
        if self.intrinsic_dim > self.ambient_dim:
            raise DimensionException(
                f"d={self.intrinsic_dim} 는 D={self.ambient_dim} 보다 클 수 없습니다"
            )
        if self.kind == ManifoldKind.UNIT_SPHERE and self.intrinsic_dim >= self.ambient_dim:
            raise DimensionException("d 차원 구면은 D > d 인 공간이 필요합니다")
        return self


class MixtureSpec(BaseModel):
    components: int = Field(..., ge=1)
    ambient_dim: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    spread: float = Field(10.0, gt=0)
    rng_seed: int = 0


class JLConfig(BaseModel):
    eps_jl: float
    k: int = Field(..., ge=1)
    rng_seed: int = 0

    @model_validator(mode="after")
    def check_eps(self):
        if not 0.0 < self.eps_jl < 0.25:
            raise InvalidJLParameterException()
        return self
