from dataclasses import dataclass, field

import numpy as np

from app.exceptions.dataset_exceptions import (
    DimensionException,
    EmptyDatasetException,
    NonFiniteValueException,
)


@dataclass(frozen=True)
class Dataset:
    """n x D 실수 행렬. 생성 후 불변이며 스레드 간 공유 가능."""

    points: np.ndarray
    centered: bool = False
    frob_sq: float | None = field(default=None)

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64, copy=True)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2:
            raise DimensionException(f"2차원 행렬이 필요합니다 (ndim={points.ndim})")
        if points.shape[0] == 0:
            raise EmptyDatasetException()
        if points.shape[1] == 0:
            raise DimensionException("dim 은 1 이상이어야 합니다")
        if not np.all(np.isfinite(points)):
            raise NonFiniteValueException()
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        if self.centered and self.frob_sq is None:
            object.__setattr__(self, "frob_sq", frobenius_sq(points))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def norms_sq(self) -> np.ndarray:
        return np.sum(self.points * self.points, axis=1)


def frobenius_sq(points: np.ndarray) -> float:
    # 행별 합을 먼저 구해 cost(X, {0}) 와 같은 합산 순서를 따른다
    return float(np.sum(np.sum(points * points, axis=1)))
