import logging
import math
from abc import ABC, abstractmethod

import numpy as np

from app.domain.ann.schemas import AnnBackend, AnnMatch
from app.exceptions.ann_exceptions import (
    AnnDimensionMismatchException,
    EmptyAnnIndexException,
)

logger = logging.getLogger(__name__)


class AnnIndex(ABC):
    """중심 집합에 대한 근사 최근접 이웃 인덱스.

    query 가 돌려주는 q 는 ||p - q||^2 <= rho^-1 * min_r ||p - r||^2 를 만족한다.
    key(데이터 행 번호)를 넘기면 같은 key 에 대해 이전보다 나쁜 거리를
    돌려주지 않는다 (삽입에 대해 단조).
    """

    backend: AnnBackend

    def __init__(self, rho: float):
        self.rho = rho
        self.dim: int | None = None
        self.size = 0
        self.distance_evaluations = 0
        self._buf = np.empty((0, 0), dtype=np.float64)
        self._best: dict[int, tuple[int, float]] = {}

    def __len__(self) -> int:
        return self.size

    @property
    def centers(self) -> np.ndarray:
        return self._buf[: self.size]

    def insert(self, center) -> int:
        center = np.asarray(center, dtype=np.float64).ravel()
        if self.dim is None:
            self.dim = center.shape[0]
            self._buf = np.empty((16, self.dim), dtype=np.float64)
            self._on_first_insert(self.dim)
        elif center.shape[0] != self.dim:
            raise AnnDimensionMismatchException(self.dim, center.shape[0])

        if self.size == self._buf.shape[0]:
            grown = np.empty((2 * self.size, self.dim), dtype=np.float64)
            grown[: self.size] = self._buf
            self._buf = grown

        ordinal = self.size
        self._buf[ordinal] = center
        self.size += 1
        self._on_insert(ordinal, center)
        return ordinal

    def query(self, probe, key: int | None = None) -> AnnMatch:
        if self.size == 0:
            raise EmptyAnnIndexException()
        probe = np.asarray(probe, dtype=np.float64).ravel()
        if probe.shape[0] != self.dim:
            raise AnnDimensionMismatchException(self.dim, probe.shape[0])

        ordinal, dist_sq = self._search(probe)
        if key is not None:
            cached = self._best.get(key)
            if cached is not None and cached[1] <= dist_sq:
                ordinal, dist_sq = cached
            else:
                self._best[key] = (ordinal, dist_sq)
        return AnnMatch(self._buf[ordinal].copy(), dist_sq, ordinal)

    def _distances(self, ordinals: np.ndarray | None, probe: np.ndarray) -> np.ndarray:
        stored = self.centers if ordinals is None else self._buf[ordinals]
        diff = stored - probe
        self.distance_evaluations += diff.shape[0]
        return np.einsum("ij,ij->i", diff, diff)

    def _on_first_insert(self, dim: int) -> None:
        pass

    def _on_insert(self, ordinal: int, center: np.ndarray) -> None:
        pass

    @abstractmethod
    def _search(self, probe: np.ndarray) -> tuple[int, float]: ...


class ExactAnnIndex(AnnIndex):
    backend = AnnBackend.EXACT

    def __init__(self):
        super().__init__(rho=1.0)

    def _search(self, probe):
        dist = self._distances(None, probe)
        ordinal = int(np.argmin(dist))
        return ordinal, float(dist[ordinal])


class LshAnnIndex(AnnIndex):
    """랜덤 초평면 LSH (다중 테이블).

    후보 = 모든 테이블에서 probe 와 같은 버킷 + 첫 번째 중심.
    버킷이 모두 비면 전체 탐색. certify=True 이면 정규직교 투영 Q 로 얻는
    하한 ||Q(p-c)||^2 이 rho * (후보 최솟값) 보다 작은 중심을 정확히 다시
    계산해 rho 계약을 항상 만족시킨다 (질의당 O(k) 투영).
    """

    backend = AnnBackend.LSH

    def __init__(
        self, rho: float, rng_seed: int, failure_inverse: int = 1000, certify: bool = False
    ):
        super().__init__(rho=rho)
        self.tables = math.ceil(math.log(failure_inverse) / rho)
        self.width = math.ceil(math.log2(failure_inverse))
        self.certify = certify
        self.fallback_scans = 0
        self._rng = np.random.default_rng(rng_seed)
        self._planes = np.empty((0, 0))
        self._bound = np.empty((0, 0))
        self._proj = np.empty((0, 0))
        self._powers = (1 << np.arange(self.width, dtype=np.int64)).astype(np.int64)
        self._buckets: list[dict[int, list[int]]] = [{} for _ in range(self.tables)]

    def _on_first_insert(self, dim):
        self._planes = self._rng.standard_normal((self.tables * self.width, dim))
        if self.certify:
            rows = max(1, math.ceil(dim / 2))
            q, _ = np.linalg.qr(self._rng.standard_normal((dim, rows)))
            self._bound = q.T
            self._proj = np.empty((16, rows), dtype=np.float64)

    def _on_insert(self, ordinal, center):
        for table, key in enumerate(self.signature(center)):
            self._buckets[table].setdefault(key, []).append(ordinal)

        if not self.certify:
            return
        if ordinal == self._proj.shape[0]:
            grown = np.empty((2 * ordinal, self._proj.shape[1]), dtype=np.float64)
            grown[:ordinal] = self._proj[:ordinal]
            self._proj = grown
        self._proj[ordinal] = self._bound @ center

    def signature(self, point: np.ndarray) -> list[int]:
        bits = (self._planes @ point > 0).reshape(self.tables, self.width)
        return [int(v) for v in bits.astype(np.int64) @ self._powers]

    def _search(self, probe):
        candidates: set[int] = set()
        for table, key in enumerate(self.signature(probe)):
            candidates.update(self._buckets[table].get(key, ()))

        if not candidates:
            self.fallback_scans += 1
            logger.debug(f"[ANN] 빈 버킷, 전체 탐색: size={self.size}")
            dist = self._distances(None, probe)
            ordinal = int(np.argmin(dist))
            return ordinal, float(dist[ordinal])

        candidates.add(0)
        ordinals = np.fromiter(sorted(candidates), dtype=np.int64, count=len(candidates))
        dist = self._distances(ordinals, probe)
        j = int(np.argmin(dist))
        best, best_d = int(ordinals[j]), float(dist[j])
        if not self.certify:
            return best, best_d

        # 후보 밖의 중심이 rho 배 이상 가까울 수 없음을 하한으로 확인
        gap = self._proj[: self.size] - self._bound @ probe
        lower = np.einsum("ij,ij->i", gap, gap)
        suspects = np.flatnonzero(lower < self.rho * best_d)
        if suspects.size:
            suspect_dist = self._distances(suspects, probe)
            j = int(np.argmin(suspect_dist))
            if suspect_dist[j] < best_d:
                best, best_d = int(suspects[j]), float(suspect_dist[j])
        return best, best_d
