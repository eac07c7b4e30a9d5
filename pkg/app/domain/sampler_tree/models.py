import numpy as np

from app.exceptions.sampler_exceptions import (
    DegenerateDistributionException,
    NegativeWeightException,
    TreeIndexOutOfRangeException,
)


class SamplerTree:
    """비음수 가중치 위의 완전 이진 트리.

    리프 i 는 weight(i) 를, 내부 노드는 두 자식의 합을 저장한다. 힙 배열
    (루트 = 1, 자식 = 2i, 2i+1) 로 저장하며 capacity 는 n 이상인 최소
    2의 거듭제곱이고 나머지 리프는 0 으로 채운다.

    - sample: O(log n), 확률 weight(i) / total
    - update: O(log n)
    - total: O(1)

    업데이트 중 동시 샘플링은 안전하지 않다 (단일 writer).
    """

    def __init__(self, n: int, capacity: int, nodes: np.ndarray):
        self.n = n
        self.capacity = capacity
        self._nodes = nodes

    @classmethod
    def build(cls, weights) -> "SamplerTree":
        weights = np.asarray(weights, dtype=np.float64).ravel()
        n = weights.shape[0]
        if n == 0 or not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise NegativeWeightException()
        if not np.any(weights > 0):
            raise DegenerateDistributionException()

        capacity = 1 << max(0, (n - 1).bit_length())
        nodes = np.zeros(2 * capacity, dtype=np.float64)
        nodes[capacity : capacity + n] = weights

        # 레벨 단위로 합산
        start = capacity
        while start > 1:
            half = start // 2
            nodes[half:start] = nodes[start : 2 * start : 2] + nodes[start + 1 : 2 * start : 2]
            start = half
        return cls(n, capacity, nodes)

    @property
    def total(self) -> float:
        return float(self._nodes[1])

    def __len__(self) -> int:
        return self.n

    def weight(self, index: int) -> float:
        self._check_index(index)
        return float(self._nodes[self.capacity + index])

    def probability(self, index: int) -> float:
        return self.weight(index) / self.total

    def node(self, position: int) -> float:
        return float(self._nodes[position])

    def leaf_weights(self) -> np.ndarray:
        return self._nodes[self.capacity : self.capacity + self.n].copy()

    def update(self, index: int, new_weight: float) -> None:
        self._check_index(index)
        if not np.isfinite(new_weight) or new_weight < 0:
            raise NegativeWeightException()

        nodes = self._nodes
        pos = self.capacity + index
        nodes[pos] = new_weight
        pos //= 2
        while pos >= 1:
            nodes[pos] = nodes[2 * pos] + nodes[2 * pos + 1]
            pos //= 2

    def sample_at(self, u: float) -> int:
        """u in [0,1) 에 대한 결정적 하강. 경계값은 왼쪽으로."""
        nodes = self._nodes
        if not nodes[1] > 0:
            raise DegenerateDistributionException()

        target = u * nodes[1]
        pos = 1
        while pos < self.capacity:
            left = nodes[2 * pos]
            right = nodes[2 * pos + 1]
            # 가중치 0 인 서브트리로는 내려가지 않는다
            if right <= 0.0 or (left > 0.0 and target <= left):
                pos = 2 * pos
            else:
                target -= left
                pos = 2 * pos + 1
        return pos - self.capacity

    def sample(self, rng: np.random.Generator) -> int:
        return self.sample_at(rng.random())

    def _check_index(self, index: int):
        if not 0 <= index < self.n:
            raise TreeIndexOutOfRangeException(index, self.n)
