import math
from typing import Protocol

import numpy as np

from app.domain.analysis.services.cost_services import assign
from app.domain.dataset.models import Dataset
from app.domain.sampler_tree.models import SamplerTree
from app.domain.services.verification import check_condition
from app.exceptions.sampler_exceptions import DegenerateDistributionException
from app.exceptions.seeding_exceptions import InvalidBoundException, InvalidDeltaException


class Proposal(Protocol):
    def sample(self, rng: np.random.Generator) -> int: ...

    def probability(self, index: int) -> float: ...


def draw_from_masses(masses: np.ndarray, rng: np.random.Generator) -> int:
    """masses 에 비례해 인덱스 하나를 뽑는다 (질량 0 인 행은 절대 선택되지 않음)."""
    cumulative = np.cumsum(masses)
    target = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, target, side="right"))
    index = min(index, masses.shape[0] - 1)
    while masses[index] <= 0:
        index -= 1
    return index


def draw_unchosen(n: int, chosen: set[int], rng: np.random.Generator) -> int:
    remaining = np.setdiff1d(np.arange(n), np.fromiter(chosen, dtype=np.int64))
    if remaining.size == 0:
        return int(rng.integers(n))
    return int(remaining[rng.integers(remaining.size)])


def d2_masses(costs: np.ndarray) -> np.ndarray:
    """pi(x|C) = cost(x,C) / cost(X,C)"""
    total = float(np.sum(costs))
    if total <= 0:
        raise DegenerateDistributionException()
    return costs / total


def perturbed_masses(costs, delta: float) -> np.ndarray:
    """pi_(rho,delta) = (1 - delta) pi^L + delta / n"""
    check_condition(0.0 <= delta < 0.5, InvalidDeltaException)
    costs = np.asarray(costs, dtype=np.float64)
    return (1.0 - delta) * d2_masses(costs) + delta / costs.shape[0]


def kappa_masses(norms_sq: np.ndarray, c1_norm_sq: float) -> np.ndarray:
    """kappa(x|C) = (||x||^2 + ||c1||^2) / (||X||_F^2 + n ||c1||^2)"""
    numer = norms_sq + c1_norm_sq
    return numer / float(np.sum(numer))


class KappaProposal:
    """||x||^2 트리와 균등분포의 혼합으로 kappa(.|C) 를 표현한다."""

    def __init__(self, tree: SamplerTree | None, frob_sq: float, c1_norm_sq: float, n: int):
        self.tree = tree
        self.frob_sq = frob_sq
        self.c1_norm_sq = c1_norm_sq
        self.n = n

    @classmethod
    def from_dataset(cls, ds: Dataset, c1_norm_sq: float) -> "KappaProposal":
        tree = SamplerTree.build(ds.norms_sq) if ds.frob_sq > 0 else None
        return cls(tree, ds.frob_sq, c1_norm_sq, ds.n)

    def sample(self, rng: np.random.Generator) -> int:
        return sample_proposal(self.tree, self.frob_sq, self.c1_norm_sq, self.n, rng)

    def probability(self, index: int) -> float:
        weight = self.tree.weight(index) if self.tree is not None else 0.0
        return (weight + self.c1_norm_sq) / (self.frob_sq + self.n * self.c1_norm_sq)


def sample_proposal(
    tree: SamplerTree | None,
    frob_sq: float,
    c1_norm_sq: float,
    n: int,
    rng: np.random.Generator,
) -> int:
    """확률 frob/(frob + n c1) 로 노름 트리, 나머지는 균등."""
    total = frob_sq + n * c1_norm_sq
    if not total > 0:
        raise DegenerateDistributionException()
    if rng.random() * total < frob_sq:
        return tree.sample(rng)
    return int(rng.integers(n))


def reject_sample(
    target_weights,
    proposal: Proposal,
    bound: float,
    max_iters: int | None,
    rng: np.random.Generator,
) -> tuple[int, bool, int]:
    """target <= bound * proposal 일 때 target 의 정확한 표본.

    max_iters 번 모두 거절되면 (마지막 제안, False, max_iters).
    """
    check_condition(bound >= 1.0, InvalidBoundException)
    target = np.asarray(target_weights, dtype=np.float64)
    target = target / float(np.sum(target))
    assert all(
        target[i] <= bound * proposal.probability(i) * (1 + 1e-9) for i in range(target.shape[0])
    ), "oversampling 조건 위반"

    iters = 0
    index = -1
    while max_iters is None or iters < max_iters:
        iters += 1
        index = proposal.sample(rng)
        ratio = target[index] / (bound * proposal.probability(index))
        if rng.random() < ratio:
            return index, True, iters
    return index, False, iters


def oversampling_tau(frob_sq: float, n: int, c1_norm_sq: float, total_cost: float, rho: float) -> float:
    """tau = 2 rho^-1 (||X||_F^2 + n ||c1||^2) / cost(X,C)"""
    if total_cost <= 0:
        return math.inf
    return 2.0 / rho * (frob_sq + n * c1_norm_sq) / total_cost


def prefix_costs(ds: Dataset, center_indices: list[int]) -> list[np.ndarray]:
    """단계 t = 2..k 에서 쓰이는 C_{t-1} 에 대한 점별 cost 목록"""
    if len(center_indices) < 2:
        return []
    points = ds.points
    _, current = assign(points, points[center_indices[:1]])
    out = [current.copy()]
    for idx in center_indices[1:-1]:
        diff = points - points[idx]
        current = np.minimum(current, np.einsum("ij,ij->i", diff, diff))
        out.append(current.copy())
    return out


def oversampling_violations(
    ds: Dataset, center_indices: list[int], rho: float = 1.0, tau_scale: float = 1.0
) -> int:
    """pi(x|C_t) <= tau_t kappa(x|C_t) 위반 (x, t) 개수"""
    norms_sq = ds.norms_sq
    c1_norm_sq = float(norms_sq[center_indices[0]])
    kappa = kappa_masses(norms_sq, c1_norm_sq)
    violations = 0
    for costs in prefix_costs(ds, center_indices):
        total = float(np.sum(costs))
        if total <= 0:
            continue
        tau = tau_scale * oversampling_tau(ds.frob_sq, ds.n, c1_norm_sq, total, rho)
        violations += int(np.sum(costs / total > tau * kappa * (1 + 1e-9)))
    return violations


def failure_bounds(ds: Dataset, center_indices: list[int], m: float, k: int, rho: float) -> list[float]:
    """단계별 실패 확률 상한 exp(-m ln k / tau_t)"""
    norms_sq = ds.norms_sq
    c1_norm_sq = float(norms_sq[center_indices[0]])
    cap = math.ceil(m * math.log(max(k, 2))) if math.isfinite(m) else math.inf
    bounds = []
    for costs in prefix_costs(ds, center_indices):
        if math.isinf(cap):
            bounds.append(0.0)
            continue
        tau = oversampling_tau(ds.frob_sq, ds.n, c1_norm_sq, float(np.sum(costs)), rho)
        bounds.append(1.0 if math.isinf(tau) else math.exp(-cap / tau))
    return bounds


class RowCoverage:
    """선택된 행이 서로 다른 모든 행 값을 덮으면 cost(X, C) = 0 이다."""

    def __init__(self, points: np.ndarray, chosen: list[int]):
        _, labels = np.unique(points, axis=0, return_inverse=True)
        self._labels = labels.reshape(-1)
        self._distinct = int(self._labels.max()) + 1
        self._covered = {int(self._labels[i]) for i in chosen}

    def add(self, index: int) -> None:
        self._covered.add(int(self._labels[index]))

    @property
    def complete(self) -> bool:
        return len(self._covered) == self._distinct
