import logging
import time
from typing import Callable, Optional

import numpy as np

from app.core.settings import settings
from app.domain.analysis.services.cost_services import cost
from app.domain.ann.schemas import AnnBackend
from app.domain.ann.services import init_index
from app.domain.dataset.models import Dataset
from app.domain.dataset.schemas import JLConfig
from app.domain.dataset.services import preprocess
from app.domain.seeding.schemas import (
    RejectionConfig,
    SeedingAlgorithm,
    SeedingRequest,
    SeedingResult,
)
from app.domain.seeding.utils import (
    KappaProposal,
    RowCoverage,
    draw_from_masses,
    draw_unchosen,
    perturbed_masses,
)
from app.domain.services.verification import (
    check_centered,
    check_cluster_count,
    check_condition,
)
from app.exceptions.ann_exceptions import InvalidRhoException
from app.exceptions.request_exceptions import InvalidArgumentException
from app.exceptions.seeding_exceptions import InvalidDeltaException, UnknownAlgorithmException

logger = logging.getLogger(__name__)

StepObserver = Optional[Callable[[int, np.ndarray], None]]


def _build_result(
    ds: Dataset, algo: str, indices: list[int], started_ns: int, **stats
) -> SeedingResult:
    elapsed = time.perf_counter_ns() - started_ns
    centers = ds.points[indices]
    return SeedingResult(
        algo=algo,
        k=len(indices),
        center_indices=indices,
        center_coords=centers.tolist(),
        elapsed_ns=elapsed,
        final_cost=cost(ds, centers),
        **stats,
    )


def _sq_dist_to(points: np.ndarray, index: int) -> np.ndarray:
    diff = points - points[index]
    return np.einsum("ij,ij->i", diff, diff)


def kmeanspp_exact(
    ds: Dataset, k: int, rng_seed: int, on_step: StepObserver = None
) -> SeedingResult:
    """D^2 샘플링. 점별 최소 거리 배열을 갱신하며 pi(.|C) 에서 정확히 뽑는다."""
    check_centered(ds)
    check_cluster_count(k, ds.n)
    rng = np.random.default_rng(rng_seed)
    started = time.perf_counter_ns()

    first = int(rng.integers(ds.n))
    chosen, chosen_set = [first], {first}
    min_sq = _sq_dist_to(ds.points, first)

    for step in range(2, k + 1):
        total = float(np.sum(min_sq))
        if total <= 0:
            index = draw_unchosen(ds.n, chosen_set, rng)
        else:
            masses = min_sq / total
            if on_step is not None:
                on_step(step, masses)
            index = draw_from_masses(masses, rng)
        chosen.append(index)
        chosen_set.add(index)
        min_sq = np.minimum(min_sq, _sq_dist_to(ds.points, index))

    return _build_result(
        ds, SeedingAlgorithm.KMEANSPP.value, chosen, started, per_step_proposals=[1] * (k - 1)
    )


def qkmeans(
    ds: Dataset, k: int, cfg: RejectionConfig, first_center: int | None = None
) -> SeedingResult:
    """kappa(.|C) 제안 + ANN 기반 기각 샘플링 시딩.

    각 단계는 최대 ceil(m ln max(k,2)) 개의 제안을 보고, 모두 거절되면
    균등 표본으로 대체한다 (fallback). m = inf 이면 수락될 때까지 제안한다.
    cost(X,C) = 0 이 된 뒤의 단계는 fallback 으로 세지 않고 남은 행에서 균등하게 고른다.
    first_center 를 주면 c1 을 무작위로 뽑지 않는다.
    """
    check_centered(ds)
    check_cluster_count(k, ds.n)
    sample_seq, ann_seq = np.random.SeedSequence(cfg.rng_seed).spawn(2)
    rng = np.random.default_rng(sample_seq)
    index = init_index(
        cfg.ann_backend,
        cfg.rho,
        rng_seed=int(ann_seq.generate_state(1)[0]),
        certify=cfg.ann_certify,
    )
    points, norms_sq = ds.points, ds.norms_sq
    started = time.perf_counter_ns()

    c1 = int(rng.integers(ds.n))
    if first_center is not None:
        check_condition(
            0 <= first_center < ds.n, InvalidArgumentException, f"first_center={first_center}"
        )
        c1 = first_center
    chosen, chosen_set = [c1], {c1}
    index.insert(points[c1])
    if k == 1:
        return _build_result(ds, SeedingAlgorithm.QKMEANS.value, chosen, started)

    c1_norm_sq = float(norms_sq[c1])
    degenerate = ds.frob_sq <= 0
    proposal = None if degenerate else KappaProposal.from_dataset(ds, c1_norm_sq)
    cap = cfg.iteration_cap(k)
    scale = 2.0 / index.rho

    per_step, fallback_steps, clamp_count = [], [], 0
    coverage: RowCoverage | None = None

    def zero_cost() -> bool:
        nonlocal coverage
        if coverage is None:
            coverage = RowCoverage(points, chosen)
        return coverage.complete

    for step in range(2, k + 1):
        accepted, iters = None, 0
        while not degenerate and (cap is None or iters < cap):
            iters += 1
            x = proposal.sample(rng)
            match = index.query(points[x], key=x)
            denom = scale * (norms_sq[x] + c1_norm_sq)
            ratio = match.dist_sq / denom if denom > 0 else 0.0
            if ratio > 1.0:
                clamp_count += 1
                ratio = 1.0
            if rng.random() < ratio:
                accepted = x
                break
            if cap is None and iters % settings.DEGENERATE_CHECK_EVERY == 0 and zero_cost():
                degenerate = True

        # 상한을 다 쓴 단계는 cost(X,C) = 0 여부를 먼저 본다
        if accepted is None and not degenerate and zero_cost():
            degenerate = True
            logger.debug(f"[SEED] cost(X,C)=0: step={step}, 이후 균등 선택")

        if accepted is None:
            if degenerate:
                accepted = draw_unchosen(ds.n, chosen_set, rng)
            else:
                accepted = int(rng.integers(ds.n))
                if accepted in chosen_set:
                    accepted = draw_unchosen(ds.n, chosen_set, rng)
                fallback_steps.append(step)
                logger.debug(f"[SEED] fallback: step={step}, proposals={iters}")

        per_step.append(iters)
        chosen.append(accepted)
        chosen_set.add(accepted)
        if coverage is not None:
            coverage.add(accepted)
        index.insert(points[accepted])

    logger.debug(
        f"[SEED] qkmeans 완료: k={k}, proposals={sum(per_step)}, fallbacks={len(fallback_steps)}"
    )
    return _build_result(
        ds,
        SeedingAlgorithm.QKMEANS.value,
        chosen,
        started,
        per_step_proposals=per_step,
        fallback_count=len(fallback_steps),
        fallback_steps=fallback_steps,
        clamp_count=clamp_count,
    )


def rho_delta_reference(
    ds: Dataset,
    k: int,
    rho: float,
    delta: float,
    rng_seed: int,
    ann_backend: AnnBackend | str | None = None,
    on_step: StepObserver = None,
    certify: bool | None = None,
) -> SeedingResult:
    """(rho, delta)-k-means++: 매 단계 n 개 질량을 모두 열거해 pi_(rho,delta) 에서 뽑는다."""
    check_centered(ds)
    check_cluster_count(k, ds.n)
    check_condition(0.0 <= delta < 0.5, InvalidDeltaException)
    check_condition(0.0 < rho <= 1.0, InvalidRhoException)
    if ann_backend is None:
        ann_backend = AnnBackend.EXACT if rho == 1.0 else AnnBackend.LSH

    rng = np.random.default_rng(rng_seed)
    index = init_index(ann_backend, rho, rng_seed=rng_seed, certify=certify)
    points = ds.points
    started = time.perf_counter_ns()

    first = int(rng.integers(ds.n))
    chosen, chosen_set = [first], {first}
    index.insert(points[first])

    for step in range(2, k + 1):
        costs = np.fromiter(
            (index.query(points[i], key=i).dist_sq for i in range(ds.n)),
            dtype=np.float64,
            count=ds.n,
        )
        if float(np.sum(costs)) <= 0:
            selected = draw_unchosen(ds.n, chosen_set, rng)
        else:
            masses = perturbed_masses(costs, delta)
            if on_step is not None:
                on_step(step, masses)
            selected = draw_from_masses(masses, rng)
        chosen.append(selected)
        chosen_set.add(selected)
        index.insert(points[selected])

    return _build_result(
        ds, SeedingAlgorithm.RHO_DELTA.value, chosen, started, per_step_proposals=[1] * (k - 1)
    )


def uniform_seeding(ds: Dataset, k: int, rng_seed: int) -> SeedingResult:
    check_cluster_count(k, ds.n)
    rng = np.random.default_rng(rng_seed)
    started = time.perf_counter_ns()
    chosen = [int(i) for i in rng.choice(ds.n, size=k, replace=False)]
    return _build_result(
        ds, SeedingAlgorithm.UNIFORM.value, chosen, started, per_step_proposals=[1] * (k - 1)
    )


SEEDERS: dict[SeedingAlgorithm, Callable[[Dataset, int, RejectionConfig, float], SeedingResult]] = {
    SeedingAlgorithm.QKMEANS: lambda ds, k, cfg, delta: qkmeans(ds, k, cfg),
    SeedingAlgorithm.KMEANSPP: lambda ds, k, cfg, delta: kmeanspp_exact(ds, k, cfg.rng_seed),
    SeedingAlgorithm.UNIFORM: lambda ds, k, cfg, delta: uniform_seeding(ds, k, cfg.rng_seed),
    SeedingAlgorithm.RHO_DELTA: lambda ds, k, cfg, delta: rho_delta_reference(
        ds, k, cfg.rho, delta, cfg.rng_seed, cfg.ann_backend, certify=cfg.ann_certify
    ),
}


def run_seeder(
    ds: Dataset,
    algo: SeedingAlgorithm | str,
    k: int,
    cfg: RejectionConfig,
    delta: float = 0.0,
) -> SeedingResult:
    try:
        algo = SeedingAlgorithm(algo)
    except ValueError:
        raise UnknownAlgorithmException(str(algo))

    logger.info(f"[SEED] 시작: algo={algo.value}, k={k}, n={ds.n}, seed={cfg.rng_seed}")
    return SEEDERS[algo](ds, k, cfg, delta)


def seed_points_service(request: SeedingRequest) -> SeedingResult:
    ds = preprocess(
        Dataset(points=request.points),
        JLConfig(eps_jl=request.jl_eps, k=request.k, rng_seed=request.seed) if request.jl_eps else None,
    )
    cfg = RejectionConfig(
        m=request.m,
        rho=request.rho,
        rng_seed=request.seed,
        ann_backend=request.ann,
        ann_certify=request.ann_certify,
    )
    return run_seeder(ds, request.algo, request.k, cfg, request.delta)
