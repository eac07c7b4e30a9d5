import logging
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from functools import partial
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import scipy
import sklearn

from app.core.settings import resolve_threads
from app.domain.analysis.services.id_services import mle_id
from app.domain.analysis.services.scaling_services import (
    beta_curve,
    cell_seed,
    curve_fits,
    intrinsic_dim_from_slope,
)
from app.domain.ann.schemas import AnnBackend
from app.domain.dataset.models import Dataset
from app.domain.dataset.repository import file_digest, load_dataset
from app.domain.dataset.schemas import DatasetFormat, JLConfig
from app.domain.dataset.services import preprocess
from app.domain.experiment.schemas import (
    BenchRow,
    BenchSummary,
    IdEntry,
    IdReport,
    RunManifest,
    ScalingReport,
)
from app.domain.seeding.schemas import RejectionConfig, SeedingAlgorithm
from app.domain.seeding.services import run_seeder
from app.domain.services.verification import check_condition
from app.exceptions.analysis_exceptions import InvalidNeighborCountException
from app.exceptions.ann_exceptions import UnknownAnnBackendException
from app.exceptions.request_exceptions import InvalidArgumentException
from app.exceptions.seeding_exceptions import UnknownAlgorithmException

logger = logging.getLogger(__name__)

PACKAGE_NAME = "qkmeans-bench"


def package_versions() -> dict[str, str]:
    try:
        own = metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        own = "0+local"
    return {
        PACKAGE_NAME: own,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "scikit-learn": sklearn.__version__,
    }


def build_manifest(
    command: str, params: dict[str, Any], input_path: str | Path | None = None
) -> RunManifest:
    return RunManifest(
        command=command,
        params=params,
        timestamp=datetime.now(timezone.utc).isoformat(),
        input_digest=file_digest(input_path) if input_path else None,
        versions=package_versions(),
    )


def prepare_dataset(
    input_path: str | Path,
    format: DatasetFormat | str,
    jl_eps: float | None = None,
    k: int = 2,
    jl_seed: int = 0,
) -> Dataset:
    """로드 -> (선택) JL -> 중심화"""
    ds = load_dataset(input_path, format)
    jl = JLConfig(eps_jl=jl_eps, k=max(k, 1), rng_seed=jl_seed) if jl_eps else None
    return preprocess(ds, jl)


def _backend(name: str) -> AnnBackend:
    try:
        return AnnBackend(name)
    except ValueError:
        raise UnknownAnnBackendException(name)


def bench_entries(
    algos: Sequence[str], anns: Sequence[str]
) -> list[tuple[str, SeedingAlgorithm, AnnBackend]]:
    """qkmeans 는 ANN 백엔드가 여러 개면 qkmeans[lsh] 처럼 펼친다."""
    check_condition(bool(algos), InvalidArgumentException, "algo 목록이 비어 있습니다")
    backends = [_backend(ann) for ann in anns] or [AnnBackend.EXACT]
    entries = []
    for name in algos:
        try:
            algo = SeedingAlgorithm(name)
        except ValueError:
            raise UnknownAlgorithmException(name)
        if algo == SeedingAlgorithm.QKMEANS and len(backends) > 1:
            entries.extend((f"{algo.value}[{b.value}]", algo, b) for b in backends)
        else:
            entries.append((algo.value, algo, backends[0]))
    return entries


BenchCell = tuple[tuple[str, SeedingAlgorithm, AnnBackend], int, int]

_worker_dataset: Dataset | None = None


def _init_bench_worker(ds: Dataset) -> None:
    global _worker_dataset
    _worker_dataset = ds


def bench_cell(
    ds: Dataset,
    cell: BenchCell,
    dataset_name: str,
    m: int | float,
    rho: float,
    delta: float,
    certify: bool | None = None,
) -> BenchRow:
    (label, algo, backend), k, seed = cell
    cfg = RejectionConfig(m=m, rho=rho, rng_seed=seed, ann_backend=backend, ann_certify=certify)
    result = run_seeder(ds, algo, k, cfg, delta)
    return BenchRow(
        dataset=dataset_name,
        algo=label,
        k=k,
        seed=seed,
        time_ms=result.elapsed_ns / 1e6,
        cost=result.final_cost,
    )


def _bench_cell_in_worker(cell: BenchCell, **kwargs) -> BenchRow:
    return bench_cell(_worker_dataset, cell, **kwargs)


def bench_workers(threads: int | None, cells: int) -> int:
    """타이밍 셀은 코어 수를 넘겨 동시에 돌리지 않는다."""
    return max(1, min(resolve_threads(threads), os.cpu_count() or 1, cells))


def run_bench(
    ds: Dataset,
    dataset_name: str,
    algos: Sequence[str],
    ks: Sequence[int],
    seeds: Sequence[int],
    m: int | float = 10,
    rho: float = 1.0,
    anns: Sequence[str] = ("exact",),
    delta: float = 0.0,
    threads: int | None = None,
    certify: bool | None = None,
) -> tuple[list[BenchRow], list[BenchSummary]]:
    """(algo, k, seed) 셀마다 시딩 시간과 cost.

    셀은 프로세스별로 따로 돌아 time_ms 에 다른 셀의 GIL 대기가 섞이지 않는다.
    """
    entries = bench_entries(algos, anns)
    cells = [(entry, k, seed) for entry in entries for k in ks for seed in seeds]
    params = dict(dataset_name=dataset_name, m=m, rho=rho, delta=delta, certify=certify)
    workers = bench_workers(threads, len(cells))

    logger.info(
        f"[BENCH] 시작: entries={len(entries)}, ks={list(ks)}, seeds={len(seeds)}, workers={workers}"
    )
    if workers == 1:
        rows = [bench_cell(ds, cell, **params) for cell in cells]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_bench_worker, initargs=(ds,)
        ) as pool:
            rows = list(pool.map(partial(_bench_cell_in_worker, **params), cells))
    return rows, summarize_bench(rows)


def summarize_bench(rows: list[BenchRow]) -> list[BenchSummary]:
    groups: dict[tuple[str, int], list[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row.algo, row.k), []).append(row)
    return [
        BenchSummary(
            algo=algo,
            k=k,
            runs=len(group),
            mean_time_ms=statistics.mean(r.time_ms for r in group),
            median_time_ms=statistics.median(r.time_ms for r in group),
            mean_cost=statistics.mean(r.cost for r in group),
        )
        for (algo, k), group in groups.items()
    ]


def run_scaling(
    ds: Dataset,
    ks: Sequence[int],
    runs: int,
    lloyd_iters: int = 20,
    rng_seed: int = 0,
    aggregate: str = "mean",
    threads: int | None = None,
) -> ScalingReport:
    curve = beta_curve(ds, ks, runs, lloyd_iters, rng_seed, aggregate=aggregate, threads=threads)
    beta_fit, eta_fit = curve_fits(curve)
    logger.info(f"[ANALYSIS] scaling: eps_hat={beta_fit.slope:.4f}, r2={beta_fit.r_squared:.4f}")
    return ScalingReport(
        eps_hat=beta_fit.slope,
        r2_beta=beta_fit.r_squared,
        ci95_beta=beta_fit.ci95_slope,
        eta_slope=eta_fit.slope,
        r2_eta=eta_fit.r_squared,
        ci95_eta=eta_fit.ci95_slope,
        d_eps=intrinsic_dim_from_slope(beta_fit.slope),
        aggregate=aggregate,
        points=[point.model_dump() for point in curve],
    )


def run_id(
    ds: Dataset,
    k_nns: Sequence[int],
    subsample: int | None = None,
    repeats: int = 1,
    rng_seed: int = 0,
) -> IdReport:
    """k_nn 별로 repeats 개 부분표본의 MLE 추정치와 전체 평균.

    부분표본이 전체 데이터면 추정치가 모두 같으므로 한 번만 계산한다.
    """
    check_condition(repeats >= 1, InvalidArgumentException, f"repeats={repeats}")
    check_condition(bool(k_nns), InvalidArgumentException, "k_nn 목록이 비어 있습니다")
    for k_nn in k_nns:
        check_condition(k_nn >= 2, InvalidNeighborCountException, f"k_nn={k_nn} (2 이상 필요)")

    if repeats > 1 and (subsample is None or subsample >= ds.n):
        logger.info(f"[ANALYSIS] 부분표본 없음 (subsample={subsample}, n={ds.n}): repeats=1")
        repeats = 1

    # 반복마다 같은 부분표본을 모든 k_nn 에 쓴다
    repeat_seeds = [cell_seed(rng_seed, 0, r) for r in range(repeats)]
    per_k = []
    for k_nn in k_nns:
        estimates = [mle_id(ds, k_nn, subsample, seed) for seed in repeat_seeds]
        per_k.append(IdEntry(k_nn=k_nn, estimates=estimates, mean=float(np.mean(estimates))))
        logger.info(f"[ANALYSIS] MLE-ID k_nn={k_nn}: {per_k[-1].mean:.4f}")

    return IdReport(
        per_k=per_k,
        grand_mean=float(np.mean([entry.mean for entry in per_k])),
        subsample=subsample,
        repeats=repeats,
    )
