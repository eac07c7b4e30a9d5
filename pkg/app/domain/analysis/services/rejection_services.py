import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np

from app.core.settings import resolve_threads
from app.domain.analysis.schemas import RejectionCell
from app.domain.analysis.services.scaling_services import cell_seed
from app.domain.ann.schemas import AnnBackend
from app.domain.dataset.models import Dataset
from app.domain.seeding.schemas import RejectionConfig
from app.domain.seeding.services import qkmeans
from app.domain.seeding.utils import failure_bounds
from app.domain.services.verification import check_cluster_count, check_condition
from app.exceptions.seeding_exceptions import InvalidChainLengthException

logger = logging.getLogger(__name__)


def _rejection_run(ds: Dataset, k: int, cfg: RejectionConfig, rho: float) -> tuple[int, int, float]:
    result = qkmeans(ds, k, cfg)
    bounds = failure_bounds(ds, result.center_indices, cfg.m, k, rho)
    return result.fallback_count, sum(result.per_step_proposals), float(np.sum(bounds))


def rejection_sweep(
    ds: Dataset,
    ms: Iterable[int],
    ks: Iterable[int],
    runs: int,
    rho: float = 1.0,
    ann_backend: AnnBackend = AnnBackend.EXACT,
    rng_seed: int = 0,
    threads: int | None = None,
    certify: bool | None = None,
) -> list[RejectionCell]:
    """(m, k) 별 fallback 비율과 단계당 평균 제안 수.

    failure_bound_mean 은 같은 run 들의 단계별 상한 exp(-cap/tau_t) 평균이다.
    """
    ms, ks = list(ms), sorted(set(int(k) for k in ks))
    for m in ms:
        check_condition(math.isfinite(m) and m >= 1, InvalidChainLengthException)
    for k in ks:
        check_cluster_count(k, ds.n)
    effective_rho = rho if AnnBackend(ann_backend) == AnnBackend.LSH else 1.0

    cells = []
    for m in ms:
        for k in ks:
            if k < 2:
                continue
            for run in range(runs):
                cfg = RejectionConfig(
                    m=m,
                    rho=rho,
                    rng_seed=cell_seed(rng_seed, k, run),
                    ann_backend=ann_backend,
                    ann_certify=certify,
                )
                cells.append((m, k, cfg))

    logger.info(f"[ANALYSIS] rejection sweep 시작: ms={ms}, ks={ks}, runs={runs}")
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        outcomes = list(
            pool.map(lambda cell: _rejection_run(ds, cell[1], cell[2], effective_rho), cells)
        )

    totals: dict[tuple[int, int], list[float]] = {}
    for (m, k, _), (fallbacks, proposals, bound_sum) in zip(cells, outcomes):
        acc = totals.setdefault((m, k), [0, 0, 0.0, 0])
        acc[0] += fallbacks
        acc[1] += proposals
        acc[2] += bound_sum
        acc[3] += 1

    report = []
    for (m, k), (fallbacks, proposals, bound_sum, count) in totals.items():
        steps = count * (k - 1)
        report.append(
            RejectionCell(
                m=int(m),
                k=k,
                runs=count,
                fallback_fraction=fallbacks / steps,
                mean_proposals=proposals / steps,
                failure_bound_mean=bound_sum / steps,
            )
        )
    return report
