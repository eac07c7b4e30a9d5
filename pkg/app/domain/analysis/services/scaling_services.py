import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from app.core.settings import resolve_threads
from app.domain.analysis.schemas import BetaCurvePoint, NoiseLevelPoint, PowerLawFit
from app.domain.analysis.services.cost_services import aspect_ratio, geom_params, lloyd
from app.domain.dataset.models import Dataset
from app.domain.dataset.services import inject_noise
from app.domain.seeding.services import kmeanspp_exact
from app.domain.services.verification import check_cluster_count, check_condition
from app.exceptions.analysis_exceptions import NonPositiveValueException, TooFewPointsException
from app.exceptions.request_exceptions import InvalidArgumentException

logger = logging.getLogger(__name__)

AGGREGATES = ("mean", "best")
DEFAULT_NOISE_LEVELS = tuple(float(v) for v in np.linspace(0.0, 2.0, 20))


def fit_power_law(ks: Sequence[float], values: Sequence[float]) -> PowerLawFit:
    """ln(value) = slope * ln(k) + intercept 의 최소제곱 적합과 slope 95% 신뢰구간"""
    ks = np.asarray(ks, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    check_condition(ks.shape == values.shape and ks.size >= 3, TooFewPointsException, 3)
    check_condition(
        bool(np.all(values > 0) and np.all(np.isfinite(values))), NonPositiveValueException
    )
    check_condition(bool(np.all(ks > 0)), NonPositiveValueException)

    x, y = np.log(ks), np.log(values)
    if np.ptp(x) == 0:
        raise InvalidArgumentException("k 값이 모두 같아 회귀할 수 없습니다")

    if np.ptp(y) == 0:
        # 분산 0: 기울기 0, R^2 = 0, 구간은 한 점
        return PowerLawFit(
            slope=0.0,
            intercept=float(y[0]),
            r_squared=0.0,
            ci95_slope=(0.0, 0.0),
            points_used=int(ks.size),
        )

    fit = stats.linregress(x, y)
    slope, intercept = float(fit.slope), float(fit.intercept)
    half = float(stats.t.ppf(0.975, df=ks.size - 2) * fit.stderr)
    return PowerLawFit(
        slope=slope,
        intercept=intercept,
        r_squared=min(1.0, max(0.0, float(fit.rvalue) ** 2)),
        ci95_slope=(slope - half, slope + half),
        points_used=int(ks.size),
    )


def cell_seed(rng_seed: int, k: int, run: int) -> int:
    return int(np.random.SeedSequence([rng_seed, k, run]).generate_state(1)[0])


def _curve_cell(ds: Dataset, k: int, run: int, lloyd_iters: int, rng_seed: int) -> dict:
    seeded = kmeanspp_exact(ds, k, cell_seed(rng_seed, k, run))
    initial = ds.points[seeded.center_indices]
    centers, trace = lloyd(ds, initial, lloyd_iters)
    params = geom_params(ds, centers)
    return {
        "beta": params.beta,
        "eta_centers": params.eta_centers,
        "eta_centers_pre_lloyd": aspect_ratio(initial),
        "cost": trace[-1],
    }


def beta_curve(
    ds: Dataset,
    ks: Iterable[int],
    runs: int,
    lloyd_iters: int = 20,
    rng_seed: int = 0,
    aggregate: str = "mean",
    threads: int | None = None,
) -> list[BetaCurvePoint]:
    """k 별로 runs 번 (k-means++ -> Lloyd) 후 beta / eta 를 집계한다.

    aggregate="mean" 은 run 평균, "best" 는 최소 cost run 의 값을 쓴다.
    k = 1 은 eta 가 정의되지 않아 제외한다.
    """
    check_condition(aggregate in AGGREGATES, InvalidArgumentException, f"aggregate={aggregate}")
    check_condition(runs >= 1, InvalidArgumentException, f"runs={runs}")

    usable = []
    for k in sorted(set(int(k) for k in ks)):
        if k == 1:
            logger.warning("[ANALYSIS] k=1 은 eta 가 정의되지 않아 제외합니다")
            continue
        check_cluster_count(k, ds.n)
        usable.append(k)

    cells = [(k, run) for k in usable for run in range(runs)]
    logger.info(f"[ANALYSIS] beta curve 시작: ks={usable}, runs={runs}, cells={len(cells)}")
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        outcomes = list(
            pool.map(lambda cell: _curve_cell(ds, cell[0], cell[1], lloyd_iters, rng_seed), cells)
        )

    by_k: dict[int, list[dict]] = {k: [] for k in usable}
    for (k, _), outcome in zip(cells, outcomes):
        by_k[k].append(outcome)

    curve = []
    for k in usable:
        rows = by_k[k]
        if aggregate == "best":
            chosen = min(rows, key=lambda row: row["cost"])
        else:
            chosen = {key: float(np.mean([row[key] for row in rows])) for key in rows[0]}
        curve.append(BetaCurvePoint(k=k, runs=len(rows), **chosen))
    return curve


def curve_fits(curve: list[BetaCurvePoint]) -> tuple[PowerLawFit, PowerLawFit]:
    ks = [p.k for p in curve]
    return fit_power_law(ks, [p.beta for p in curve]), fit_power_law(
        ks, [p.eta_centers for p in curve]
    )


def noise_sweep(
    ds: Dataset,
    ks: Iterable[int],
    runs: int,
    levels: Sequence[float] = DEFAULT_NOISE_LEVELS,
    lloyd_iters: int = 20,
    rng_seed: int = 0,
    threads: int | None = None,
) -> list[NoiseLevelPoint]:
    """NSR 수준마다 노이즈를 주입하고 beta_k 지수를 다시 적합한다."""
    ks = list(ks)
    sweep = []
    for level in levels:
        noisy = inject_noise(ds, float(level), rng_seed)
        curve = beta_curve(noisy, ks, runs, lloyd_iters, rng_seed, threads=threads)
        fit = fit_power_law([p.k for p in curve], [p.beta for p in curve])
        logger.info(f"[ANALYSIS] noise nsr={level:.3f}: eps_hat={fit.slope:.4f}")
        sweep.append(
            NoiseLevelPoint(
                nsr=float(level), eps_hat=fit.slope, r_squared=fit.r_squared, curve=curve
            )
        )
    return sweep


def intrinsic_dim_from_slope(eps_hat: float) -> float:
    """d = 2 / eps"""
    return math.inf if eps_hat <= 0 else 2.0 / eps_hat
