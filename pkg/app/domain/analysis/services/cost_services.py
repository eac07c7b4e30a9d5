import logging
import math

import numpy as np
from scipy.spatial.distance import cdist, pdist

from app.core.settings import settings
from app.domain.analysis.schemas import GeomParams, GeomRequest
from app.domain.dataset.models import Dataset
from app.domain.services.verification import check_condition, check_existing
from app.exceptions.analysis_exceptions import (
    EmptyCentersException,
    EtaUndefinedException,
    NotNormalizedException,
)
from app.exceptions.dataset_exceptions import DimensionException

logger = logging.getLogger(__name__)


def _as_points(data) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.points
    return np.atleast_2d(np.asarray(data, dtype=np.float64))


def _as_centers(centers, dim: int) -> np.ndarray:
    check_existing(centers, EmptyCentersException)
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim == 1:
        centers = centers.reshape(-1, dim) if dim > 1 else centers.reshape(-1, 1)
    check_existing(centers, EmptyCentersException)
    if centers.shape[1] != dim:
        raise DimensionException(f"중심 차원 {centers.shape[1]} != 데이터 차원 {dim}")
    return centers


def assign(data, centers) -> tuple[np.ndarray, np.ndarray]:
    """가장 가까운 중심 (동률이면 낮은 순번) 과 그 제곱 거리"""
    points = _as_points(data)
    centers = _as_centers(centers, points.shape[1])
    n, k = points.shape[0], centers.shape[0]

    labels = np.empty(n, dtype=np.int64)
    min_sq = np.empty(n, dtype=np.float64)
    chunk = max(1, settings.COST_CHUNK_ELEMENTS // max(1, k * points.shape[1]))
    for start in range(0, n, chunk):
        block = points[start : start + chunk]
        diff = block[:, None, :] - centers[None, :, :]
        dist = np.sum(diff * diff, axis=2)
        labels[start : start + chunk] = np.argmin(dist, axis=1)
        min_sq[start : start + chunk] = np.min(dist, axis=1)
    return labels, min_sq


def cost(data, centers) -> float:
    """sum_x min_c ||x - c||^2"""
    _, min_sq = assign(data, centers)
    return float(np.sum(min_sq))


def lloyd(
    ds: Dataset, centers, max_iters: int, tol: float = 1e-6
) -> tuple[np.ndarray, list[float]]:
    points = ds.points
    centers = _as_centers(centers, ds.dim).copy()
    labels, min_sq = assign(points, centers)
    trace = [float(np.sum(min_sq))]

    for _ in range(max_iters):
        new_centers = np.empty_like(centers)
        contribution = min_sq.copy()
        for j in range(centers.shape[0]):
            members = labels == j
            if np.any(members):
                new_centers[j] = points[members].mean(axis=0)
            else:
                # 빈 클러스터는 현재 비용 기여가 가장 큰 점으로 재시드
                far = int(np.argmax(contribution))
                new_centers[j] = points[far]
                contribution[far] = -1.0

        if np.array_equal(new_centers, centers):
            break
        new_labels, new_min_sq = assign(points, new_centers)
        new_cost = float(np.sum(new_min_sq))
        prev_cost = trace[-1]
        if new_cost > prev_cost:
            break

        centers, labels, min_sq = new_centers, new_labels, new_min_sq
        trace.append(new_cost)
        if prev_cost <= 0 or (prev_cost - new_cost) / prev_cost < tol:
            break

    logger.debug(f"[ANALYSIS] Lloyd 종료: iters={len(trace) - 1}, cost={trace[-1]:.6g}")
    return centers, trace


def aspect_ratio(points: np.ndarray) -> float:
    """max pairwise / min pairwise 거리. 중복점이 있으면 inf."""
    if points.shape[0] < 2:
        raise EtaUndefinedException()
    if points.shape[0] <= 2048:
        dist = pdist(points)
        lo, hi = float(dist.min()), float(dist.max())
    else:
        lo, hi = math.inf, 0.0
        block = 1024
        for start in range(0, points.shape[0] - 1, block):
            d = cdist(points[start : start + block], points[start:])
            upper = np.arange(d.shape[1])[None, :] > np.arange(d.shape[0])[:, None]
            values = d[upper]
            if values.size:
                lo = min(lo, float(values.min()))
                hi = max(hi, float(values.max()))
    if lo == 0.0:
        return math.inf
    return hi / lo


def geom_params(
    ds: Dataset, centers, include_data: bool = False, rng_seed: int = 0
) -> GeomParams:
    centers = _as_centers(centers, ds.dim)
    if centers.shape[0] < 2:
        logger.warning("[CHECK] 중심이 1개라 eta 를 정의할 수 없음")
        raise EtaUndefinedException()

    opt1 = ds.frob_sq if ds.centered else cost(ds, ds.points.mean(axis=0, keepdims=True))
    current = cost(ds, centers)
    beta = math.inf if current == 0 else opt1 / current

    eta_data, subsampled = None, False
    if include_data:
        rows = ds.points
        if ds.n > settings.ETA_DATA_CAP:
            rng = np.random.default_rng(rng_seed)
            rows = rows[rng.choice(ds.n, settings.ETA_DATA_CAP, replace=False)]
            subsampled = True
            logger.info(f"[ANALYSIS] eta(X) 부분표본: {settings.ETA_DATA_CAP}/{ds.n}")
        eta_data = aspect_ratio(rows)

    return GeomParams(
        beta=beta,
        eta_centers=aspect_ratio(centers),
        eta_data=eta_data,
        eta_data_subsampled=subsampled,
    )


def max_renyi(mu, nu, atol: float = 1e-9) -> float:
    """D_inf(mu || nu) = max_{mu(x)>0} log(mu(x)/nu(x))"""
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    check_condition(mu.shape == nu.shape and mu.ndim == 1, NotNormalizedException)
    check_condition(
        abs(mu.sum() - 1.0) <= atol and abs(nu.sum() - 1.0) <= atol,
        NotNormalizedException,
    )
    check_condition(bool(np.all(mu >= 0) and np.all(nu >= 0)), NotNormalizedException)

    support = mu > 0
    if np.any(nu[support] == 0):
        return math.inf
    return float(np.max(np.log(mu[support] / nu[support])))


def geom_params_service(request: GeomRequest) -> GeomParams:
    return geom_params(Dataset(points=request.points), request.centers, request.include_data)
