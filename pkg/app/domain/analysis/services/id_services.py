import logging

import numpy as np
from sklearn.neighbors import NearestNeighbors

from app.domain.analysis.schemas import IntrinsicDimRequest, IntrinsicDimResponse
from app.domain.analysis.services.cost_services import _as_points
from app.exceptions.analysis_exceptions import (
    DegenerateEstimateException,
    InvalidNeighborCountException,
)

logger = logging.getLogger(__name__)


def mle_id(data, k_nn: int, subsample: int | None = None, rng_seed: int = 0) -> float:
    """Levina-Bickel MLE.

    d(x) = (k-1) / sum_{j<k} log(T_k(x) / T_j(x)) 의 평균.
    subsample 이 주어지면 그 행들만으로 k-NN 을 다시 구한다.
    """
    if k_nn < 2:
        raise InvalidNeighborCountException(f"k_nn={k_nn} (2 이상 필요)")
    points = _as_points(data)
    if subsample is not None and subsample < points.shape[0]:
        rng = np.random.default_rng(rng_seed)
        points = points[rng.choice(points.shape[0], subsample, replace=False)]
    if points.shape[0] <= k_nn:
        raise InvalidNeighborCountException(f"n={points.shape[0]} <= k_nn={k_nn}")

    # kneighbors() 는 자기 자신을 제외한다
    nbrs = NearestNeighbors(n_neighbors=k_nn, algorithm="brute").fit(points)
    distances, _ = nbrs.kneighbors()

    usable = np.all(distances > 0, axis=1)
    window = distances[usable]
    log_sums = np.sum(np.log(window[:, -1:] / window[:, :-1]), axis=1)
    positive = log_sums > 0
    if not np.any(positive):
        logger.warning("[CHECK] MLE-ID: 모든 점이 중복 또는 등거리")
        raise DegenerateEstimateException()

    skipped = points.shape[0] - int(np.sum(positive))
    if skipped:
        logger.debug(f"[ANALYSIS] MLE-ID: {skipped} 개 점 제외")
    return float(np.mean((k_nn - 1) / log_sums[positive]))


def intrinsic_dim_service(request: IntrinsicDimRequest) -> IntrinsicDimResponse:
    estimate = mle_id(request.points, request.k_nn, request.subsample, request.seed)
    return IntrinsicDimResponse(estimate=estimate, k_nn=request.k_nn, n=len(request.points))
