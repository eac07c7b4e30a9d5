import logging

from fastapi import APIRouter, status
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from app.core.settings import settings
from app.domain.analysis.schemas import (
    GeomParams,
    GeomRequest,
    IntrinsicDimRequest,
    IntrinsicDimResponse,
    PowerLawFit,
    PowerLawRequest,
)
from app.domain.analysis.services.cost_services import geom_params_service
from app.domain.analysis.services.id_services import intrinsic_dim_service
from app.domain.analysis.services.scaling_services import fit_power_law
from app.domain.experiment.repository import to_jsonable

logger = logging.getLogger(__name__)

analysis_router = APIRouter(prefix=f"{settings.API_PREFIX}/analysis", tags=["Analysis"])


@analysis_router.post(
    "/geom/",
    status_code=status.HTTP_200_OK,
    response_model=GeomParams,
    summary="beta / eta 계산",
    description="""
무한대 값 (cost 0, 중복 중심) 은 `null` 로 반환합니다.\n
`422` `code`:`empty_centers` 중심 집합이 비어 있습니다.\n
`422` `code`:`eta_undefined` eta 는 2 개 이상의 중심에서만 정의됩니다.\n
""",
)
async def compute_geom_params(request: GeomRequest):
    logger.info(f"[API] geom 요청: n={len(request.points)}, k={len(request.centers)}")
    params = await run_in_threadpool(geom_params_service, request)
    return JSONResponse(content=to_jsonable(params))


@analysis_router.post(
    "/power-law/",
    status_code=status.HTTP_200_OK,
    response_model=PowerLawFit,
    summary="로그-로그 멱법칙 회귀",
    description="""
`422` `code`:`too_few_points` 회귀에는 최소 3 개의 점이 필요합니다.\n
`422` `code`:`non_positive_value` 로그-로그 회귀 값은 모두 양수여야 합니다.\n
""",
)
async def compute_power_law(request: PowerLawRequest):
    logger.info(f"[API] power-law 요청: points={len(request.ks)}")
    return fit_power_law(request.ks, request.values)


@analysis_router.post(
    "/intrinsic-dim/",
    status_code=status.HTTP_200_OK,
    response_model=IntrinsicDimResponse,
    summary="MLE 내재 차원 추정",
    description="""
`422` `code`:`invalid_neighbor_count` 이웃 수가 올바르지 않습니다.\n
`422` `code`:`degenerate_estimate` 모든 점이 중복되어 ID 를 추정할 수 없습니다.\n
""",
)
async def estimate_intrinsic_dim(request: IntrinsicDimRequest):
    logger.info(f"[API] MLE-ID 요청: n={len(request.points)}, k_nn={request.k_nn}")
    return await run_in_threadpool(intrinsic_dim_service, request)
