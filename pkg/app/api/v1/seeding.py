import logging

from fastapi import APIRouter, status
from starlette.concurrency import run_in_threadpool

from app.core.settings import settings
from app.domain.seeding.schemas import SeedingRequest, SeedingResult
from app.domain.seeding.services import seed_points_service

logger = logging.getLogger(__name__)

seeding_router = APIRouter(prefix=f"{settings.API_PREFIX}/seeding", tags=["Seeding"])


@seeding_router.post(
    "/",
    status_code=status.HTTP_200_OK,
    response_model=SeedingResult,
    summary="k 개 중심 시딩",
    description="""
`422` `code`:`invalid_cluster_count` k 는 1 이상 n 이하여야 합니다.\n
`422` `code`:`invalid_chain_length` m 은 1 이상의 정수 또는 inf 여야 합니다.\n
`422` `code`:`invalid_rho` rho 는 (0, 1] 범위여야 합니다.\n
`422` `code`:`invalid_delta` delta 는 [0, 0.5) 범위여야 합니다.\n
""",
)
async def seed_centers(request: SeedingRequest):
    logger.info(f"[API] 시딩 요청: algo={request.algo.value}, k={request.k}, n={len(request.points)}")
    return await run_in_threadpool(seed_points_service, request)
