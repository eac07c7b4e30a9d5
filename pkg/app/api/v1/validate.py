import logging

from fastapi import APIRouter, Query, status
from starlette.concurrency import run_in_threadpool

from app.core.settings import settings
from app.domain.experiment.schemas import ValidationReport
from app.domain.experiment.validate_services import run_validation

logger = logging.getLogger(__name__)

validate_router = APIRouter(prefix=f"{settings.API_PREFIX}/validate", tags=["Validate"])


@validate_router.get(
    "/",
    status_code=status.HTTP_200_OK,
    response_model=ValidationReport,
    summary="불변식 검증 스위트 실행",
    description="각 검사의 통과 여부와 상세 값을 반환합니다. 실패가 있어도 200 입니다.",
)
async def validate_invariants(seed: int = Query(0, ge=0)):
    logger.info(f"[API] 검증 요청: seed={seed}")
    return await run_in_threadpool(run_validation, False, seed)
