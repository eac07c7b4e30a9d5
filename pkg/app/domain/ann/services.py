import logging
import math

from app.core.settings import settings
from app.domain.ann.models import AnnIndex, ExactAnnIndex, LshAnnIndex
from app.domain.ann.schemas import AnnBackend
from app.domain.services.verification import check_condition
from app.exceptions.ann_exceptions import InvalidRhoException, UnknownAnnBackendException

logger = logging.getLogger(__name__)


def init_index(
    backend: AnnBackend | str, rho: float, rng_seed: int = 0, certify: bool | None = None
) -> AnnIndex:
    """Init(L, rho). exact 백엔드는 rho 를 1 로 고정한다.

    certify 가 None 이면 settings.LSH_CERTIFY 를 따른다.
    """
    try:
        backend = AnnBackend(backend)
    except ValueError:
        raise UnknownAnnBackendException(str(backend))

    if backend == AnnBackend.EXACT:
        return ExactAnnIndex()

    check_condition(math.isfinite(rho) and 0.0 < rho <= 1.0, InvalidRhoException)
    index = LshAnnIndex(
        rho=rho,
        rng_seed=rng_seed,
        failure_inverse=settings.LSH_FAILURE_INVERSE,
        certify=settings.LSH_CERTIFY if certify is None else certify,
    )
    logger.debug(
        f"[ANN] LSH 초기화: tables={index.tables}, width={index.width}, certify={index.certify}"
    )
    return index
