import logging

from app.exceptions.dataset_exceptions import NotCenteredException
from app.exceptions.seeding_exceptions import InvalidClusterCountException

logger = logging.getLogger(__name__)


def check_existing(obj, exception_class, *args):
    if obj is None or (hasattr(obj, "__len__") and len(obj) == 0):
        logger.warning(f"[CHECK] 존재하지 않음: raise {exception_class.__name__}")
        raise exception_class(*args)


def check_condition(ok: bool, exception_class, *args):
    if not ok:
        logger.warning(f"[CHECK] 조건 불만족: raise {exception_class.__name__}")
        raise exception_class(*args)


def check_cluster_count(k: int, n: int):
    if not isinstance(k, int) or k < 1 or k > n:
        logger.warning(f"[CHECK] 잘못된 k: k={k}, n={n}")
        raise InvalidClusterCountException(k, n)


def check_centered(ds):
    if not ds.centered:
        logger.warning("[CHECK] 중심화되지 않은 데이터셋")
        raise NotCenteredException()

