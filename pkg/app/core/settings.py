import os
from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings

ENV = os.getenv("ENV", "dev")
TESTING = os.getenv("TESTING", "false").lower() == "true"


def get_env_path():
    base_path = Path(__file__).resolve().parent.parent.parent / ".envs"
    if TESTING:
        return base_path / ".test.env"
    return base_path / f".{ENV}.env"


class Settings(BaseSettings):
    ENV: str = "dev"
    LOG_LEVEL: str = "INFO"

    # 0 이면 os.cpu_count() 사용
    DEFAULT_THREADS: int = 0

    # eta(X) 계산 시 O(n^2) 상한
    ETA_DATA_CAP: int = 20_000

    # LSH 테이블 수 / 시그니처 폭 공식의 t
    LSH_FAILURE_INVERSE: int = 1000

    # True 이면 LSH 질의마다 rho 계약을 하한 투영으로 확인한다
    LSH_CERTIFY: bool = False

    # 거리 계산 청크 크기 (원소 수)
    COST_CHUNK_ELEMENTS: int = 4_000_000

    # m = inf 일 때 cost(X,C) = 0 재확인 주기
    DEGENERATE_CHECK_EVERY: int = 4096

    API_PREFIX: str = "/api"

    class Config:
        env_file = get_env_path()
        env_prefix = "QKM_"
        extra = "ignore"


# 테스트용 설정 클래스
class TestSettings(BaseSettings):
    ENV: str = "test"
    LOG_LEVEL: str = "WARNING"
    DEFAULT_THREADS: int = 2
    ETA_DATA_CAP: int = 2_000
    LSH_FAILURE_INVERSE: int = 1000
    LSH_CERTIFY: bool = False
    COST_CHUNK_ELEMENTS: int = 1_000_000
    DEGENERATE_CHECK_EVERY: int = 512
    API_PREFIX: str = "/api"

    class Config:
        env_file = None  # 환경 파일 사용하지 않음
        extra = "ignore"


@lru_cache()
def get_settings():
    """설정을 가져오는 함수"""
    if TESTING:
        return TestSettings()
    return Settings()


settings = get_settings()


def resolve_threads(threads: int | None = None) -> int:
    requested = threads if threads is not None else settings.DEFAULT_THREADS
    if requested and requested > 0:
        return requested
    return os.cpu_count() or 1
