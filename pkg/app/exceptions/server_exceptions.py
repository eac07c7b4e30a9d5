from app.exceptions.base_exceptions import CustomException


class ValidationFailedException(CustomException):
    def __init__(self, failed: list[str]):
        super().__init__(
            status_code=500,
            exit_code=1,
            code="validation_failed",
            error=f"검증 실패: {', '.join(failed)}",
        )
        self.failed = failed


class OutputWriteException(CustomException):
    def __init__(self, path: str):
        super().__init__(
            status_code=500,
            exit_code=3,
            code="output_write_failed",
            error=f"결과 파일을 쓸 수 없습니다: {path}",
        )
