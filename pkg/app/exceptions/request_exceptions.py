from app.exceptions.base_exceptions import CustomException


class InvalidArgumentException(CustomException):
    def __init__(self, detail: str):
        super().__init__(
            status_code=422, code="invalid_argument", error=f"잘못된 인자입니다: {detail}"
        )
