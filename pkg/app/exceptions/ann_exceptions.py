from app.exceptions.base_exceptions import CustomException


class InvalidRhoException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422, code="invalid_rho", error="rho 는 (0, 1] 범위여야 합니다."
        )


class UnknownAnnBackendException(CustomException):
    def __init__(self, backend: str):
        super().__init__(
            status_code=422,
            code="unknown_ann_backend",
            error=f"알 수 없는 ANN 백엔드입니다: {backend}",
        )


class AnnDimensionMismatchException(CustomException):
    def __init__(self, expected: int, got: int):
        super().__init__(
            status_code=422,
            code="ann_dimension_mismatch",
            error=f"차원이 일치하지 않습니다: expected={expected}, got={got}",
        )


class EmptyAnnIndexException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=409,
            code="empty_ann_index",
            error="삽입된 중심이 없는 인덱스에는 질의할 수 없습니다.",
        )
