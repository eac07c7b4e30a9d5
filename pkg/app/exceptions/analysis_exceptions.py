from app.exceptions.base_exceptions import CustomException


class EmptyCentersException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422, code="empty_centers", error="중심 집합이 비어 있습니다."
        )


class EtaUndefinedException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="eta_undefined",
            error="eta 는 2 개 이상의 중심에서만 정의됩니다.",
        )


class NotNormalizedException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="not_normalized",
            error="확률 분포의 합이 1 이 아닙니다.",
        )


class TooFewPointsException(CustomException):
    def __init__(self, required: int):
        super().__init__(
            status_code=422,
            code="too_few_points",
            error=f"회귀에는 최소 {required} 개의 점이 필요합니다.",
        )


class NonPositiveValueException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="non_positive_value",
            error="로그-로그 회귀 값은 모두 양수여야 합니다.",
        )


class InvalidNeighborCountException(CustomException):
    def __init__(self, detail: str):
        super().__init__(
            status_code=422,
            code="invalid_neighbor_count",
            error=f"이웃 수가 올바르지 않습니다: {detail}",
        )


class DegenerateEstimateException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="degenerate_estimate",
            error="모든 점이 중복되어 ID 를 추정할 수 없습니다.",
        )
