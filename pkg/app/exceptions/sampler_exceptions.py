from app.exceptions.base_exceptions import CustomException


class NegativeWeightException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="negative_weight",
            error="가중치는 0 이상의 유한한 값이어야 합니다.",
        )


class DegenerateDistributionException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="degenerate_distribution",
            error="전체 가중치가 0 인 분포에서는 샘플링할 수 없습니다.",
        )


class TreeIndexOutOfRangeException(CustomException):
    def __init__(self, index: int, n: int):
        super().__init__(
            status_code=422,
            code="tree_index_out_of_range",
            error=f"인덱스 범위를 벗어났습니다: {index} (n={n})",
        )
