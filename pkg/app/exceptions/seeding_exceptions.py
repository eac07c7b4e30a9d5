from app.exceptions.base_exceptions import CustomException


class InvalidClusterCountException(CustomException):
    def __init__(self, k: int, n: int):
        super().__init__(
            status_code=422,
            code="invalid_cluster_count",
            error=f"k 는 1 이상 n 이하여야 합니다: k={k}, n={n}",
        )


class InvalidChainLengthException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="invalid_chain_length",
            error="m 은 1 이상의 정수 또는 inf 여야 합니다.",
        )


class InvalidBoundException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422, code="invalid_bound", error="상한 M 은 1 이상이어야 합니다."
        )


class InvalidDeltaException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422, code="invalid_delta", error="delta 는 [0, 0.5) 범위여야 합니다."
        )


class UnknownAlgorithmException(CustomException):
    def __init__(self, algo: str):
        super().__init__(
            status_code=422,
            code="unknown_algorithm",
            error=f"알 수 없는 시딩 알고리즘입니다: {algo}",
        )
