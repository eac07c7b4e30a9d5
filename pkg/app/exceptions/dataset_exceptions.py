from app.exceptions.base_exceptions import CustomException


class DatasetFileNotFoundException(CustomException):
    def __init__(self, path: str):
        super().__init__(
            status_code=404,
            exit_code=3,
            code="dataset_not_found",
            error=f"데이터셋 파일을 찾을 수 없습니다: {path}",
        )


class DatasetParseException(CustomException):
    def __init__(self, detail: str, row: int | None = None):
        where = f" (row {row})" if row is not None else ""
        super().__init__(
            status_code=422,
            exit_code=3,
            code="dataset_parse_error",
            error=f"데이터셋 파싱 실패{where}: {detail}",
        )
        self.row = row


class EmptyDatasetException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422, exit_code=3, code="empty_dataset", error="데이터셋이 비어 있습니다."
        )


class NonFiniteValueException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="non_finite_value",
            error="NaN 또는 Inf 좌표는 허용되지 않습니다.",
        )


class DimensionException(CustomException):
    def __init__(self, detail: str):
        super().__init__(
            status_code=422, code="invalid_dimension", error=f"차원 오류: {detail}"
        )


class NotCenteredException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="dataset_not_centered",
            error="중심화(preprocess)된 데이터셋이 필요합니다.",
        )


class InvalidNoiseLevelException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422, code="invalid_noise_level", error="NSR 은 0 이상이어야 합니다."
        )


class InvalidJLParameterException(CustomException):
    def __init__(self):
        super().__init__(
            status_code=422,
            code="invalid_jl_parameter",
            error="eps_jl 은 (0, 0.25) 범위여야 합니다.",
        )
