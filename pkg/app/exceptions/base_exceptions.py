class CustomException(Exception):
    def __init__(
        self, *, error: str, code: str, status_code: int = 400, exit_code: int = 2
    ):
        super().__init__(error)
        self.error = error
        self.code = code
        self.status_code = status_code
        self.exit_code = exit_code
