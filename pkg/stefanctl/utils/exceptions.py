# stefanctl/utils/exceptions.py
from typing import Optional


class StefanError(Exception):
    exit_code: int = 1

    def __init__(self, error_code: str, message: str, debug_info: Optional[str] = None):
        self.error_code = error_code
        self.message = message
        self.debug_info = debug_info
        super().__init__(message)


class ConfigError(StefanError):
    exit_code = 2


class ValidationError(StefanError):
    exit_code = 3


class NumericalError(StefanError):
    exit_code = 4


class ConstraintViolation(NumericalError):
    """A model validity constraint broke during time stepping."""

    def __init__(self, error_code: str, message: str, time: float, debug_info: Optional[str] = None):
        self.time = time
        super().__init__(error_code, message, debug_info)
