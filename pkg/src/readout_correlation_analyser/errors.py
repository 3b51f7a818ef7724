"""
Exception hierarchy and process exit codes.
"""

from typing import Optional


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class ReadoutAnalysisError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = EXIT_RUNTIME


class ValidationError(ReadoutAnalysisError, ValueError):
    """Input data violates a documented invariant or file format."""

    exit_code = EXIT_VALIDATION


class OracleTooLargeError(ValidationError):
    """Exact enumeration would exceed the configured guard."""

    def __init__(self, required_log2: int, limit_log2: int):
        self.required_log2 = required_log2
        self.limit_log2 = limit_log2
        super().__init__(
            f"oracle too large: enumeration requires 2^{required_log2} terms, "
            f"limit is 2^{limit_log2} (raise --max-enum to override)"
        )


class BackendError(ReadoutAnalysisError, RuntimeError):
    """A backend failed while producing counts for one preparation."""

    exit_code = EXIT_RUNTIME

    def __init__(self, label: str, cause: Optional[BaseException] = None):
        self.label = label
        message = f"backend failed for preparation '{label}'"
        if cause is not None:
            message += f": {cause}"
        super().__init__(message)
