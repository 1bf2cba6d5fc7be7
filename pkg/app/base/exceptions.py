from typing import Optional


class InvalidParameterError(Exception):
    """Raised when a Gaussian parameter cannot be used (e.g. a zero quaternion)."""
    pass


class InvalidArgumentError(Exception):
    """Raised on shape or length mismatches between cooperating arrays."""
    pass


class ConfigError(Exception):
    """Raised for unknown config keys or values that fail validation."""
    pass


class SceneManifestError(Exception):
    """Raised when a camera manifest is malformed or references bad images."""
    pass


class PlyParseError(Exception):
    """Custom exception for PLY parsing failures, carrying the byte offset."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


class NonFiniteError(Exception):
    """Raised when a loss or gradient contains NaN/Inf."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class VerificationError(Exception):
    """Raised when a verification suite fails its tolerances."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
