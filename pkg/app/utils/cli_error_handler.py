import logging
import sys
from functools import wraps
from app.base.exceptions import (
    ConfigError,
    InvalidArgumentError,
    InvalidParameterError,
    NonFiniteError,
    PlyParseError,
    SceneManifestError,
    VerificationError,
)
from app.constants.exit_codes import ExitCodes
from app.models.report_model import ReportEnvelope


class CatchCLIException:
    def __init__(self) -> None:
        pass

    EXIT_CODE_MAP = (
        (VerificationError, ExitCodes.VERIFICATION),
        (NonFiniteError, ExitCodes.VERIFICATION),
        (PlyParseError, ExitCodes.IO),
        (SceneManifestError, ExitCodes.IO),
        (OSError, ExitCodes.IO),
        (ConfigError, ExitCodes.USAGE),
        (InvalidArgumentError, ExitCodes.USAGE),
        (InvalidParameterError, ExitCodes.USAGE),
        (ValueError, ExitCodes.USAGE),
    )

    @classmethod
    def exit_code_for(cls, error: Exception) -> int:
        for error_type, code in cls.EXIT_CODE_MAP:
            if isinstance(error, error_type):
                return code
        return ExitCodes.IO

    def catch_cli_exceptions(self, command: str):
        """Turn a command handler's exceptions into an error envelope and exit code."""
        def decorator(func):
            @wraps(func)
            def wrapper(*args, **kwargs):
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    logging.error("Error in command {}: {}".format(command, e))
                    code = self.exit_code_for(e)
                    data = None
                    report = getattr(e, "report", None)
                    if report is not None:
                        data = report.model_dump(mode="json")
                    envelope = ReportEnvelope(
                        command=command,
                        message=str(e),
                        status=ReportEnvelope.FAILED,
                        exit_code=code,
                        error=type(e).__name__,
                        data=data,
                    )
                    sys.stdout.write(envelope.model_dump_json(indent=2) + "\n")
                    return code
            return wrapper
        return decorator
