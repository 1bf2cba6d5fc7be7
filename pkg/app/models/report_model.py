from app.constants.app_messages import AppMessages
from pydantic import BaseModel, Field
from typing import Any, Dict, Optional
from app.utils.get_current_timestamp import get_current_timestamp_str
from app.constants.exit_codes import ExitCodes


class ReportStatus:
    SUCCESS = 'SUCCESS'
    FAILED = 'FAILED'


class ReportEnvelope(BaseModel, ReportStatus):
    """Wrapper for every structured-text report the CLI emits."""

    command: str
    message: str = AppMessages.EXECUTED
    status: str = ReportStatus.SUCCESS
    exit_code: int = ExitCodes.SUCCESS
    timestamp: str = Field(default_factory=get_current_timestamp_str)
    config: Dict[str, Any] = Field(default_factory=dict)
    data: Any = None
    error: Optional[str] = None
    elapsed_seconds: Optional[float] = None
