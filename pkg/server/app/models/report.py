"""
Data models for the validation report
"""
from enum import Enum
from pydantic import BaseModel
from typing import List, Optional


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


class CheckResult(BaseModel):
    """Outcome of one named invariant check"""
    check_name: str
    status: CheckStatus
    measured: Optional[float] = None
    tolerance: Optional[float] = None
    detail: Optional[str] = None


class ValidationReport(BaseModel):
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.status == CheckStatus.PASS for check in self.checks)

    def failures(self) -> List[str]:
        return [check.check_name for check in self.checks if check.status != CheckStatus.PASS]
