"""Structured pass/fail results shared by the CLI, the suites and the dashboard."""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import wraps

from superalgebra import SuperPolynomial

logger = logging.getLogger(__name__)


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass
class VerificationReport:
    """Outcome of one identity check; pass iff the residual is absent or zero"""
    check_id: str
    status: CheckStatus
    residual: str = "0"
    timing_ms: float = 0.0
    inputs: dict = field(default_factory=dict)
    failed_conditions: list = field(default_factory=list)
    output: str = None

    @property
    def passed(self):
        return self.status is CheckStatus.PASS

    @classmethod
    def from_residuals(cls, check_id, residuals, inputs=None, output=None):
        """Build a report from named residual polynomials; every one must vanish"""
        failed = [(name, poly) for name, poly in residuals.items() if not _is_zero(poly)]
        if failed:
            residual = "; ".join(f"{name}: {_text(poly)}" for name, poly in failed)
            status = CheckStatus.FAIL
        else:
            residual = "0"
            status = CheckStatus.PASS
        report = cls(
            check_id=check_id,
            status=status,
            residual=residual,
            inputs=dict(inputs or {}),
            failed_conditions=[name for name, _ in failed],
            output=output,
        )
        logger.info("%s %s", "✅" if report.passed else "❌", check_id)
        return report

    @classmethod
    def from_identity(cls, check_id, lhs, rhs, inputs=None, output=None):
        return cls.from_residuals(check_id, {"lhs-rhs": lhs - rhs}, inputs, output)

    def expect_failure(self, check_id=None):
        """Turn an observed failure into a passing negative control"""
        observed = ", ".join(self.failed_conditions) or "none"
        return VerificationReport(
            check_id=check_id or f"{self.check_id}.expected_fail",
            status=CheckStatus.FAIL if self.passed else CheckStatus.PASS,
            residual="0" if not self.passed else "expected a failure, all conditions held",
            timing_ms=self.timing_ms,
            inputs=dict(self.inputs),
            failed_conditions=[] if not self.passed else ["expected_failure"],
            output=f"observed failures: {observed}; {self.residual}",
        )

    def to_dict(self, include_timing=True):
        data = asdict(self)
        data["status"] = self.status.value
        if include_timing:
            data["timing_ms"] = round(self.timing_ms, 3)
        else:
            data.pop("timing_ms")
        return data

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), ensure_ascii=False, sort_keys=False)


def _is_zero(value):
    if isinstance(value, SuperPolynomial):
        return value.is_zero
    return value == 0


def _text(value):
    if isinstance(value, SuperPolynomial):
        return value.to_text()
    return "condition violated"


def condition(holds):
    """Boolean condition as a residual: zero when it holds"""
    return 0 if holds else 1


def timed(func):
    """Record wall time of a report-producing function in timing_ms"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        report = func(*args, **kwargs)
        if not report.timing_ms:
            report.timing_ms = (time.perf_counter() - start) * 1000
        return report
    return wrapper


class Stopwatch:
    """Times reports built one after another by the interval since the previous lap"""

    def __init__(self, clock=time.perf_counter):
        self._clock = clock
        self._last = clock()

    def lap(self, report):
        now = self._clock()
        if not report.timing_ms:
            report.timing_ms = (now - self._last) * 1000
        self._last = now
        return report


def sort_reports(reports):
    return sorted(reports, key=lambda report: report.check_id)


def reports_to_jsonl(reports, include_timing=True):
    return "\n".join(report.to_json(include_timing) for report in reports) + ("\n" if reports else "")
