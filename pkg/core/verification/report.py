"""
Check records and verification reports.
"""
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from loguru import logger

from config.settings import MAX_CHECK_INSTANCES, MAX_REPORTED_VIOLATIONS, REPORT_FORMAT, VERSION
from core.exceptions import FormalError, MaterializationError
from utils.helpers import to_jsonable


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


@dataclass
class CheckResult:
    """Outcome of one check, identified by the anchor id it verifies."""

    check_id: str
    description: str
    status: CheckStatus
    instances: int = 0
    violation_count: int = 0
    counterexamples: List[Dict[str, Any]] = field(default_factory=list)
    complete: bool = True
    notes: List[str] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status != CheckStatus.FAIL

    @property
    def failed(self) -> bool:
        return self.status == CheckStatus.FAIL

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "check_id": self.check_id,
            "description": self.description,
            "status": self.status.value,
            "instances": self.instances,
            "violation_count": self.violation_count,
            "counterexamples": to_jsonable(self.counterexamples),
            "complete": self.complete,
            "notes": list(self.notes),
        }
        if include_timing:
            data["elapsed_seconds"] = round(self.elapsed_seconds, 6)
        return data


class InstanceBudgetExceeded(Exception):
    pass


class CheckRecorder:
    """
    Context manager that accumulates instances and violations of one check.

    Features:
    - Counts enumerated instances against an instance budget
    - Keeps the first counterexamples and counts the rest
    - Turns a FormalError raised inside the block into a violation; MaterializationError propagates
    - Flags the result incomplete when the budget runs out
    """

    def __init__(
        self,
        check_id: str,
        description: str,
        max_instances: Optional[int] = None,
        max_violations: Optional[int] = None,
    ):
        self.check_id = check_id
        self.description = description
        self.max_instances = max_instances or MAX_CHECK_INSTANCES
        self.max_violations = max_violations or MAX_REPORTED_VIOLATIONS
        self.instances = 0
        self.violation_count = 0
        self.counterexamples: List[Dict[str, Any]] = []
        self.notes: List[str] = []
        self.complete = True
        self.skipped = False
        self._started = 0.0
        self._elapsed = 0.0

    def __enter__(self) -> "CheckRecorder":
        self._started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        self._elapsed = time.perf_counter() - self._started
        if exc_type is None:
            return False
        if issubclass(exc_type, InstanceBudgetExceeded):
            self.complete = False
            self.notes.append(f"instance budget of {self.max_instances} exhausted; verified on a partial enumeration")
            logger.warning(f"{self.check_id}: enumeration truncated at {self.instances} instances")
            return True
        if issubclass(exc_type, FormalError) and not issubclass(exc_type, MaterializationError):
            self.violation(f"raised {exc_type.__name__}: {exc}")
            return True
        return False

    def instance(self, count: int = 1) -> None:
        self.instances += count
        if self.instances > self.max_instances:
            raise InstanceBudgetExceeded(self.check_id)

    def violation(self, message: str, **payload: Any) -> None:
        self.violation_count += 1
        if len(self.counterexamples) < self.max_violations:
            entry = {"message": message}
            entry.update(payload)
            self.counterexamples.append(entry)

    def expect(self, condition: bool, message: str, **payload: Any) -> bool:
        if not condition:
            self.violation(message, **payload)
        return condition

    def note(self, text: str) -> None:
        self.notes.append(text)

    def skip(self, reason: str) -> None:
        self.skipped = True
        self.notes.append(reason)

    def result(self) -> CheckResult:
        if self.violation_count:
            status = CheckStatus.FAIL
        elif self.skipped:
            status = CheckStatus.SKIPPED
        else:
            status = CheckStatus.PASS
        return CheckResult(
            check_id=self.check_id,
            description=self.description,
            status=status,
            instances=self.instances,
            violation_count=self.violation_count,
            counterexamples=list(self.counterexamples),
            complete=self.complete,
            notes=list(self.notes),
            elapsed_seconds=self._elapsed,
        )


def skipped_result(check_id: str, description: str, reason: str) -> CheckResult:
    return CheckResult(check_id=check_id, description=description, status=CheckStatus.SKIPPED, notes=[reason])


def failed_result(check_id: str, description: str, message: str) -> CheckResult:
    return CheckResult(
        check_id=check_id,
        description=description,
        status=CheckStatus.FAIL,
        violation_count=1,
        counterexamples=[{"message": message}],
    )


@dataclass
class Report:
    """
    Ordered collection of check results for one fixture and suite selection.

    The order of ``results`` is the canonical suite order; rendering never reorders it.
    """

    fixture: str
    suite: str
    bounds: Dict[str, int] = field(default_factory=dict)
    results: List[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> None:
        self.results.append(result)

    def extend(self, results: Iterable[CheckResult]) -> None:
        self.results.extend(results)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def complete(self) -> bool:
        return all(result.complete for result in self.results)

    def failed_ids(self) -> List[str]:
        return [result.check_id for result in self.results if result.failed]

    def find(self, check_id: str) -> List[CheckResult]:
        return [result for result in self.results if result.check_id == check_id]

    def status_of(self, check_id: str) -> Optional[CheckStatus]:
        """Worst status among results carrying ``check_id``; None if absent."""
        matches = self.find(check_id)
        if not matches:
            return None
        if any(result.failed for result in matches):
            return CheckStatus.FAIL
        if all(result.status == CheckStatus.SKIPPED for result in matches):
            return CheckStatus.SKIPPED
        return CheckStatus.PASS

    def summary(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CheckStatus}
        for result in self.results:
            counts[result.status.value] += 1
        counts["total"] = len(self.results)
        counts["incomplete"] = sum(1 for result in self.results if not result.complete)
        return counts

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        metadata = {
            "format": REPORT_FORMAT,
            "version": VERSION,
            "fixture": self.fixture,
            "suite": self.suite,
            "bounds": dict(sorted(self.bounds.items())),
            "summary": self.summary(),
            "passed": self.passed,
        }
        if include_timing:
            metadata["generated_at"] = time.strftime("%Y-%m-%d %H:%M:%S")
        return {
            "metadata": metadata,
            "checks": [result.to_dict(include_timing=include_timing) for result in self.results],
        }
