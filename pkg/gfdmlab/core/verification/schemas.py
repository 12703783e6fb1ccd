from pydantic import BaseModel

from gfdmlab.common.enums import VerificationSuite


class SignReport(BaseModel):
    rows_total: int
    rows_dd: int
    violation_indices: list[int]
    zero_diagonal_indices: list[int] = []

    @property
    def passed(self) -> bool:
        return not self.violation_indices

    @property
    def violation_fraction(self) -> float:
        return len(self.violation_indices) / self.rows_total if self.rows_total else 0.0


class CheckResult(BaseModel):
    """One line of a verification report.

    Per-level entries carry ``h`` and ``residual``; order entries carry
    ``slope`` and a ``threshold``.  ``passed`` is ``None`` for entries that are
    reported without an assertion.
    """

    check: str
    param: str = ""
    h: float | None = None
    residual: float | None = None
    slope: float | None = None
    threshold: float | None = None
    passed: bool | None = None
    note: str | None = None


class VerificationReport(BaseModel):
    suite: VerificationSuite
    seed: int
    h_list: list[float]
    results: list[CheckResult] = []

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.passed is False]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def asserted(self) -> int:
        return sum(1 for r in self.results if r.passed is not None)
