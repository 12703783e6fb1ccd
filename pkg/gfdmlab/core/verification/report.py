"""Suite dispatch and report output (CSV plus rendered text)."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from pathlib import Path

from gfdmlab.common.enums import VerificationSuite
from gfdmlab.common.logging import get_logger
from gfdmlab.common.rendering import render
from gfdmlab.config import settings
from gfdmlab.core.pointcloud.io import format_float
from gfdmlab.core.verification.consistency import check_consistency_suite
from gfdmlab.core.verification.derived import check_derived_operator_orders
from gfdmlab.core.verification.enrichment import check_enrichment_suite
from gfdmlab.core.verification.schemas import CheckResult, VerificationReport
from gfdmlab.core.verification.signs import check_sign_suite

logger = get_logger("verification.report")

REPORT_HEADER = ("check", "param", "h", "residual", "slope", "pass")

SUITES = {
    VerificationSuite.CONSISTENCY: lambda hs, seed: check_consistency_suite(h_list=hs, seed=seed),
    VerificationSuite.SIGNS: check_sign_suite,
    VerificationSuite.DERIVED: check_derived_operator_orders,
    VerificationSuite.ENRICHMENT: check_enrichment_suite,
}


def run_verification(
    suite: VerificationSuite | str,
    seed: int | None = None,
    h_list: Sequence[float] | None = None,
) -> VerificationReport:
    """Run one suite, or every suite merged into a single report for ``all``."""
    suite = VerificationSuite(suite)
    seed = settings.DEFAULT_SEED if seed is None else seed
    hs = list(settings.VERIFY_H_LIST if h_list is None else h_list)
    selected = list(SUITES) if suite is VerificationSuite.ALL else [suite]

    merged = VerificationReport(suite=suite, seed=seed, h_list=hs)
    for name in selected:
        logger.info("Running verification suite | suite=%s | seed=%d", name.value, seed)
        merged.results.extend(SUITES[name](hs, seed).results)
    logger.info(
        "Verification finished | suite=%s | asserted=%d | failures=%d",
        suite.value,
        merged.asserted,
        len(merged.failures),
    )
    return merged


def _cell(value: float | None) -> str:
    return "" if value is None else format_float(value)


def report_record(result: CheckResult) -> list[str]:
    passed = "" if result.passed is None else str(result.passed).lower()
    return [
        result.check,
        result.param,
        _cell(result.h),
        _cell(result.residual),
        _cell(result.slope),
        passed,
    ]


def write_report_csv(report: VerificationReport, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for result in report.results:
            writer.writerow(report_record(result))


def render_report(report: VerificationReport) -> str:
    groups: dict[str, list[CheckResult]] = {}
    for result in report.results:
        groups.setdefault(result.check, []).append(result)
    return render("verification_report.txt.j2", report=report, groups=list(groups.items()))


def write_report(report: VerificationReport, path: str | Path) -> tuple[Path, str]:
    """CSV at ``path``, rendered text beside it with a ``.txt`` suffix."""
    csv_path = Path(path)
    write_report_csv(report, csv_path)
    text = render_report(report)
    text_path = csv_path.with_suffix(".txt")
    if text_path == csv_path:
        text_path = csv_path.with_name(csv_path.name + ".report.txt")
    text_path.write_text(text, encoding="utf-8")
    return text_path, text
