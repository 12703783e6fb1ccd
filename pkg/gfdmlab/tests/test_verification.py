import numpy as np
import pytest
from scipy import sparse

from gfdmlab.common.enums import VerificationSuite
from gfdmlab.core.mls.basis import MonomialBasis
from gfdmlab.core.verification.consistency import check_consistency_suite, laplace_builder
from gfdmlab.core.verification.derived import check_derived_operator_orders
from gfdmlab.core.verification.enrichment import check_enrichment_suite, midpoint_results
from gfdmlab.core.verification.orders import (
    EXACT_TOLERANCE,
    RefinementLevel,
    exact_results,
    fit_slope,
    order_results,
)
from gfdmlab.core.verification.report import (
    REPORT_HEADER,
    render_report,
    run_verification,
    write_report,
)
from gfdmlab.core.verification.schemas import CheckResult, VerificationReport
from gfdmlab.core.verification.signs import check_sign_conditions, check_sign_suite
from gfdmlab.tests.conftest import make_grid_cloud

COARSE = (0.25, 0.2)


@pytest.fixture(scope="module")
def levels():
    # N = 25 and N = 81 give spacings 1/5 and 1/9
    return [
        RefinementLevel(h=0.2, cloud=make_grid_cloud(5, 0.3), stencils=None),
        RefinementLevel(h=0.1, cloud=make_grid_cloud(9, 0.3), stencils=None),
    ]


# ---------- Order plumbing ----------


def test_fit_slope():
    assert fit_slope([0.1, 0.05], [1e-2, 2.5e-3]) == pytest.approx(2.0)
    assert fit_slope([0.1, 0.05], [1e-2, 0.0]) is None


def test_order_results_assert_the_slope(levels):
    residuals = [0.04, 0.04 * (5.0 / 9.0) ** 2]
    results = order_results("demo", "x", levels, residuals, 1.5)
    assert [r.h for r in results[:2]] == [0.2, 0.1]
    slope_entry = results[-1]
    assert slope_entry.slope == pytest.approx(2.0)
    assert slope_entry.passed is True

    failing = order_results("demo", "x", levels, residuals, 2.5)[-1]
    assert failing.passed is False


def test_order_results_special_cases(levels):
    vanishing = order_results("demo", "x", levels, [1e-15, 1e-16], 1.5)[-1]
    assert vanishing.passed is True and "round-off" in vanishing.note
    reported = order_results("demo", "x", levels, [0.1, 0.05], None)[-1]
    assert reported.passed is None
    single = order_results("demo", "x", levels[:1], [0.1], 1.5)[-1]
    assert single.passed is False


def test_exact_results_use_the_shared_tolerance(levels):
    results = exact_results("demo", "x", levels, [1e-12, 1e-3])
    assert [r.passed for r in results] == [True, False]
    assert all(r.threshold == EXACT_TOLERANCE for r in results)


def test_report_properties():
    report = VerificationReport(
        suite=VerificationSuite.SIGNS,
        seed=1,
        h_list=[0.1],
        results=[
            CheckResult(check="a", passed=True),
            CheckResult(check="b", passed=None),
            CheckResult(check="c", passed=False),
        ],
    )
    assert report.asserted == 2
    assert [r.check for r in report.failures] == ["c"]
    assert not report.passed


# ---------- Sign audits ----------


def test_sign_conditions_on_a_hand_matrix():
    # row 2 has an empty diagonal, row 3 a neighbor with the diagonal's sign
    dense = np.array(
        [
            [-2.0, 1.0, 0.0, 0.0],
            [1.0, -2.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, -1.0],
        ]
    )
    matrix = sparse.csr_matrix(dense)
    report = check_sign_conditions(matrix)
    assert report.violation_indices == [2, 3]
    assert report.zero_diagonal_indices == [2]
    assert report.rows_dd == 2
    assert report.violation_fraction == pytest.approx(0.5)
    masked = check_sign_conditions(matrix, mask=np.array([True, True, False, False]))
    assert masked.passed and masked.rows_total == 2


def test_sign_conditions_accept_operator_matrices(cloud, laplace2):
    report = check_sign_conditions(laplace2, cloud.interior)
    assert report.rows_total == int(cloud.interior.sum())
    assert 0.0 <= report.violation_fraction <= 1.0


def test_sign_suite_passes_on_a_coarse_cloud():
    report = check_sign_suite(h_list=[0.25], seed=4)
    assert report.passed
    checks = {r.check for r in report.results}
    assert "signs.fvm_laplace" in checks
    assert "signs.ddo_inherits_laplace2_dd" in checks
    # MLS Laplace fractions are reported, not asserted
    laplace_rows = [r for r in report.results if r.check == "signs.laplace4_plain"]
    assert laplace_rows and all(r.passed is None for r in laplace_rows)


# ---------- Consistency ----------


def test_custom_builder_reproduces_its_basis():
    report = check_consistency_suite(
        operator_builder=laplace_builder(4), basis=MonomialBasis.of_degree(4), h_list=COARSE, seed=4
    )
    assert report.passed
    assert report.asserted == 15 * len(COARSE)


def test_custom_builder_fails_beyond_its_degree():
    report = check_consistency_suite(
        operator_builder=laplace_builder(2), basis=MonomialBasis.of_degree(3), h_list=COARSE, seed=4
    )
    failed = {r.param for r in report.failures}
    assert "alpha=(3,0)" in failed
    assert "alpha=(2,0)" not in failed


def test_midpoint_orders_reach_their_claims():
    results = midpoint_results(seed=0)
    orders = {r.check: r for r in results if r.param == "order"}
    assert len(orders) == 6
    assert all(r.passed for r in orders.values())
    assert orders["enrichment.midpoint_gr"].slope > orders["enrichment.midpoint_am"].slope


# ---------- Reports ----------


def test_report_files(tmp_path):
    report = run_verification("signs", seed=4, h_list=[0.25])
    text_path, text = write_report(report, tmp_path / "report.csv")
    lines = (tmp_path / "report.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(REPORT_HEADER)
    assert len(lines) == len(report.results) + 1
    assert text_path == tmp_path / "report.txt"
    assert text_path.read_text(encoding="utf-8") == text
    assert "status=PASS" in text
    assert "[signs.fvm_laplace]" in text


def test_rendered_report_lists_failures():
    report = VerificationReport(
        suite=VerificationSuite.DERIVED,
        seed=0,
        h_list=[0.1],
        results=[
            CheckResult(
                check="derived.order2", param="gradient", slope=0.1, threshold=0.5, passed=False
            )
        ],
    )
    text = render_report(report)
    assert "status=FAIL" in text
    assert "Failed checks:" in text
    assert "derived.order2 gradient" in text


# ---------- Full suites ----------


@pytest.mark.slow
def test_consistency_suite_passes():
    assert check_consistency_suite().passed


@pytest.mark.slow
def test_derived_suite_passes():
    assert check_derived_operator_orders().passed


@pytest.mark.slow
def test_enrichment_suite_passes():
    assert check_enrichment_suite().passed


@pytest.mark.slow
def test_all_suites_merge_into_one_report():
    report = run_verification("all")
    assert report.suite is VerificationSuite.ALL
    prefixes = {r.check.split(".")[0] for r in report.results}
    assert prefixes == {"consistency", "signs", "derived", "enrichment"}
