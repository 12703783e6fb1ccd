import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from gfdmlab.common.enums import OperatorKind
from gfdmlab.common.exceptions import ParameterError, SingularStencilError
from gfdmlab.core.mls.assembly import (
    apply_gradient,
    build_derived_gradient,
    build_derived_interpolation,
    build_gradient,
    build_laplace,
    count_sign_violations,
    derive_matrix,
)
from gfdmlab.core.mls.basis import MonomialBasis, rhs_gradient, rhs_laplace
from gfdmlab.core.mls.io import save_operator
from gfdmlab.core.mls.rows import (
    correct_diagonal_dominance,
    derive_operator,
    derived_gradient,
    derived_interpolation,
    dominance_objective,
    optimal_alpha,
    satisfies_sign_condition,
    solve_mls_row,
    weight_vector,
    zero_functional_row,
)
from gfdmlab.core.mls.schemas import OperatorRow
from gfdmlab.core.pointcloud.schemas import LocalStencil
from gfdmlab.core.pointcloud.stencils import build_stencils


def _row_scale(operator) -> np.ndarray:
    return abs(operator.matrix) @ np.ones(operator.n_points)


def _local_rows(cloud, stencils, i, degree=2):
    stencil = stencils.local(i, cloud)
    weights = weight_vector(stencil.distances, stencil.radius)
    basis = MonomialBasis.of_degree(degree)
    row = solve_mls_row(stencil, weights, basis, rhs_laplace(basis))
    return stencil, basis, row, zero_functional_row(stencil, weights, basis)


# ---------- Basis ----------


def test_basis_is_graded_lexicographic():
    basis = MonomialBasis.of_degree(2)
    assert basis.multi_indices() == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert MonomialBasis.of_degree(4).size == 15
    assert rhs_laplace(basis).tolist() == [0, 0, 0, 2, 0, 2]
    assert rhs_gradient(basis, 2).tolist() == [0, 0, 1, 0, 0, 0]


def test_basis_rejects_unknown_multi_index():
    with pytest.raises(ParameterError):
        MonomialBasis.of_degree(2).index_of((3, 0))


# ---------- Single rows ----------


def test_three_point_row_is_the_classic_difference():
    # 1D second derivative on a line of three points
    points = np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    stencil = LocalStencil.from_points(points, center=1, radius=1.0)
    basis = MonomialBasis(degree=2, exponents=np.array([[0, 0], [1, 0], [2, 0]]))
    weights = weight_vector(stencil.distances, stencil.radius)
    row = solve_mls_row(stencil, weights, basis, np.array([0.0, 0.0, 2.0]))
    assert np.allclose(row.coefficients, [1.0, -2.0, 1.0])


def test_three_point_row_scales_with_spacing():
    h = 0.1
    points = np.array([[0.3, 0.5], [0.3 + h, 0.5], [0.3 + 2 * h, 0.5]])
    stencil = LocalStencil.from_points(points, center=1, radius=h)
    basis = MonomialBasis(degree=2, exponents=np.array([[0, 0], [1, 0], [2, 0]]))
    weights = weight_vector(stencil.distances, stencil.radius)
    row = solve_mls_row(stencil, weights, basis, np.array([0.0, 0.0, 2.0]))
    assert np.allclose(row.coefficients, np.array([1.0, -2.0, 1.0]) / h**2, rtol=1e-10)

    gradient = derived_gradient(row, 1)
    assert np.allclose(gradient.coefficients, [-0.5 / h, 0.0, 0.5 / h], rtol=1e-10, atol=1e-9)


def test_too_few_points_is_singular():
    points = np.array([[0.4, 0.4], [0.5, 0.5], [0.6, 0.4]])
    stencil = LocalStencil.from_points(points, center=1, radius=0.2)
    basis = MonomialBasis.of_degree(2)
    with pytest.raises(SingularStencilError) as exc_info:
        solve_mls_row(stencil, np.ones(3), basis, rhs_laplace(basis))
    assert exc_info.value.point_index == 1


def test_collinear_stencil_is_rank_deficient():
    points = np.column_stack([np.linspace(0.1, 0.9, 9), np.full(9, 0.5)])
    stencil = LocalStencil.from_points(points, center=4, radius=0.5)
    basis = MonomialBasis.of_degree(2)
    weights = weight_vector(stencil.distances, stencil.radius)
    with pytest.raises(SingularStencilError, match="rank-deficient"):
        solve_mls_row(stencil, weights, basis, rhs_laplace(basis))


def test_zero_functional_row_is_in_the_kernel(cloud, stencils):
    stencil, basis, _, zero_row = _local_rows(cloud, stencils, 40)
    constraints = basis.evaluate(stencil.offsets)
    assert zero_row.diagonal == pytest.approx(1.0)
    scale = np.abs(constraints) @ np.abs(zero_row.coefficients)
    assert np.all(np.abs(constraints @ zero_row.coefficients) <= 1e-9 * (scale + 1.0))


@pytest.mark.parametrize("i", [3, 57, 120, 201])
def test_optimal_alpha_minimizes_the_dominance_objective(cloud, stencils, i):
    _, _, row, zero_row = _local_rows(cloud, stencils, i)
    alpha = optimal_alpha(row, zero_row)
    best = dominance_objective(row, zero_row, alpha)
    step = 1e-3 * (abs(alpha) + abs(row.diagonal))
    assert best <= dominance_objective(row, zero_row, alpha + step) * (1 + 1e-12)
    assert best <= dominance_objective(row, zero_row, alpha - step) * (1 + 1e-12)
    assert best <= dominance_objective(row, zero_row, 0.0) * (1 + 1e-12)


def test_optimal_alpha_beats_a_golden_section_search_on_random_rows():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        size = int(rng.integers(6, 40))
        coefficients = rng.standard_normal(size)
        coefficients[0] = -(abs(rng.standard_normal()) + 0.5)
        zero = rng.standard_normal(size)
        zero[0] = 1.0
        offsets = np.zeros((size, 2))
        row = OperatorRow(center=0, indices=np.arange(size), coefficients=coefficients,
                          offsets=offsets)
        zero_row = row.with_coefficients(zero)

        # in t = 1 / (c_ii + alpha) the objective is 1 + sum_j (b_j + t (a_j - c_ii b_j))^2
        a, b, d = coefficients[1:], zero[1:], coefficients[0]
        search = minimize_scalar(
            lambda t: 1.0 + np.sum((b + t * (a - d * b)) ** 2),  # noqa: B023
            bracket=(-1.0, 1.0),
            method="golden",
            options={"xtol": 1e-12},
        )
        closed = dominance_objective(row, zero_row, optimal_alpha(row, zero_row))
        assert closed <= search.fun * (1.0 + 1e-9) + 1e-12


def test_dominance_correction_keeps_consistency(cloud, stencils):
    stencil, basis, row, zero_row = _local_rows(cloud, stencils, 90)
    corrected = correct_diagonal_dominance(row, zero_row)
    constraints = basis.evaluate(stencil.offsets)
    scale = np.abs(constraints) @ np.abs(corrected.coefficients)
    residual = constraints @ corrected.coefficients - rhs_laplace(basis)
    assert np.all(np.abs(residual) <= 1e-8 * (scale + 2.0))


def test_correction_needs_matching_stencils(cloud, stencils):
    _, _, row, _ = _local_rows(cloud, stencils, 10)
    _, _, _, other_zero = _local_rows(cloud, stencils, 11)
    with pytest.raises(ParameterError):
        correct_diagonal_dominance(row, other_zero)


def test_sign_condition_on_hand_rows():
    offsets = np.zeros((3, 2))
    good = OperatorRow(center=0, indices=np.array([0, 1, 2]), coefficients=np.array([-2.0, 1, 1]),
                       offsets=offsets)
    bad = good.with_coefficients(np.array([-2.0, 1.5, -0.1]))
    empty_diagonal = good.with_coefficients(np.array([0.0, 1.0, 1.0]))
    assert satisfies_sign_condition(good)
    assert not satisfies_sign_condition(bad)
    assert not satisfies_sign_condition(empty_diagonal)


def test_operator_row_rejects_non_finite_coefficients():
    with pytest.raises(ParameterError):
        OperatorRow(center=0, indices=np.array([0]), coefficients=np.array([np.nan]),
                    offsets=np.zeros((1, 2)))


# ---------- Assembled Laplacians ----------


@pytest.mark.parametrize("fixture_name", ["laplace2", "laplace2_plain", "laplace4"])
def test_laplace_reproduces_quadratics(request, cloud, fixture_name):
    laplace = request.getfixturevalue(fixture_name)
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    tolerance = 1e-8 * (_row_scale(laplace) + 1.0)
    assert np.all(np.abs(laplace.apply(np.ones(cloud.n_points))) <= tolerance)
    assert np.all(np.abs(laplace.apply(3.0 * x - y)) <= tolerance)
    assert np.all(np.abs(laplace.apply(x**2 + x * y + 2.0 * y**2) - 6.0) <= tolerance)


def test_fourth_order_laplace_reproduces_quartics(cloud, laplace4):
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    values = x**4 + x * y**3 + y**2
    target = 12.0 * x**2 + 6.0 * x * y + 2.0
    tolerance = 1e-8 * (_row_scale(laplace4) + np.abs(target))
    assert np.all(np.abs(laplace4.apply(values) - target) <= tolerance)


def test_laplace_metadata(laplace2, laplace4, stencils):
    assert laplace2.kind is OperatorKind.LAPLACE
    assert laplace2.dd_correction and not laplace4.dd_correction
    assert laplace4.degree == 4
    assert np.array_equal(laplace2.indptr, stencils.indptr)
    assert np.array_equal(laplace2.indices, stencils.indices)


def test_laplace_of_a_paraboloid_is_four(cloud, laplace2):
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    values = laplace2.apply(x**2 + y**2)
    assert np.allclose(values, 4.0, rtol=0.0, atol=1e-8 * (_row_scale(laplace2).max() + 1.0))


def test_operators_scale_with_the_cloud(cloud, laplace2_plain, laplace2):
    # halving the cloud is exact in binary, so stencils and weights are unchanged
    small = cloud.scaled(0.5)
    small_stencils = build_stencils(small)
    assert np.array_equal(small_stencils.indices, laplace2.indices)

    plain = build_laplace(small, small_stencils, 2, dd_correction=False)
    corrected = build_laplace(small, small_stencils, 2, dd_correction=True)
    assert np.allclose(plain.data, 4.0 * laplace2_plain.data, rtol=1e-12, atol=0.0)
    assert np.allclose(corrected.data, 4.0 * laplace2.data, rtol=1e-12, atol=1e-12)

    gradient = build_gradient(cloud, build_stencils(cloud))
    small_gradient = build_gradient(small, small_stencils)
    for large_part, small_part in zip(gradient, small_gradient):
        assert np.allclose(small_part.data, 2.0 * large_part.data, rtol=1e-12, atol=0.0)


def _dominance_ratio(operator) -> np.ndarray:
    squares = abs(operator.matrix.multiply(operator.matrix)) @ np.ones(operator.n_points)
    return squares / operator.diagonal() ** 2


def test_correction_lowers_the_dominance_ratio(laplace2, laplace2_plain):
    corrected = _dominance_ratio(laplace2)
    plain = _dominance_ratio(laplace2_plain)
    assert np.all(corrected <= plain * (1.0 + 1e-9))


def test_build_laplace_rejects_odd_order(cloud, stencils):
    with pytest.raises(ParameterError):
        build_laplace(cloud, stencils, order=3)


# ---------- Gradients and derived operators ----------


def test_gradient_reproduces_linear_fields(cloud, stencils):
    gradient = build_gradient(cloud, stencils)
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    values = apply_gradient(gradient, 2.0 * x - 5.0 * y + x * y)
    assert np.allclose(values[:, 0], 2.0 + y, atol=1e-8)
    assert np.allclose(values[:, 1], -5.0 + x, atol=1e-8)


def test_derived_matrix_matches_row_rule(laplace2):
    gx, _ = build_derived_gradient(laplace2)
    for i in (0, 33, 150):
        expected = derived_gradient(laplace2.row(i), 1)
        assert np.allclose(gx.row(i).coefficients, expected.coefficients)
        assert expected.diagonal == 0.0

    _, iy = build_derived_interpolation(laplace2)
    expected = derived_interpolation(laplace2.row(33), 2)
    assert np.allclose(iy.row(33).coefficients, expected.coefficients)
    with pytest.raises(ParameterError):
        derived_interpolation(laplace2.row(33), 3)


def test_derived_zero_order_has_row_sum_zero(laplace2):
    row = derive_operator(laplace2.row(12), (0, 0))
    assert row.coefficients.sum() == pytest.approx(0.0, abs=1e-9)
    matrix = derive_matrix(laplace2, (0, 0))
    assert np.allclose(matrix.apply(np.ones(matrix.n_points)), 0.0, atol=1e-9)


def test_derived_interpolation_of_constant_is_one(cloud, laplace4):
    ix, iy = build_derived_interpolation(laplace4)
    ones = np.ones(cloud.n_points)
    assert np.allclose(ix.apply(ones), 1.0, atol=1e-8)
    assert np.allclose(iy.apply(ones), 1.0, atol=1e-8)
    assert ix.kind is OperatorKind.DERIVED


def test_save_operator_writes_triplets(tmp_path, laplace2):
    path = tmp_path / "operator.csv"
    save_operator(laplace2, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "i,j,value"
    assert len(lines) == laplace2.matrix.nnz + 1
