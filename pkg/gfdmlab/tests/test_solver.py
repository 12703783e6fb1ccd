import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from scipy import sparse

from gfdmlab.common.enums import OperatorKind
from gfdmlab.common.exceptions import NormError, ParameterError
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import define_test_case
from gfdmlab.core.diffusion.field import sample_field
from gfdmlab.core.diffusion.fvm import build_fvm_diffusion
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.solver.elliptic import solve_poisson
from gfdmlab.core.solver.io import save_solution
from gfdmlab.core.solver.linear import apply_dirichlet, relative_residual, solve_sparse
from gfdmlab.core.solver.norms import (
    discrete_l2_error,
    maximum_principle_check,
    weighted_l2_norm,
)
from gfdmlab.core.solver.parabolic import cfl_dt, cfl_steps, solve_heat, step_trapezoidal
from gfdmlab.core.solver.schemas import LinearSystem
from gfdmlab.core.voronoi.diagram import compute_voronoi, norm_weights


def _bubble(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return x * (1.0 - x) * y * (1.0 - y)


def _bubble_source(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return 2.0 * y * (1.0 - y) + 2.0 * x * (1.0 - x)


@pytest.fixture(scope="module")
def fvm_operator(cloud, exp_field):
    return build_fvm_diffusion(compute_voronoi(cloud), cloud, exp_field, "hm")


# ---------- Linear systems ----------


def test_linear_system_rejects_shape_mismatch():
    with pytest.raises(ParameterError):
        LinearSystem(matrix=sparse.identity(3, format="csr"), rhs=np.ones(2))


def test_linear_system_rejects_empty_rows():
    matrix = sparse.csr_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(ParameterError, match="row 1"):
        LinearSystem(matrix=matrix, rhs=np.ones(2))


def test_apply_dirichlet_pins_boundary_rows():
    matrix = sparse.csr_matrix(np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]))
    system = apply_dirichlet(
        LinearSystem(matrix=matrix, rhs=np.array([5.0, 1.0, 5.0])), np.array([True, False, True])
    )
    dense = system.matrix.toarray()
    assert dense[0].tolist() == [1.0, 0.0, 0.0]
    assert dense[1].tolist() == [-1.0, 2.0, -1.0]
    assert system.rhs.tolist() == [0.0, 1.0, 0.0]


def test_solve_sparse_reaches_tolerance():
    n = 50
    matrix = sparse.diags([-1.0, 2.5, -1.0], [-1, 0, 1], shape=(n, n), format="csr")
    system = LinearSystem(matrix=matrix, rhs=np.linspace(1.0, 2.0, n))
    x = solve_sparse(system)
    assert relative_residual(system, x) <= 1e-9


def test_solve_sparse_agrees_with_a_dense_solve():
    rng = np.random.default_rng(50)
    n = 50
    dense = rng.uniform(-1.0, 1.0, size=(n, n)) * (rng.random((n, n)) < 0.2)
    np.fill_diagonal(dense, 0.0)
    np.fill_diagonal(dense, 2.0 * np.abs(dense).sum(axis=1) + 1.0)
    system = LinearSystem(matrix=sparse.csr_matrix(dense), rhs=rng.standard_normal(n))
    expected = scipy.linalg.solve(dense, system.rhs)
    x = solve_sparse(system)
    assert np.linalg.norm(x - expected) <= 1e-8 * np.linalg.norm(expected)


def test_zero_rhs_gives_zero_solution():
    system = LinearSystem(matrix=sparse.identity(4, format="csr"), rhs=np.zeros(4))
    assert not solve_sparse(system).any()


# ---------- Elliptic ----------


def test_fourth_order_poisson_is_exact_on_a_quartic(cloud, laplace4):
    u = solve_poisson(laplace4, _bubble_source(cloud.points), cloud.is_boundary)
    assert np.all(u[cloud.is_boundary] == 0.0)
    assert np.allclose(u, _bubble(cloud.points), atol=1e-6)


def test_second_order_poisson_is_close_on_a_quartic(cloud, laplace2):
    u = solve_poisson(laplace2, _bubble_source(cloud.points), cloud.is_boundary)
    weights = norm_weights(compute_voronoi(cloud))
    assert discrete_l2_error(u, _bubble(cloud.points), weights) < 0.05


def test_maximum_principle_holds_for_fvm(cloud, fvm_operator):
    q = np.ones(cloud.n_points)
    u = solve_poisson(fvm_operator, q, cloud.is_boundary)
    report = maximum_principle_check(u, fvm_operator, cloud.is_boundary, q)
    assert report.passed
    assert report.failing_rows == 0
    assert report.rows_checked == int(cloud.interior.sum())


# ---------- Norms ----------


def test_discrete_l2_error_on_known_values():
    weights = np.array([0.5, 0.5])
    assert weighted_l2_norm(np.array([3.0, 4.0]), np.array([1.0, 1.0])) == pytest.approx(5.0)
    error = discrete_l2_error(np.array([0.0, 1.0]), np.array([1.0, 1.0]), weights)
    assert error == pytest.approx(np.sqrt(0.5))


def test_discrete_l2_error_needs_a_nonzero_reference():
    with pytest.raises(NormError):
        discrete_l2_error(np.ones(3), np.zeros(3), np.ones(3))
    with pytest.raises(ParameterError):
        discrete_l2_error(np.ones(3), np.ones(2), np.ones(3))


# ---------- Parabolic ----------


def test_cfl_step_count():
    assert cfl_steps(0.1, 1.0) == 143
    assert cfl_dt(0.1, 1.0) == pytest.approx(1.0 / 143)
    assert cfl_dt(0.1, 1.0) <= 0.7 * 0.01
    with pytest.raises(ParameterError):
        cfl_steps(0.0)


@given(
    st.floats(min_value=1e-4, max_value=1.0),
    st.floats(min_value=1e-3, max_value=10.0),
)
def test_cfl_step_count_is_the_smallest_admissible(dx, final_time):
    limit = settings.CFL_FACTOR * dx * dx
    steps = cfl_steps(dx, final_time)
    assert final_time / steps <= limit
    assert steps == 1 or final_time / (steps - 1) > limit


def test_cfl_step_count_on_an_exact_multiple():
    # 0.7 / (0.7 * 0.5 * 0.5) is exactly 4 in binary
    assert cfl_steps(0.5, 0.7) == 4
    assert cfl_dt(0.5, 0.7) == 0.7 / 4


def _scalar_operator(rate: float) -> OperatorMatrix:
    matrix = sparse.csr_matrix(np.array([[-rate]]))
    return OperatorMatrix(matrix=matrix, offsets=np.zeros((1, 2)), kind=OperatorKind.LAPLACE,
                          degree=2)


def test_trapezoidal_step_amplifies_by_the_closed_form():
    rate, dt = 3.0, 0.2
    u = step_trapezoidal(
        _scalar_operator(rate), np.ones(1), np.zeros(1), np.zeros(1), dt, np.array([False])
    )
    expected = (1.0 - 0.5 * rate * dt) / (1.0 + 0.5 * rate * dt)
    assert u[0] == pytest.approx(expected, rel=1e-9)


@given(
    st.floats(min_value=0.0, max_value=1e6),
    st.floats(min_value=1e-6, max_value=1.0),
)
def test_trapezoidal_step_never_amplifies(rate, dt):
    u = step_trapezoidal(
        _scalar_operator(rate), np.ones(1), np.zeros(1), np.zeros(1), dt, np.array([False])
    )
    assert abs(u[0]) <= 1.0 + 1e-9


def test_single_heat_step_matches_the_stepper(cloud, fvm_operator):
    case = define_test_case(4)
    dt = 0.01
    u0 = np.where(cloud.is_boundary, 0.0, case.solution(cloud.points, 0.0))
    stepped = step_trapezoidal(
        fvm_operator,
        u0,
        case.source(cloud.points, 0.0),
        case.source(cloud.points, dt),
        dt,
        cloud.is_boundary,
    )
    marched = solve_heat(fvm_operator, case, cloud, dt, final_time=dt)
    assert np.allclose(stepped, marched, atol=1e-8)


def test_heat_solvers_agree_and_track_the_reference(cloud, fvm_operator):
    case = define_test_case(4)
    factorized = solve_heat(fvm_operator, case, cloud, 0.005, final_time=0.1)
    iterative = solve_heat(
        fvm_operator, case, cloud, 0.005, final_time=0.1, linear_solver="iterative"
    )
    assert np.allclose(factorized, iterative, atol=1e-7)
    weights = norm_weights(compute_voronoi(cloud))
    assert discrete_l2_error(factorized, case.solution(cloud.points, 0.1), weights) < 0.05


def test_solve_heat_rejects_bad_arguments(cloud, fvm_operator):
    case = define_test_case(4)
    with pytest.raises(ParameterError):
        solve_heat(fvm_operator, case, cloud, 0.0)
    with pytest.raises(ParameterError):
        solve_heat(fvm_operator, case, cloud, 0.01, linear_solver="cholesky")


def test_save_solution_columns(tmp_path, cloud):
    field = sample_field(cloud, lambda p: 1.0 + p[:, 0])
    path = tmp_path / "solution.csv"
    save_solution(cloud, field.values, field.values + 0.5, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "id,x,y,u_h,u_ref,abs_err"
    assert len(lines) == cloud.n_points + 1
    assert float(lines[1].split(",")[-1]) == pytest.approx(0.5)
