"""Single benchmark runs: cloud -> stencils -> Voronoi -> operator -> solve -> error."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from gfdmlab.common.enums import Method, MethodFamily, ReconstructionScheme
from gfdmlab.common.exceptions import ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import TestCase, define_test_case
from gfdmlab.core.benchmark.schemas import SolveSummary
from gfdmlab.core.diffusion.ddo import build_ddo
from gfdmlab.core.diffusion.field import attach_gradients, sample_field
from gfdmlab.core.diffusion.fvm import build_fvm_diffusion
from gfdmlab.core.diffusion.mls_diffusion import build_mls_diffusion
from gfdmlab.core.diffusion.schemas import DiffusivityField
from gfdmlab.core.mls.assembly import build_laplace, count_sign_violations
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.pointcloud.generator import generate_cloud
from gfdmlab.core.pointcloud.schemas import PointCloud, StencilSet
from gfdmlab.core.pointcloud.stencils import build_stencils, min_point_distance
from gfdmlab.core.solver.elliptic import solve_poisson
from gfdmlab.core.solver.norms import discrete_l2_error
from gfdmlab.core.solver.parabolic import cfl_dt, solve_heat
from gfdmlab.core.voronoi.diagram import compute_voronoi, norm_weights
from gfdmlab.core.voronoi.schemas import VoronoiDiagram

logger = get_logger("benchmark.service")


@dataclass(frozen=True, eq=False)
class CaseSolution:
    cloud: PointCloud
    operator: OperatorMatrix
    u_h: np.ndarray
    u_ref: np.ndarray
    summary: SolveSummary


def build_diffusion_operator(
    method: Method,
    scheme: ReconstructionScheme,
    cloud: PointCloud,
    stencils: StencilSet | None,
    diagram: VoronoiDiagram,
    field: DiffusivityField,
    dd_correction: bool | None = None,
) -> OperatorMatrix:
    """Discrete ``div(lambda grad .)`` for one method.

    ``field`` must already carry gradients when the method or scheme reads them.
    """
    if method.family is MethodFamily.FVM:
        return build_fvm_diffusion(diagram, cloud, field, scheme)
    if stencils is None:
        raise ParameterError(f"Method {method.value} needs stencils")
    if method.family is MethodFamily.MLS:
        return build_mls_diffusion(cloud, stencils, field, method.order, dd_correction)
    laplace = build_laplace(cloud, stencils, method.order, dd_correction)
    return build_ddo(laplace, field, scheme)


def _needs_gradients(method: Method, scheme: ReconstructionScheme) -> bool:
    if method.family is MethodFamily.MLS:
        return True
    return scheme.needs_gradients


def solve_case(
    case: TestCase | int,
    method: Method | str,
    scheme: ReconstructionScheme | str,
    h: float,
    seed: int,
    dd_correction: bool | None = None,
    analytic_gradients: bool = False,
    final_time: float | None = None,
    cloud: PointCloud | None = None,
) -> CaseSolution:
    """Run the full pipeline for one ``(case, method, scheme, h, seed)``.

    A given ``cloud`` replaces generation; ``h`` and ``seed`` are then only
    recorded.  Stages raise :class:`~gfdmlab.common.exceptions.GfdmError`
    subclasses; nothing is caught here.
    """
    case = define_test_case(case) if isinstance(case, int) else case
    method = Method(method)
    scheme = ReconstructionScheme(scheme)
    started = time.perf_counter()

    if cloud is None:
        cloud = generate_cloud(h, seed)
    stencils = None
    if method.family is not MethodFamily.FVM or _needs_gradients(method, scheme):
        stencils = build_stencils(cloud, settings.MIN_NEIGHBORS)
    diagram = compute_voronoi(cloud)
    weights = norm_weights(diagram)

    field = sample_field(
        cloud, case.diffusivity, case.diffusivity_gradient, case.diffusivity_laplacian
    )
    if _needs_gradients(method, scheme):
        field = attach_gradients(field, cloud, stencils, analytic=analytic_gradients)

    operator = build_diffusion_operator(
        method, scheme, cloud, stencils, diagram, field, dd_correction
    )
    violations = count_sign_violations(operator, cloud.interior)

    dt = None
    if case.is_parabolic:
        horizon = settings.FINAL_TIME if final_time is None else final_time
        dt = cfl_dt(min_point_distance(cloud), horizon)
        u_h = solve_heat(operator, case, cloud, dt, horizon)
        u_ref = case.solution(cloud.points, horizon)
    else:
        u_h = solve_poisson(operator, case.source(cloud.points), cloud.is_boundary)
        u_ref = case.solution(cloud.points)

    error = discrete_l2_error(u_h, u_ref, weights)
    elapsed = time.perf_counter() - started
    summary = SolveSummary(
        case=case.case_id,
        method=method,
        scheme=scheme,
        seed=seed,
        h=h,
        n_points=cloud.n_points,
        dt=dt,
        error=error,
        wall_time_s=elapsed,
        clamp_count=operator.clamp_count,
        dd_violations=violations,
    )
    logger.info(
        "Case solved | case=%d | method=%s | scheme=%s | h=%.4g | N=%d | error=%.6e | time=%.2fs",
        case.case_id,
        method.value,
        scheme.value,
        h,
        cloud.n_points,
        error,
        elapsed,
    )
    return CaseSolution(cloud=cloud, operator=operator, u_h=u_h, u_ref=u_ref, summary=summary)
