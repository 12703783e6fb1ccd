import math

from pydantic import BaseModel, Field

from gfdmlab.common.enums import Method, ReconstructionScheme

RESULTS_HEADER = (
    "case",
    "method",
    "scheme",
    "seed",
    "h",
    "N",
    "dt",
    "error",
    "order_running",
    "wall_time_s",
    "clamp_count",
    "dd_violations",
)


class SolveSummary(BaseModel):
    case: int
    method: Method
    scheme: ReconstructionScheme
    seed: int
    h: float
    n_points: int
    dt: float | None = None
    error: float
    wall_time_s: float
    clamp_count: int = 0
    dd_violations: int = 0


class ConvergenceRow(BaseModel):
    case: int = Field(..., ge=1, le=5, description="Test case id")
    method: Method
    scheme: ReconstructionScheme
    seed: int
    h: float = Field(..., gt=0.0, description="Target smoothing length")
    n_points: int = Field(0, ge=0, description="Cloud size; 0 when generation failed")
    dt: float | None = Field(None, description="Time step for parabolic cases")
    error: float = Field(math.nan, description="Relative discrete L2 error, nan on failure")
    order_running: float | None = Field(
        None, description="Order against the previous row of the same method"
    )
    wall_time_s: float = 0.0
    clamp_count: int = 0
    dd_violations: int = 0
    failure: str | None = Field(None, description="Error message when a stage failed")

    @property
    def is_valid(self) -> bool:
        return self.n_points > 0 and math.isfinite(self.error) and self.error > 0.0

    @classmethod
    def from_summary(cls, summary: SolveSummary) -> "ConvergenceRow":
        return cls(
            case=summary.case,
            method=summary.method,
            scheme=summary.scheme,
            seed=summary.seed,
            h=summary.h,
            n_points=summary.n_points,
            dt=summary.dt,
            error=summary.error,
            wall_time_s=summary.wall_time_s,
            clamp_count=summary.clamp_count,
            dd_violations=summary.dd_violations,
        )


class OrderEstimate(BaseModel):
    method: Method
    scheme: ReconstructionScheme
    valid_rows: int
    order: float | None = None
    intercept: float | None = None
    fit_residual: float | None = None
    note: str | None = None

    @property
    def has_fit(self) -> bool:
        return self.order is not None
