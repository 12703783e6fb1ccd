from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Point clouds
    SEPARATION_RATIO: float = 0.25
    DART_REJECTION_FACTOR: float = 200.0
    DART_BATCH_SIZE: int = 65_536
    MIN_NEIGHBORS: int = 30
    STENCIL_GROWTH: float = 1.3

    # Operators
    CONDITION_LIMIT: float = 1e12
    ALPHA_DENOMINATOR_GUARD: float = 1e-14

    # Solver
    SOLVER_REL_TOL: float = 1e-10
    SOLVER_MAXITER_FACTOR: int = 20
    DENSE_FALLBACK_MAX_N: int = 4_000
    CFL_FACTOR: float = 0.7
    FINAL_TIME: float = 1.0
    HEAT_LINEAR_SOLVER: str = "factorized"

    # Benchmark
    DEFAULT_H_LIST: tuple[float, ...] = (0.16, 0.08, 0.04, 0.02)
    DEFAULT_SEED: int = 42
    WORKERS: int = 1

    # Verification
    VERIFY_H_LIST: tuple[float, ...] = (0.16, 0.08, 0.04)
    ORDER_SLACK: float = 0.5

    # App
    LOG_LEVEL: str = "INFO"

    model_config = {"env_file": ".env", "env_prefix": "GFDM_", "extra": "ignore"}


settings = Settings()
