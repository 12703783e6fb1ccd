EXIT_PARAMETER = 2
EXIT_NUMERICAL = 3


class GfdmError(Exception):
    def __init__(self, detail: str, exit_code: int = EXIT_NUMERICAL):
        super().__init__(detail)
        self.detail = detail
        self.exit_code = exit_code


class ParameterError(GfdmError):
    def __init__(self, detail: str):
        super().__init__(detail=detail, exit_code=EXIT_PARAMETER)


class FormatError(GfdmError):
    def __init__(self, detail: str, line: int | None = None):
        msg = detail
        if line is not None:
            msg = f"line {line}: {detail}"
        super().__init__(detail=msg, exit_code=EXIT_PARAMETER)
        self.line = line


class DegenerateCloudError(GfdmError):
    def __init__(self, point_index: int, radius: float, found: int, required: int):
        super().__init__(
            detail=(
                f"Stencil of point {point_index} has {found} < {required} members "
                f"at radius {radius:.6g} beyond the domain diameter"
            )
        )
        self.point_index = point_index


class DegenerateInputError(GfdmError):
    def __init__(self, first: int, second: int):
        super().__init__(detail=f"Points {first} and {second} coincide")
        self.indices = (first, second)


class SingularStencilError(GfdmError):
    def __init__(self, point_index: int, detail: str | None = None):
        msg = f"Singular MLS constraint matrix at point {point_index}"
        if detail:
            msg += f" - {detail}"
        super().__init__(detail=msg)
        self.point_index = point_index


class ReconstructionDomainError(GfdmError):
    def __init__(self, detail: str, pair: tuple[int, int] | None = None):
        msg = detail
        if pair is not None:
            msg = f"{detail} (i={pair[0]}, j={pair[1]})"
        super().__init__(detail=msg)
        self.pair = pair


class SolverError(GfdmError):
    def __init__(self, residual: float, detail: str | None = None):
        msg = f"Linear solver did not converge, final relative residual {residual:.3e}"
        if detail:
            msg += f" - {detail}"
        super().__init__(detail=msg)
        self.residual = residual


class NormError(GfdmError):
    def __init__(self, detail: str = "Reference solution has zero discrete L2 norm"):
        super().__init__(detail=detail)
