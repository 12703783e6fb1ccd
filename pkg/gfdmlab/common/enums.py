import enum


class OperatorKind(str, enum.Enum):
    LAPLACE = "laplace"
    GRADIENT_X = "gradient_x"
    GRADIENT_Y = "gradient_y"
    ZERO = "zero"
    DERIVED = "derived"
    DIFFUSION_DDO = "diffusion_ddo"
    DIFFUSION_MLS = "diffusion_mls"
    LAPLACE_FVM = "laplace_fvm"
    DIFFUSION_FVM = "diffusion_fvm"

    @property
    def is_laplacian_like(self) -> bool:
        """Kinds whose rows must annihilate constants."""
        return self in {
            OperatorKind.LAPLACE,
            OperatorKind.DIFFUSION_DDO,
            OperatorKind.DIFFUSION_MLS,
            OperatorKind.LAPLACE_FVM,
            OperatorKind.DIFFUSION_FVM,
        }


class ReconstructionScheme(str, enum.Enum):
    AM = "am"
    HM = "hm"
    GM = "gm"
    TAYLOR = "taylor"
    SKEW_TAYLOR = "skew"
    GR = "gr"

    @property
    def needs_gradients(self) -> bool:
        return self in {
            ReconstructionScheme.TAYLOR,
            ReconstructionScheme.SKEW_TAYLOR,
            ReconstructionScheme.GR,
        }

    @property
    def is_symmetric(self) -> bool:
        return self not in {ReconstructionScheme.TAYLOR, ReconstructionScheme.SKEW_TAYLOR}


class MethodFamily(str, enum.Enum):
    FVM = "fvm"
    MLS = "mls"
    DDO = "ddo"


class Method(str, enum.Enum):
    FVM = "fvm"
    MLS2 = "mls2"
    MLS4 = "mls4"
    DDO2 = "ddo2"
    DDO4 = "ddo4"

    @property
    def family(self) -> MethodFamily:
        return MethodFamily(self.value.rstrip("24"))

    @property
    def order(self) -> int:
        if self is Method.FVM:
            return 2
        return int(self.value[-1])


class ProblemKind(str, enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"


class VerificationSuite(str, enum.Enum):
    CONSISTENCY = "consistency"
    SIGNS = "signs"
    DERIVED = "derived"
    ENRICHMENT = "enrichment"
    ALL = "all"
