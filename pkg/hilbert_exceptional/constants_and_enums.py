import math
from dataclasses import dataclass, fields, replace
from enum import Enum


class KernelNormalization(Enum):
    """
    PI   -> (1/pi) * integral of f(t)/(x-t), the usual Hilbert transform
    BARE -> the same integral without the 1/pi factor (the log sum)
    """

    PI = "pi"
    BARE = "bare"

    @property
    def factor(self) -> float:
        return 1.0 / math.pi if self is KernelNormalization.PI else 1.0


class OscillationPhase(Enum):
    SIN = "sin"
    COS = "cos"


@dataclass(frozen=True)
class Tolerances:
    """Numerical defaults shared by all modules

    Attributes:
        bisection_rel_tol (float): relative width at which root bisection stops
        bisection_max_iter (int): bisection iteration budget
        quadrature_abs_tol (float): absolute tolerance of the quadrature oracle
        quadrature_limit (int): subdivision budget of the quadrature oracle
        root_level_tol (float): |H1_F(c_k) - mu| allowed for a level set root
        measure_rel_tol (float): relative tolerance of |E| = (e^lambda - 1)|F|
        bezout_tol (float): normalized Bezout residual allowed
        roundtrip_tol (float): endpoint certificate tolerance H1_E(b_k) = lambda
        stein_weiss_rel_tol (float): relative tolerance of the Stein-Weiss check
        whitney_tol (float): relative slack for the Whitney distance identities
        interior_samples (int): samples per interval for set identity checks
    """

    bisection_rel_tol: float = 1e-13
    bisection_max_iter: int = 200
    quadrature_abs_tol: float = 1e-9
    quadrature_limit: int = 200
    root_level_tol: float = 1e-10
    measure_rel_tol: float = 1e-8
    bezout_tol: float = 1e-9
    roundtrip_tol: float = 1e-9
    stein_weiss_rel_tol: float = 1e-6
    whitney_tol: float = 1e-12
    interior_samples: int = 16

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            if not value > 0:
                raise ValueError(
                    f"Tolerances: {field.name} must be positive, got {value}"
                )

    def replace(self, **overrides) -> "Tolerances":
        return replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()

# 1 - exp(-lambda) rounds to 1 in double precision beyond this level
LAMBDA_SATURATION = -math.log(2.0**-53)

SCHEMA_VERSION = 1
