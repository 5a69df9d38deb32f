import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .constants_and_enums import (
    DEFAULT_TOLERANCES,
    LAMBDA_SATURATION,
    KernelNormalization,
    Tolerances,
)
from .exceptions import ConvergenceError, EmptySetError
from .hilbert import hilbert_indicator, hilbert_indicator_many, log_kernel_sum
from .intervals import FiniteOpenSet, Interval, symm_diff_measure
from .utils import bisect_root, chebyshev_nodes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelBound:
    """
    Paired levels lam > 0 and mu = (1/pi) ln(1 - e^(-lam)) < 0

    Attributes:
        lam (float): superlevel of H1_E
        mu (float): sublevel of H1_F
    """

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam > 0 and self.mu < 0):
            raise ValueError(
                f"LevelBound: need lam > 0 > mu, got ({self.lam}, {self.mu})"
            )

    @property
    def pi_mu(self) -> float:
        return math.log1p(-math.exp(-self.lam))

    @property
    def exp_pi_mu(self) -> float:
        """e^(pi mu) = 1 - e^(-lam)"""
        return -math.expm1(-self.lam)

    @property
    def measure_ratio(self) -> float:
        """|E| / |F| = e^lam - 1"""
        return math.expm1(self.lam)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu}


def mu_from_lambda(lam: float) -> LevelBound:
    """
    The level pairing mu = (1/pi) ln(1 - e^(-lam))

    Raises:
        ValueError: lam <= 0, or lam past the saturation level where
            1 - e^(-lam) rounds to 1
    """
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"mu_from_lambda: lambda must be positive, got {lam}")
    if lam >= LAMBDA_SATURATION:
        raise ValueError(
            f"mu_from_lambda: lambda = {lam} saturates, 1 - e^-lambda rounds to 1"
            f" beyond {LAMBDA_SATURATION:.3f}"
        )
    return LevelBound(lam, math.log1p(-math.exp(-lam)) / math.pi)


def lambda_from_mu(mu: float) -> float:
    """Inverse pairing lam = -ln(1 - e^(pi mu))"""
    if not (mu < 0 and math.isfinite(mu)):
        raise ValueError(f"lambda_from_mu: mu must be negative, got {mu}")
    return -math.log(-math.expm1(math.pi * mu))


@dataclass(frozen=True)
class LevelSetConfig:
    """
    Sublevel inversion of a finite-open F

    Attributes:
        bound (LevelBound): the level pair
        F (FiniteOpenSet): components (a_k, b_k)
        roots (tuple): c_k with H1_F(c_k) = mu, c_k < a_k < b_k < c_(k+1)
        E (FiniteOpenSet): components (c_k, a_k)
        offsets (tuple): a_k - c_k as found by the root search
        root_residuals (tuple): |H1_F(c_k) - mu|
    """

    bound: LevelBound
    F: FiniteOpenSet
    roots: Tuple[float, ...]
    E: FiniteOpenSet
    offsets: Tuple[float, ...]
    root_residuals: Tuple[float, ...]

    @property
    def interlaced(self) -> bool:
        points = []
        for c, iv in zip(self.roots, self.F):
            points.extend((c, iv.a, iv.b))
        return all(lo < hi for lo, hi in zip(points, points[1:]))

    @property
    def measure_relative_error(self) -> float:
        expected = self.bound.measure_ratio * self.F.measure
        return abs(math.fsum(self.offsets) - expected) / expected

    def to_dict(self) -> dict:
        return {
            **self.bound.to_dict(),
            "F": self.F.to_json(),
            "roots": list(self.roots),
            "E": self.E.to_json(),
            "measures": {
                "F": self.F.measure,
                "E": self.E.measure,
                "expected_E": self.bound.measure_ratio * self.F.measure,
                "relative_error": self.measure_relative_error,
            },
            "max_root_residual": max(self.root_residuals),
        }


def _gap_log_sum(F: FiniteOpenSet, k: int, d: float) -> float:
    # log kernel sum of F at x = a_k - d, with every distance formed from d
    # so that tiny offsets keep their relative precision
    anchor = F.intervals[k].a
    terms = []
    for j, iv in enumerate(F):
        if j >= k:
            terms.append(math.log1p(-iv.length / ((iv.b - anchor) + d)))
        else:
            terms.append(math.log1p(iv.length / ((anchor - iv.b) - d)))
    return math.fsum(terms)


def sublevel_set(
    F: FiniteOpenSet, lam: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> LevelSetConfig:
    """
    E = {x outside F : H1_F(x) < mu}, a union of intervals (c_k, a_k)

    Every c_k is found by bisection on the gap (b_(k-1), a_k), where H1_F falls
    strictly from +inf to -inf. The unbounded first gap is bracketed by
    a_1 - |E| - |F|, because a_1 - c_1 <= |E| = (e^lam - 1)|F|.

    Args:
        F (FiniteOpenSet): nonempty canonical set
        lam (float): superlevel, mu follows from mu_from_lambda

    Returns:
        LevelSetConfig: roots, E and diagnostics

    Raises:
        ConvergenceError: the bracket does not hold a sign change
    """
    if not F:
        raise EmptySetError("sublevel_set: F must be nonempty")
    bound = mu_from_lambda(lam)
    target = bound.pi_mu
    expected_measure = bound.measure_ratio * F.measure

    offsets: List[float] = []
    for k, iv in enumerate(F):
        if k == 0:
            width = expected_measure + F.measure
        else:
            width = iv.a - F.intervals[k - 1].b

        def residual(d: float, k: int = k) -> float:
            return _gap_log_sum(F, k, d) - target

        if k == 0 and residual(width) < 0:
            raise ConvergenceError(
                f"sublevel_set: left bracket {iv.a - width} holds no root"
            )
        offsets.append(
            bisect_root(residual, 0.0, width, increasing=True, tolerances=tolerances)
        )

    roots = tuple(iv.a - d for iv, d in zip(F, offsets))
    residuals = tuple(abs(log_kernel_sum(F, c) - target) / math.pi for c in roots)
    worst = max(residuals)
    if worst > tolerances.root_level_tol:
        logger.warning(
            f"sublevel_set: root residual {worst:.3e}"
            f" above {tolerances.root_level_tol:.1e}"
        )
    E = FiniteOpenSet(tuple(Interval(c, iv.a) for c, iv in zip(roots, F)))
    logger.debug(f"sublevel_set: lambda={lam}, {len(F)} roots, |E|={E.measure}")
    return LevelSetConfig(bound, F, roots, E, tuple(offsets), residuals)


def superlevel_set(
    F: FiniteOpenSet, lam: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> FiniteOpenSet:
    """
    {x outside F : H1_F(x) > -mu}, the mirror image of sublevel_set on the
    right of F
    """
    return sublevel_set(F.reflect(), lam, tolerances).E.reflect()


def bezout_polynomial(config: LevelSetConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Coefficients (lowest degree first) of both sides of
    e^(pi mu) prod(x - b_k) - prod(x - a_k) = (e^(pi mu) - 1) prod(x - c_k)
    """
    q = config.bound.exp_pi_mu
    lhs = q * npoly.polyfromroots(config.F.rights) - npoly.polyfromroots(config.F.lefts)
    rhs = -math.exp(-config.bound.lam) * npoly.polyfromroots(config.roots)
    return lhs, rhs


def verify_bezout(config: LevelSetConfig) -> float:
    """
    Max normalized residual of the Bezout factorization at 4n+1 Chebyshev
    points over [c_1 - 1, b_n + 1]

    The residual at a point is divided by the evaluation scale
    sum |coef_i| |x|^i of both sides.
    """
    n = len(config.F)
    xs = chebyshev_nodes(config.roots[0] - 1.0, config.F.supremum + 1.0, 4 * n + 1)
    q = config.bound.exp_pi_mu
    lefts, rights, roots = config.F.lefts, config.F.rights, np.asarray(config.roots)
    lhs = q * np.prod(xs[:, None] - rights[None, :], axis=1) - np.prod(
        xs[:, None] - lefts[None, :], axis=1
    )
    rhs = -math.exp(-config.bound.lam) * np.prod(
        xs[:, None] - roots[None, :], axis=1
    )
    lhs_coef, rhs_coef = bezout_polynomial(config)
    scale = npoly.polyval(np.abs(xs), np.abs(lhs_coef)) + npoly.polyval(
        np.abs(xs), np.abs(rhs_coef)
    )
    return float(np.max(np.abs(lhs - rhs) / scale))


def sum_of_roots(config: LevelSetConfig) -> Tuple[float, float]:
    """
    (sum c_k, (e^(pi mu) sum b_k - sum a_k) / (e^(pi mu) - 1)), the second from the
    x^(n-1) coefficients of the Bezout factorization
    """
    q = config.bound.exp_pi_mu
    computed = math.fsum(config.roots)
    weighted = q * math.fsum(config.F.rights) - math.fsum(config.F.lefts)
    formula = weighted / -math.exp(-config.bound.lam)
    return computed, formula


@dataclass
class RoundtripReport:
    normalization: KernelNormalization
    endpoint_errors: List[float]
    interior_margin: float
    exterior_margin: float
    passed: bool

    @property
    def worst_endpoint_error(self) -> float:
        return max(self.endpoint_errors)

    def to_dict(self) -> dict:
        return {
            "normalization": self.normalization.value,
            "worst_endpoint_error": self.worst_endpoint_error,
            "interior_margin": self.interior_margin,
            "exterior_margin": self.exterior_margin,
            "passed": self.passed,
        }


def _interior_samples(lo: float, hi: float, count: int) -> np.ndarray:
    samples = np.linspace(lo, hi, count + 2)[1:-1]
    return np.append(samples, 0.5 * (lo + hi))


def verify_roundtrip(
    config: LevelSetConfig,
    normalization: KernelNormalization = KernelNormalization.BARE,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RoundtripReport:
    """
    Check F = {x outside E : H1_E(x) > lam} through the endpoint certificates
    H1_E(b_k) = lam and sample margins inside F and outside the closure of E ∪ F

    With BARE normalization H1_E is the log sum without 1/pi, the reading
    under which the certificates hold; PI compares (1/pi) times that sum.
    """
    lam = config.bound.lam
    E, F = config.E, config.F
    count = tolerances.interior_samples
    endpoint_errors = [abs(hilbert_indicator(E, iv.b, normalization) - lam) for iv in F]

    interior = np.concatenate([_interior_samples(iv.a, iv.b, count) for iv in F])
    inside_values = hilbert_indicator_many(E, interior, normalization)
    interior_margin = float(np.min(inside_values - lam))

    outside = []
    for iv, c_next in zip(F.intervals[:-1], config.roots[1:]):
        outside.append(_interior_samples(iv.b, c_next, count))
    scale = F.supremum - config.roots[0]
    steps = scale * np.array([1e-2, 1e-1, 1.0, 10.0, 100.0])
    outside.extend((config.roots[0] - steps, F.supremum + steps))
    outside_points = np.concatenate(outside)
    outside_values = hilbert_indicator_many(E, outside_points, normalization)
    exterior_margin = float(np.min(lam - outside_values))

    passed = (
        max(endpoint_errors) <= tolerances.roundtrip_tol
        and interior_margin > 0
        and exterior_margin > 0
    )
    return RoundtripReport(
        normalization, endpoint_errors, interior_margin, exterior_margin, passed
    )


@dataclass
class ApproximationReport:
    """Sublevel inversions along a sequence F_n converging to F in measure"""

    configs: List[LevelSetConfig]
    f_measures: List[float]
    e_measures: List[float]
    f_steps: List[float] = field(default_factory=list)
    e_steps: List[float] = field(default_factory=list)

    @property
    def limit_measure(self) -> float:
        return self.configs[-1].bound.measure_ratio * self.f_measures[-1]


def approx_sublevel_for_open(
    F_sequence: Sequence[FiniteOpenSet],
    lam: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ApproximationReport:
    """
    Invert every F_n and record |F_n △ F_(n+1)| with |E_n △ E_(n+1)|, which
    shows E_n converging along with F_n and |E_n| tending to (e^lam - 1)|F|
    """
    configs = [sublevel_set(F, lam, tolerances) for F in F_sequence]
    report = ApproximationReport(
        configs=configs,
        f_measures=[c.F.measure for c in configs],
        e_measures=[c.E.measure for c in configs],
    )
    for prev, nxt in zip(configs, configs[1:]):
        report.f_steps.append(symm_diff_measure(prev.F, nxt.F))
        report.e_steps.append(symm_diff_measure(prev.E, nxt.E))
    return report


def verify_inclusion_open(
    F_sequence: Sequence[FiniteOpenSet],
    lam: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Worst margin of H1_(E_n) - lam over interior samples of every F_n, with E_n
    the sublevel set of F_n. A positive result means each F_n sits inside the
    superlevel set of its E_n.
    """
    if not F_sequence:
        raise ValueError("verify_inclusion_open: empty sequence")
    worst = math.inf
    for F in F_sequence:
        config = sublevel_set(F, lam, tolerances)
        samples = np.concatenate(
            [_interior_samples(iv.a, iv.b, tolerances.interior_samples) for iv in F]
        )
        values = hilbert_indicator_many(config.E, samples, KernelNormalization.BARE)
        worst = min(worst, float(np.min(values - lam)))
    return worst
