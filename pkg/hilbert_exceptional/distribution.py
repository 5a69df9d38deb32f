import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

from .constants_and_enums import DEFAULT_TOLERANCES, KernelNormalization, Tolerances
from .exceptions import ConvergenceError
from .intervals import FiniteOpenSet, normalize
from .utils import bisect_root

logger = logging.getLogger(__name__)

PI = KernelNormalization.PI


def stein_weiss_rhs(measure_E: float, lam: float) -> float:
    """
    4 e^(pi lam) |E| / (e^(2 pi lam) - 1), evaluated as 2|E| / sinh(pi lam)

    Args:
        measure_E (float): |E| > 0
        lam (float): level > 0

    Returns:
        float: measure of {|H1_E| > lam}
    """
    if not measure_E > 0:
        raise ValueError(f"stein_weiss_rhs: |E| must be positive, got {measure_E}")
    if not lam > 0:
        raise ValueError(f"stein_weiss_rhs: lambda must be positive, got {lam}")
    return 2.0 * measure_E / math.sinh(math.pi * lam)


def _offset_log_sum(E: FiniteOpenSet, anchor: float, d: float) -> float:
    # log kernel sum at x = anchor + d, distances formed as (anchor - p) + d
    terms = []
    for iv in E:
        to_b = (anchor - iv.b) + d
        if to_b > 0 or to_b < -iv.length:
            terms.append(math.log1p(iv.length / to_b))
        else:
            terms.append(math.log((anchor - iv.a) + d) - math.log(-to_b))
    return math.fsum(terms)


def _expand_bracket(
    func: Callable[[float], float], start: float, increasing: bool
) -> float:
    hi = start
    for _ in range(2000):
        value = func(hi)
        if (value > 0) == increasing:
            return hi
        hi *= 2.0
    raise ConvergenceError(f"_expand_bracket: no sign change up to {hi}")


def _monotone_pieces(
    E: FiniteOpenSet, level: float, tolerances: Tolerances
) -> List[Tuple[float, float]]:
    """
    (anchor, signed offset) per piece of {|S| > level}, S the log kernel sum;
    each piece is the interval between anchor and anchor + offset
    """
    pieces = []
    scale = max(E.diameter, E.measure)

    def solve(
        anchor: float, direction: float, target: float, width: float, unbounded: bool
    ) -> float:
        # x = anchor + direction * d, the piece is where S passes target
        def residual(d: float) -> float:
            return _offset_log_sum(E, anchor, direction * d) - target

        # S tends to -inf at left endpoints and +inf at right ones
        increasing = target < 0
        if unbounded:
            width = _expand_bracket(residual, scale, increasing)
        root = bisect_root(
            residual, 0.0, width, increasing=increasing, tolerances=tolerances
        )
        return direction * root

    components = E.intervals
    first, last = components[0], components[-1]
    pieces.append((first.a, solve(first.a, -1.0, -level, 0.0, True)))
    for k, iv in enumerate(components):
        pieces.append((iv.a, solve(iv.a, 1.0, -level, iv.length, False)))
        pieces.append((iv.b, solve(iv.b, -1.0, level, iv.length, False)))
        if k + 1 < len(components):
            gap = components[k + 1].a - iv.b
            pieces.append((iv.b, solve(iv.b, 1.0, level, gap, False)))
            following = components[k + 1].a
            pieces.append((following, solve(following, -1.0, -level, gap, False)))
    pieces.append((last.b, solve(last.b, 1.0, level, 0.0, True)))
    return pieces


def superlevel_set_abs(
    E: FiniteOpenSet,
    lam: float,
    normalization: KernelNormalization = PI,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FiniteOpenSet:
    """
    {x : |H1_E(x)| > lam} as a finite-open set

    H1_E is monotone on each component of E, each gap and both rays, so every
    one of those contributes at most two pieces found by bisection. Endpoints
    of E, where |H1_E| is infinite, are added back when pieces are merged.
    """
    if not lam > 0:
        raise ValueError(f"superlevel_set_abs: lambda must be positive, got {lam}")
    if not E:
        return FiniteOpenSet.empty()
    level = lam / normalization.factor
    pairs = [
        sorted((anchor, anchor + offset))
        for anchor, offset in _monotone_pieces(E, level, tolerances)
    ]
    # a piece below the float spacing at its anchor holds no other point
    return normalize(pair for pair in pairs if pair[0] < pair[1])


def level_set_measure(
    E: FiniteOpenSet,
    lam: float,
    normalization: KernelNormalization = PI,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """|{x : |H1_E(x)| > lam}|, summed from the offsets of the monotone pieces"""
    if not lam > 0:
        raise ValueError(f"level_set_measure: lambda must be positive, got {lam}")
    if not E:
        return 0.0
    level = lam / normalization.factor
    pieces = _monotone_pieces(E, level, tolerances)
    return math.fsum(abs(offset) for _, offset in pieces)


@dataclass
class DistributionReport:
    """
    Attributes:
        lambda_grid (list): levels
        exact_measures (list): level_set_measure per level
        stein_weiss_values (list): stein_weiss_rhs per level
        max_relative_error (float): worst |exact - formula| / formula
    """

    lambda_grid: List[float]
    exact_measures: List[float]
    stein_weiss_values: List[float]
    max_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance

    def rows(self) -> List[Tuple[float, float, float, float]]:
        """(lambda, exact, formula, rel_error) per grid point"""
        return [
            (lam, exact, formula, abs(exact - formula) / formula)
            for lam, exact, formula in zip(
                self.lambda_grid, self.exact_measures, self.stein_weiss_values
            )
        ]

    def to_dict(self) -> dict:
        return {
            "lambdas": self.lambda_grid,
            "exact": self.exact_measures,
            "formula": self.stein_weiss_values,
            "max_relative_error": self.max_relative_error,
            "passed": self.passed,
        }


def verify_stein_weiss(
    E: FiniteOpenSet,
    lambda_grid: Sequence[float],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DistributionReport:
    """Compare level_set_measure with stein_weiss_rhs on a grid of levels"""
    if len(lambda_grid) == 0:
        raise ValueError("verify_stein_weiss: empty lambda grid")
    if not E:
        raise ValueError("verify_stein_weiss: E must be nonempty")
    grid = [float(lam) for lam in lambda_grid]
    exact = [level_set_measure(E, lam, PI, tolerances) for lam in grid]
    formula = [stein_weiss_rhs(E.measure, lam) for lam in grid]
    worst = max(abs(x - y) / y for x, y in zip(exact, formula))
    logger.debug(
        f"verify_stein_weiss: {len(grid)} levels, max relative error {worst:.3e}"
    )
    return DistributionReport(
        grid, exact, formula, worst, tolerances.stein_weiss_rel_tol
    )


def distribution_curve(
    E: FiniteOpenSet,
    lambdas: Sequence[float],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> List[Tuple[float, float, float, float]]:
    """CSV rows (lambda, exact, formula, rel_error) for the stein-weiss subcommand"""
    return verify_stein_weiss(E, lambdas, tolerances).rows()


def superlevel_bound_check(A: FiniteOpenSet, gamma: float) -> Tuple[float, float]:
    """
    (|{|H1_A| > gamma / 2}|, 4 e^(pi gamma / 2) |A| / (e^(pi gamma) - 1)), the weak
    type estimate used when selecting Whitney intervals; the two agree
    """
    lhs = level_set_measure(A, 0.5 * gamma)
    rhs = stein_weiss_rhs(A.measure, 0.5 * gamma)
    return lhs, rhs
