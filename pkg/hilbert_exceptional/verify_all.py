"""
Seeded property corpus behind the verify-all command

Every check draws its random cases from one numpy Generator, in a fixed order,
so a seed fixes the whole report.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .constants_and_enums import DEFAULT_TOLERANCES, KernelNormalization, Tolerances
from .constructions import (
    ExceptionalSeed,
    lemma4_divergence_check,
    thm1_construct,
    thm1_witness,
    thm2_construct,
    thm2_witness,
)
from .distribution import level_set_measure, verify_stein_weiss
from .exceptions import ConfigError, ConstructionError, ConvergenceError
from .hilbert import quadrature_oracle, truncated_hilbert_indicator
from .intervals import FiniteOpenSet, Interval, verify_whitney, whitney_partition
from .kk_polynomial import kk_construct
from .level_set import sublevel_set, sum_of_roots, verify_bezout, verify_roundtrip

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-7
ANCHOR_ROOT_TOL = 1e-12
CLOSED_FORM_TOL = 1e-10

DEFAULT_CASES: Dict[str, int] = {
    "oracle": 1000,
    "level_set": 500,
    "stein_weiss": 20,
    "whitney": 50,
}


def random_finite_open_set(
    rng: np.random.Generator,
    max_components: int = 8,
    min_piece: float = 0.01,
    max_piece: float = 1.0,
    start: float = -4.0,
) -> FiniteOpenSet:
    """Components and gaps with lengths uniform in [min_piece, max_piece]"""
    n = int(rng.integers(1, max_components + 1))
    pieces = rng.uniform(min_piece, max_piece, size=2 * n)
    edges = start + np.concatenate(([0.0], np.cumsum(pieces)))
    return FiniteOpenSet(
        tuple(Interval(edges[2 * k], edges[2 * k + 1]) for k in range(n))
    )


@dataclass
class CheckResult:
    """
    Attributes:
        name (str): identity checked
        passed (bool): outcome
        worst_margin (float, optional): smallest slack over the cases, negative on
            failure, None when the check raised
        cases (int): number of cases run
        detail (dict): per check diagnostics
    """

    name: str
    passed: bool
    worst_margin: Optional[float]
    cases: int
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "cases": self.cases,
            "detail": self.detail,
        }


@dataclass
class VerificationSummary:
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def rows(self) -> List[Tuple[str, bool, Optional[float]]]:
        return [(check.name, check.passed, check.worst_margin) for check in self.checks]

    def to_dict(self) -> dict:
        return {"seed": self.seed, "checks": [check.to_dict() for check in self.checks]}


def check_oracle(
    rng: np.random.Generator, cases: int, tolerances: Tolerances
) -> CheckResult:
    """Closed form truncated transform against adaptive quadrature"""
    worst = 0.0
    for _ in range(cases):
        F = random_finite_open_set(rng)
        x = float(rng.uniform(F.infimum - 1.0, F.supremum + 1.0))
        eps = float(10.0 ** rng.uniform(-3.0, 0.3))
        closed = truncated_hilbert_indicator(F, x, eps)
        oracle = quadrature_oracle(F, x, eps, tolerances=tolerances)
        worst = max(worst, abs(closed - oracle))
    return CheckResult(
        "closed_form_vs_quadrature",
        worst <= ORACLE_TOL,
        ORACLE_TOL - worst,
        cases,
        {"max_error": worst},
    )


def _anchor_root_error() -> float:
    level = math.log(2.0)
    single = sublevel_set(FiniteOpenSet.from_pairs([(0.0, 1.0)]), level)
    double = sublevel_set(FiniteOpenSet.from_pairs([(0.0, 1.0), (2.0, 3.0)]), level)
    root = math.sqrt(3.0)
    return max(
        abs(single.roots[0] + 1.0),
        abs(double.roots[0] + root),
        abs(double.roots[1] - root),
    )


def check_level_sets(
    rng: np.random.Generator, cases: int, tolerances: Tolerances
) -> CheckResult:
    """
    Measure identity, Bezout factorization, sum of roots and round trip on
    random (F, lambda)
    """
    worst_measure = worst_bezout = worst_endpoint = worst_roots = 0.0
    worst_interior = worst_exterior = math.inf
    interlaced = True
    for _ in range(cases):
        F = random_finite_open_set(rng)
        lam = float(rng.uniform(0.1, 5.0))
        config = sublevel_set(F, lam, tolerances)
        interlaced = interlaced and config.interlaced
        worst_measure = max(worst_measure, config.measure_relative_error)
        worst_bezout = max(worst_bezout, verify_bezout(config))
        computed, formula = sum_of_roots(config)
        worst_roots = max(worst_roots, abs(computed - formula) / max(1.0, abs(formula)))
        roundtrip = verify_roundtrip(config, KernelNormalization.BARE, tolerances)
        worst_endpoint = max(worst_endpoint, roundtrip.worst_endpoint_error)
        worst_interior = min(worst_interior, roundtrip.interior_margin)
        worst_exterior = min(worst_exterior, roundtrip.exterior_margin)
    anchor = _anchor_root_error()
    margins = (
        tolerances.measure_rel_tol - worst_measure,
        tolerances.bezout_tol - worst_bezout,
        tolerances.measure_rel_tol - worst_roots,
        tolerances.roundtrip_tol - worst_endpoint,
        ANCHOR_ROOT_TOL - anchor,
        worst_interior,
        worst_exterior,
    )
    worst_margin = min(margins)
    return CheckResult(
        "level_set_inversion",
        interlaced and worst_margin >= 0 and worst_interior > 0 and worst_exterior > 0,
        worst_margin,
        cases,
        {
            "measure_relative_error": worst_measure,
            "bezout_residual": worst_bezout,
            "sum_of_roots_error": worst_roots,
            "endpoint_error": worst_endpoint,
            "anchor_root_error": anchor,
            "interior_margin": worst_interior,
            "exterior_margin": worst_exterior,
        },
    )


def check_stein_weiss(
    rng: np.random.Generator, cases: int, tolerances: Tolerances
) -> CheckResult:
    """
    Exact distribution function against 2|E| / sinh(pi lam), plus the single
    interval closed form
    """
    worst = 0.0
    for _ in range(cases):
        E = random_finite_open_set(rng)
        grid = np.sort(rng.uniform(0.05, 3.0, size=20))
        worst = max(worst, verify_stein_weiss(E, grid, tolerances).max_relative_error)
    s = 3.0
    closed = 4 * s / (s * s - 1)
    unit = level_set_measure(
        FiniteOpenSet.from_pairs([(0.0, 1.0)]),
        math.log(s) / math.pi,
        tolerances=tolerances,
    )
    closed_error = abs(unit - closed) / closed
    margin = min(tolerances.stein_weiss_rel_tol - worst, CLOSED_FORM_TOL - closed_error)
    return CheckResult(
        "stein_weiss_identity",
        margin >= 0,
        margin,
        cases,
        {"max_relative_error": worst, "single_interval_error": closed_error},
    )


def check_whitney(
    rng: np.random.Generator, cases: int, tolerances: Tolerances
) -> CheckResult:
    worst_distance = worst_separation = math.inf
    passed = True
    for k in range(cases):
        G = random_finite_open_set(rng)
        depth = 1 + k % 10
        report = verify_whitney(whitney_partition(G, depth), tolerances)
        passed = passed and report.passed
        worst_distance = min(worst_distance, report.worst_distance_margin)
        worst_separation = min(worst_separation, report.worst_separation_margin)
    return CheckResult(
        "whitney_partition",
        passed,
        min(worst_distance, worst_separation),
        cases,
        {"distance_margin": worst_distance, "separation_margin": worst_separation},
    )


def check_theorem1(tolerances: Tolerances) -> CheckResult:
    """Seed {0} at depth 6: the truncated transforms of 1_E at 0 reach 5"""
    construction = thm1_construct(
        ExceptionalSeed.around([0.0]), 6, tolerances=tolerances
    )
    witness = thm1_witness(construction, 0.0)
    margin = witness.max_value - 5.0
    return CheckResult(
        "theorem1_witness",
        witness.passed and margin >= 0,
        margin,
        1,
        {"max_value": witness.max_value, "max_A_bound": max(witness.a_bounds)},
    )


def check_theorem2(tolerances: Tolerances) -> CheckResult:
    """
    Seed {0} at depth 5: H_eps f(0) reaches sum_(n=2..5) (1 - 2^-n) - 1 with
    f continuous
    """
    construction = thm2_construct(
        ExceptionalSeed.around([0.0]), 5, tolerances=tolerances
    )
    witness = thm2_witness(construction, 0.0)
    target = math.fsum(1.0 - 2.0**-n for n in range(2, 6)) - 1.0
    margin = witness.max_value - target
    continuous = construction.f.is_continuous()
    return CheckResult(
        "theorem2_witness",
        continuous and witness.passed and margin >= 0,
        margin,
        1,
        {
            "max_value": witness.max_value,
            "target": target,
            "max_A_bound": max(witness.a_bounds),
        },
    )


def check_lemma4() -> CheckResult:
    table = lemma4_divergence_check(40, 12)
    margin = min(bound - value for _, value, bound in table.rows)
    last = table.rows[-1][1]
    return CheckResult(
        "lemma4_divergence",
        table.passed and last < -0.5,
        min(margin, -0.5 - last),
        len(table.rows),
        {"value_at_12": last},
    )


def check_kk(tolerances: Tolerances) -> CheckResult:
    F = FiniteOpenSet.from_pairs([(0.0, 0.1)])
    result = kk_construct(F, tolerances=tolerances)
    return CheckResult(
        "kk_partial_sums",
        result.passed,
        result.min_margin,
        1,
        {
            "m": float(result.m),
            "degree": float(result.degree),
            "bound": result.bound,
            "nominal_bound": result.nominal_bound,
            "interval_margin": result.interval_margin,
            "measure_error": result.measure_error,
        },
    )


def verify_all(
    seed: int = 0,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cases: Optional[Mapping[str, int]] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> VerificationSummary:
    """
    Run the whole corpus sequentially

    Args:
        seed (int): numpy Generator seed
        cases (dict, optional): case counts overriding DEFAULT_CASES
        progress (callable, optional): called with the name of each check

    Returns:
        VerificationSummary: one CheckResult per identity

    Raises:
        ConfigError: unknown or nonpositive case counts
    """
    counts = dict(DEFAULT_CASES)
    for key, value in (cases or {}).items():
        if key not in counts:
            raise ConfigError(f"verify_all: unknown case group {key!r}")
        if not isinstance(value, int) or value < 1:
            raise ConfigError(
                f"verify_all: case count for {key} must be a positive integer"
            )
        counts[key] = value

    rng = np.random.default_rng(seed)
    checks: List[Tuple[str, Callable[[], CheckResult]]] = [
        ("oracle", lambda: check_oracle(rng, counts["oracle"], tolerances)),
        ("level_set", lambda: check_level_sets(rng, counts["level_set"], tolerances)),
        (
            "stein_weiss",
            lambda: check_stein_weiss(rng, counts["stein_weiss"], tolerances),
        ),
        ("whitney", lambda: check_whitney(rng, counts["whitney"], tolerances)),
        ("theorem1", lambda: check_theorem1(tolerances)),
        ("theorem2", lambda: check_theorem2(tolerances)),
        ("lemma4", check_lemma4),
        ("kk", lambda: check_kk(tolerances)),
    ]
    summary = VerificationSummary(seed)
    for name, check in checks:
        if progress is not None:
            progress(name)
        try:
            result = check()
        except (ConstructionError, ConvergenceError) as err:
            logger.warning(f"verify_all: {name} raised {err}")
            result = CheckResult(name, False, None, 0, {"error": str(err)})
        logger.debug(
            f"verify_all: {result.name} passed={result.passed}"
            f" margin={result.worst_margin}"
        )
        summary.checks.append(result)
    return summary
