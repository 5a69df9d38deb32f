"""
Finite depth exceptional set constructions

A finite point seed stands in for the null set. Every stage shrinks an open
set around the seed, inverts a sublevel set of its Hilbert transform and keeps
the diagnostics that certify the stage. Witnesses then evaluate truncated
transforms at the seed points along a shrinking sequence of windows.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants_and_enums import (
    DEFAULT_TOLERANCES,
    LAMBDA_SATURATION,
    KernelNormalization,
    Tolerances,
)
from .distribution import superlevel_set_abs
from .exceptions import ConstructionError
from .hilbert import (
    PiecewiseLinearFunction,
    hilbert_indicator,
    hilbert_piecewise_linear,
    tail_integral,
    truncated_hilbert_indicator,
)
from .intervals import (
    FiniteOpenSet,
    Interval,
    WhitneyPartition,
    intersection,
    normalize,
    whitney_partition,
)
from .level_set import (
    LevelBound,
    LevelSetConfig,
    RoundtripReport,
    mu_from_lambda,
    sublevel_set,
    verify_roundtrip,
)

logger = logging.getLogger(__name__)

BARE = KernelNormalization.BARE
PI = KernelNormalization.PI

MIN_WHITNEY_DEPTH = 6
MAX_DEPTH_BUMPS = 16


@dataclass(frozen=True)
class ExceptionalSeed:
    """
    Finite point set e inside an open ambient set G

    Attributes:
        points (tuple): strictly increasing reals
        ambient (FiniteOpenSet): G, every point strictly inside a component
    """

    points: Tuple[float, ...]
    ambient: FiniteOpenSet

    def __post_init__(self):
        points = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", points)
        if not all(lo < hi for lo, hi in zip(points, points[1:])):
            raise ValueError("ExceptionalSeed: points must be strictly increasing")
        for p in points:
            if not self.ambient.contains_point(p):
                raise ValueError(
                    f"ExceptionalSeed: point {p} is not inside the ambient set"
                )

    @classmethod
    def around(cls, points: Sequence[float], radius: float = 0.5) -> "ExceptionalSeed":
        """Seed with ambient set the union of (p - radius, p + radius)"""
        ordered = sorted(set(float(p) for p in points))
        ambient = normalize((p - radius, p + radius) for p in ordered)
        return cls(tuple(ordered), ambient)

    def within(self, G: FiniteOpenSet) -> "ExceptionalSeed":
        return ExceptionalSeed(self.points, G)

    def to_dict(self) -> dict:
        return {"points": list(self.points), "ambient": self.ambient.to_json()}


def cell_budgets(
    partition: WhitneyPartition, gamma: float, deltas: Sequence[float]
) -> np.ndarray:
    """
    min(pi gamma |I_j| / 2^(j+2), delta_j (e^(pi gamma) - 1) / (4 e^(pi gamma / 2)))
    per cell, j counted from 1
    """
    if len(deltas) != len(partition):
        raise ValueError(
            f"cell_budgets: {len(deltas)} deltas for {len(partition)} cells"
        )
    lengths = np.array([cell.length for cell in partition.cells])
    index = np.arange(1, len(partition) + 1, dtype=float)
    first = math.pi * gamma * lengths / 2.0 ** (index + 2)
    # (e^t - 1) / (4 e^(t/2)) = sinh(t / 2) / 2
    second = np.asarray(deltas, dtype=float) * math.sinh(0.5 * math.pi * gamma) / 2.0
    return np.minimum(first, second)


def lemma2_select(
    G: FiniteOpenSet,
    partition: WhitneyPartition,
    seed: ExceptionalSeed,
    gamma: float,
    deltas: Sequence[float],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FiniteOpenSet:
    """
    Finite-open F with seed ⊂ F ⊂ G and |F ∩ I_j*| below the cell budgets

    F is a union of symmetric intervals around the seed points. Their half
    widths start at half the distance to the edge of the Whitney cells and are
    halved, seed by seed, while a neighbourhood I_j* over budget meets them.

    Args:
        G (FiniteOpenSet): open set containing the seed
        partition (WhitneyPartition): truncated Whitney partition of G
        seed (ExceptionalSeed): the points
        gamma (float): level of the off-G estimate
        deltas (sequence): one positive budget per cell

    Returns:
        FiniteOpenSet: the selected F

    Raises:
        ConstructionError: a seed point falls outside the cells of the partition
    """
    if partition.source != G:
        raise ValueError("lemma2_select: the partition does not belong to G")
    if not gamma > 0:
        raise ValueError(f"lemma2_select: gamma must be positive, got {gamma}")
    if any(not d > 0 for d in deltas):
        raise ValueError("lemma2_select: deltas must be positive")
    if not seed.points:
        return FiniteOpenSet.empty()

    covered = partition.covered
    half: Dict[float, float] = {}
    for p in seed.points:
        if not covered.contains_point(p):
            raise ConstructionError(
                f"lemma2_select: seed {p} lies outside the Whitney cells"
                f" at depth {partition.depth}"
            )
        half[p] = 0.5 * covered.distance_to_complement(p)

    budgets = cell_budgets(partition, gamma, deltas)
    hoods = [partition.neighbourhood_set(j) for j in range(len(partition))]
    for iteration in range(tolerances.bisection_max_iter):
        F = normalize((p - h, p + h) for p, h in half.items())
        over = [
            hood
            for j, hood in enumerate(hoods)
            if intersection(F, hood).measure >= budgets[j]
        ]
        if not over:
            logger.debug(
                f"lemma2_select: {len(F)} intervals after {iteration} halvings"
            )
            return F
        for p, h in half.items():
            piece = FiniteOpenSet((Interval(p - h, p + h),))
            if any(intersection(piece, hood) for hood in over):
                half[p] = 0.5 * h
    raise ConstructionError(
        "lemma2_select: cell budgets not met after"
        f" {tolerances.bisection_max_iter} halvings"
    )


@dataclass
class Lemma2Report:
    """
    Attributes:
        budget_margin (float): min over cells of budget_j - |F ∩ I_j*|
        off_g_contained (bool): {|H1_F| > gamma} ⊂ G, exact
        cell_margin (float): min over cells of delta_k - |I_k ∩ {|H1_F| > gamma}|
    """

    budget_margin: float
    off_g_contained: bool
    cell_margin: float

    @property
    def passed(self) -> bool:
        return self.budget_margin > 0 and self.off_g_contained and self.cell_margin >= 0

    def to_dict(self) -> dict:
        return {
            "budget_margin": self.budget_margin,
            "off_g_contained": self.off_g_contained,
            "cell_margin": self.cell_margin,
            "passed": self.passed,
        }


def lemma2_verify(
    F: FiniteOpenSet,
    G: FiniteOpenSet,
    partition: WhitneyPartition,
    gamma: float,
    deltas: Sequence[float],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Lemma2Report:
    """
    Check a lemma2_select result against its budgets with the exact level set
    of |H1_F|
    """
    budgets = cell_budgets(partition, gamma, deltas)
    used = np.array(
        [
            intersection(F, partition.neighbourhood_set(j)).measure
            for j in range(len(partition))
        ]
    )
    level = superlevel_set_abs(F, gamma, PI, tolerances)
    per_cell = np.array(
        [
            intersection(level, FiniteOpenSet((cell.as_interval(),))).measure
            for cell in partition.cells
        ]
    )
    return Lemma2Report(
        budget_margin=float(np.min(budgets - used)),
        off_g_contained=G.contains_set(level),
        cell_margin=float(np.min(np.asarray(deltas) - per_cell)),
    )


def tail_windows(
    G: FiniteOpenSet, points: Sequence[float]
) -> List[Tuple[float, float]]:
    """
    (x, eps) pairs whose window (x - eps, x + eps) leaves G: points outside G
    and on its boundary, and interior points with eps just above their
    distance to the complement
    """
    windows: List[Tuple[float, float]] = []
    for iv in G:
        L = iv.length
        for x in (iv.a - 0.25 * L, iv.a, iv.b, iv.b + 0.25 * L):
            windows.extend(((x, 1e-3 * L), (x, 0.25 * L)))
        for x in (iv.midpoint, iv.a + 0.1 * L, iv.b - 0.1 * L):
            windows.append((x, G.distance_to_complement(x) * (1 + 1e-9)))
    for x in points:
        d = G.distance_to_complement(x)
        if d > 0:
            windows.append((x, d * (1 + 1e-9)))
    return windows



def _window_inside(G: FiniteOpenSet, x: float, eps: float) -> bool:
    return G.contains_set(FiniteOpenSet((Interval(x - eps, x + eps),)))


@dataclass
class Lemma3Report:
    """
    Attributes:
        seed_in_f (bool): every seed point lies in F
        f_in_g (bool): F ⊂ G
        e_in_g (bool): E ⊂ G
        e_disjoint_f (bool): E ∩ F = ∅
        roundtrip (RoundtripReport): F inside the superlevel set of H1_E
        tail_margin (float): delta minus the worst tail over the windows
        worst_window (tuple): the (x, eps) realising it
        lemma2 (Lemma2Report): the selection check
    """

    seed_in_f: bool
    f_in_g: bool
    e_in_g: bool
    e_disjoint_f: bool
    roundtrip: RoundtripReport
    tail_margin: float
    worst_window: Optional[Tuple[float, float]]
    lemma2: Lemma2Report

    @property
    def passed(self) -> bool:
        return (
            self.seed_in_f
            and self.f_in_g
            and self.e_in_g
            and self.e_disjoint_f
            and self.roundtrip.passed
            and self.tail_margin > 0
            and self.lemma2.passed
        )

    def to_dict(self) -> dict:
        return {
            "seed_in_f": self.seed_in_f,
            "f_in_g": self.f_in_g,
            "e_in_g": self.e_in_g,
            "e_disjoint_f": self.e_disjoint_f,
            "roundtrip": self.roundtrip.to_dict(),
            "tail_margin": self.tail_margin,
            "worst_window": list(self.worst_window) if self.worst_window else None,
            "lemma2": self.lemma2.to_dict(),
            "passed": self.passed,
        }


@dataclass
class Lemma3Result:
    F: FiniteOpenSet
    E: FiniteOpenSet
    config: LevelSetConfig
    partition: WhitneyPartition
    report: Lemma3Report


def lemma3_step(
    G: FiniteOpenSet,
    seed: ExceptionalSeed,
    lam: float,
    delta: float,
    depth: int = MIN_WHITNEY_DEPTH,
    windows: Sequence[Tuple[float, float]] = (),
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Lemma3Result:
    """
    One shrinking stage: F from lemma2_select with gamma = |mu| and
    delta_k = pi delta |I_k| / 2^(k+1), then E = {H1_F < mu}

    The Whitney depth is raised from `depth` while a seed point or E falls
    outside the truncated cells.

    Args:
        G (FiniteOpenSet): ambient open set
        seed (ExceptionalSeed): points inside G
        lam (float): superlevel of H1_E on F
        delta (float): bound on the (1/pi) normalised tails of E off G
        depth (int): initial Whitney depth
        windows (sequence): extra (x, eps) tail pairs, each window must leave G

    Returns:
        Lemma3Result: F, E, the level set configuration and the report

    Raises:
        ConstructionError: no depth within the bump budget works
    """
    if not seed.points:
        raise ConstructionError("lemma3_step: the seed is empty")
    if not delta > 0:
        raise ValueError(f"lemma3_step: delta must be positive, got {delta}")
    seed = seed.within(G)
    gamma = abs(mu_from_lambda(lam).mu)

    for level in range(depth, depth + MAX_DEPTH_BUMPS + 1):
        partition = whitney_partition(G, level)
        lengths = np.array([cell.length for cell in partition.cells])
        index = np.arange(1, len(partition) + 1)
        deltas = math.pi * delta * lengths / 2.0 ** (index + 1)
        try:
            F = lemma2_select(G, partition, seed, gamma, deltas, tolerances)
        except ConstructionError as err:
            logger.debug(f"lemma3_step: depth {level} rejected, {err}")
            continue
        config = sublevel_set(F, lam, tolerances)
        if partition.covered.contains_set(config.E):
            break
        logger.debug(f"lemma3_step: depth {level} rejected, E leaves the Whitney cells")
    else:
        raise ConstructionError(
            f"lemma3_step: no Whitney depth in [{depth}, {depth + MAX_DEPTH_BUMPS}]"
            " works"
        )

    E = config.E
    family = [
        p
        for p in list(tail_windows(G, seed.points)) + list(windows)
        if not _window_inside(G, *p)
    ]
    tails = [tail_integral(E, x, eps, PI) for x, eps in family]
    worst = int(np.argmax(tails)) if tails else None
    report = Lemma3Report(
        seed_in_f=all(F.contains_point(p) for p in seed.points),
        f_in_g=G.contains_set(F),
        e_in_g=G.contains_set(E),
        e_disjoint_f=not intersection(E, F),
        roundtrip=verify_roundtrip(config, BARE, tolerances),
        tail_margin=delta - (tails[worst] if worst is not None else 0.0),
        worst_window=family[worst] if worst is not None else None,
        lemma2=lemma2_verify(F, G, partition, gamma, deltas, tolerances),
    )
    if not report.passed:
        logger.warning(f"lemma3_step: stage checks failed, {report.to_dict()}")
    return Lemma3Result(F, E, config, partition, report)


@dataclass
class StageRecord:
    """
    One stage of a nested construction

    Attributes:
        index (int): stage n >= 1
        F (FiniteOpenSet): F_n, nested inside F_(n-1) and holding the seed
        E (FiniteOpenSet): E_n ⊂ F_(n-1) minus F_n
        bound (LevelBound): levels of the stage
        tail_bound (float): delta handed to lemma3_step
        whitney_depth (int): depth of the partition of F_(n-1) that was used
        report (Lemma3Report): stage checks
        approximation_error (float, optional): max |H f_n(b_k) - H1_(E_n)(b_k)|
        level_margin (float, optional): min of H f_n - (2^n - 1) over F_n samples
        tail_window_max (float, optional): max |H_eps f_n| / 2^n over tail windows
    """

    index: int
    F: FiniteOpenSet
    E: FiniteOpenSet
    bound: LevelBound
    tail_bound: float
    whitney_depth: int
    report: Lemma3Report
    approximation_error: Optional[float] = None
    level_margin: Optional[float] = None
    tail_window_max: Optional[float] = None

    def to_dict(self) -> dict:
        record = {
            "n": self.index,
            "F": self.F.to_json(),
            "E": self.E.to_json(),
            **self.bound.to_dict(),
            "tail_bound": self.tail_bound,
            "whitney_depth": self.whitney_depth,
            "report": self.report.to_dict(),
        }
        for key in ("approximation_error", "level_margin", "tail_window_max"):
            if getattr(self, key) is not None:
                record[key] = getattr(self, key)
        return record


def _run_stages(
    seed: ExceptionalSeed,
    depth: int,
    level_of: Callable[[int], float],
    delta_of: Callable[[int], float],
    tolerances: Tolerances,
) -> List[StageRecord]:
    if depth < 1:
        raise ValueError(f"_run_stages: depth must be >= 1, got {depth}")
    if not seed.points:
        raise ConstructionError("_run_stages: the seed is empty")
    stages: List[StageRecord] = []
    previous = seed.ambient
    for n in range(1, depth + 1):
        lam, delta = level_of(n), delta_of(n)
        result = lemma3_step(
            previous,
            seed,
            lam,
            delta,
            depth=max(MIN_WHITNEY_DEPTH, n + 4),
            tolerances=tolerances,
        )
        F, E = result.F, result.E
        nested = previous.contains_set(F)
        if not nested or not all(F.contains_point(p) for p in seed.points):
            raise ConstructionError(f"_run_stages: F_{n} is not nested around the seed")
        if not previous.contains_set(E) or intersection(E, F):
            raise ConstructionError(f"_run_stages: E_{n} leaves F_{n - 1} minus F_{n}")
        stages.append(
            StageRecord(
                index=n,
                F=F,
                E=E,
                bound=result.config.bound,
                tail_bound=delta,
                whitney_depth=result.partition.depth,
                report=result.report,
            )
        )
        logger.info(
            f"_run_stages: stage {n}, {len(F)} intervals,"
            f" |F|={F.measure:.3e}, |E|={E.measure:.3e}"
        )
        previous = F
    return stages


@dataclass
class Theorem1Construction:
    seed: ExceptionalSeed
    stages: List[StageRecord]
    lam: float = 1.0

    @property
    def F_sets(self) -> List[FiniteOpenSet]:
        """F_0, F_1, ..., F_N"""
        return [self.seed.ambient] + [stage.F for stage in self.stages]

    @property
    def E(self) -> FiniteOpenSet:
        """Union of the pairwise disjoint E_n"""
        return normalize(iv for stage in self.stages for iv in stage.E)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed.to_dict(),
            "lambda": self.lam,
            "stages": [stage.to_dict() for stage in self.stages],
            "E": self.E.to_json(),
        }


def thm1_construct(
    seed: ExceptionalSeed,
    depth: int,
    lam: float = 1.0,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Theorem1Construction:
    """
    N stages of lemma3_step at level lam, stage n with tails of 1_(E_n) below
    2^-n, so the tails summed over all stages stay below 1

    Args:
        seed (ExceptionalSeed): the points, with F_0 as ambient set
        depth (int): number of stages N

    Returns:
        Theorem1Construction: stages and the union E
    """
    stages = _run_stages(
        seed, depth, lambda n: lam, lambda n: 2.0**-n / math.pi, tolerances
    )
    return Theorem1Construction(seed, stages, lam)


@dataclass
class DivergenceWitness:
    """
    Truncated transforms at a point along a shrinking window sequence

    Attributes:
        x (float): evaluation point
        epsilons (list): eps_n = dist(x, complement of F_(n-1)) / 2, decreasing
        values (list): H_eps of the built object at x
        a_bounds (list): tail bound of the stages whose F_(n-1) misses the window
        b_counts (list): #{n : (x - eps, x + eps) ⊂ F_(n-1)}
        lower_bounds (list): certified lower bound of the value, counting the
            excised last stage through its tail
        nominal_bounds (list): B_count - 1 scaled to the construction
    """

    x: float
    epsilons: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    a_bounds: List[float] = field(default_factory=list)
    b_counts: List[int] = field(default_factory=list)
    lower_bounds: List[float] = field(default_factory=list)
    nominal_bounds: List[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """
        A-bounds below 1 and every value above its certified lower bound

        The nominal bound is not part of it: the stage whose F_(n-1) is the
        last to hold the window can pull the value below B_count - 1 by up to
        its tail, so nominal_reached is reported on its own.
        """
        return all(a < 1 for a in self.a_bounds) and all(
            v >= lo for v, lo in zip(self.values, self.lower_bounds)
        )

    @property
    def nominal_reached(self) -> bool:
        return all(v >= nominal for v, nominal in zip(self.values, self.nominal_bounds))

    @property
    def max_value(self) -> float:
        return max(self.values)

    def rows(self) -> List[Tuple[int, float, float, float, int]]:
        """(n, epsilon, value, A_bound, B_count) per window"""
        return [
            (n, eps, value, a, b)
            for n, (eps, value, a, b) in enumerate(
                zip(self.epsilons, self.values, self.a_bounds, self.b_counts), start=1
            )
        ]

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "epsilons": self.epsilons,
            "values": self.values,
            "A_bounds": self.a_bounds,
            "B_counts": self.b_counts,
            "lower_bounds": self.lower_bounds,
            "nominal_bounds": self.nominal_bounds,
            "nominal_reached": self.nominal_reached,
            "passed": self.passed,
        }


def witness_epsilons(F_sets: Sequence[FiniteOpenSet], x: float) -> List[float]:
    """
    Half the distance from x to the complement of F_(n-1) for n = 1..N; where x
    has left F_(n-1) the previous window is halved instead
    """
    epsilons: List[float] = []
    for F in F_sets[:-1]:
        eps = 0.5 * F.distance_to_complement(x)
        previous = epsilons[-1] if epsilons else None
        if eps == 0.0:
            eps = 0.5 * previous if previous else 1.0
        elif previous is not None and eps >= previous:
            eps = 0.5 * previous
        epsilons.append(eps)
    return epsilons


def _window_stages(F_sets: Sequence[FiniteOpenSet], x: float, eps: float) -> List[int]:
    # stages n whose F_(n-1) holds the whole window
    return [n for n in range(1, len(F_sets)) if _window_inside(F_sets[n - 1], x, eps)]


def thm1_witness(construction: Theorem1Construction, x: float) -> DivergenceWitness:
    """
    H_eps 1_E(x) along the window sequence, with the split into stages whose
    F_(n-1) holds the window (each adds more than lam once the window also
    fits in F_n) and the rest (tails below 2^-n)
    """
    F_sets = construction.F_sets
    E = construction.E
    lam = construction.lam
    witness = DivergenceWitness(x)
    for eps in witness_epsilons(F_sets, x):
        inside = _window_stages(F_sets, x, eps)
        tails = {
            stage.index: tail_integral(stage.E, x, eps, BARE)
            for stage in construction.stages
        }
        a_bound = math.fsum(t for n, t in tails.items() if n not in inside)
        last_tail = tails[inside[-1]] if inside else 0.0
        full = max(len(inside) - 1, 0)
        witness.epsilons.append(eps)
        witness.values.append(truncated_hilbert_indicator(E, x, eps, BARE))
        witness.a_bounds.append(a_bound)
        witness.b_counts.append(len(inside))
        witness.lower_bounds.append(lam * full - a_bound - last_tail)
        witness.nominal_bounds.append(float(len(inside) - 1))
    return witness


def lemma4_phi(truncation: int = 40) -> PiecewiseLinearFunction:
    """
    Continuous phi supported in [-1, 1] whose truncated transforms at 0 tend
    to -inf: 1 - x on [0, 1], 1 - 1/(k+1) at -2^-k, linear in between

    The staircase stops at k = truncation and joins (0, 1) linearly, which
    leaves H_eps phi(0) unchanged for eps >= 2^-truncation.
    """
    if truncation < 2:
        raise ValueError(f"lemma4_phi: truncation must be >= 2, got {truncation}")
    nodes = [-(2.0**-k) for k in range(truncation + 1)] + [0.0, 1.0]
    values = [1.0 - 1.0 / (k + 1) for k in range(truncation + 1)] + [1.0, 0.0]
    return PiecewiseLinearFunction(tuple(nodes), tuple(values))


def lemma4_bound(n: int) -> float:
    """-ln 2 * sum_(k=1..n) 1/(k+1) + 1 - 2^-n"""
    harmonic = math.fsum(1.0 / (k + 1) for k in range(1, n + 1))
    return -math.log(2.0) * harmonic + 1.0 - 2.0**-n


@dataclass
class Lemma4Table:
    rows: List[Tuple[int, float, float]]

    @property
    def below_bound(self) -> bool:
        return all(value <= bound for _, value, bound in self.rows)

    @property
    def decreasing(self) -> bool:
        tail = [value for n, value, _ in self.rows if n >= 2]
        return all(b < a for a, b in zip(tail, tail[1:]))

    @property
    def passed(self) -> bool:
        return self.below_bound and self.decreasing

    def to_dict(self) -> dict:
        return {
            "rows": [{"n": n, "value": v, "bound": b} for n, v, b in self.rows],
            "passed": self.passed,
        }


def lemma4_divergence_check(truncation: int = 40, n_max: int = 12) -> Lemma4Table:
    """H_(2^-n) phi(0) in closed form against lemma4_bound(n), n = 1..n_max"""
    if not 1 <= n_max < truncation:
        raise ValueError(
            "lemma4_divergence_check: need 1 <= n_max < truncation,"
            f" got {n_max}"
        )
    phi = lemma4_phi(truncation)
    rows = [
        (n, hilbert_piecewise_linear(phi, 0.0, 2.0**-n, BARE), lemma4_bound(n))
        for n in range(1, n_max + 1)
    ]
    return Lemma4Table(rows)


MAX_RAMP_HALVINGS = 64


def trapezoid_approximant(
    E: FiniteOpenSet, F: FiniteOpenSet, eta: float
) -> Tuple[PiecewiseLinearFunction, float]:
    """
    Continuous 0 <= f <= 1_E: a trapezoid on every component of E with ramps of
    eta/8 of the component length, halved until |H f(b_k) - H1_E(b_k)| < eta at
    every right endpoint b_k of F

    Returns:
        tuple: the function and the reached endpoint error

    Raises:
        ConstructionError: the ramps cannot be made narrow enough
    """
    targets = [hilbert_indicator(E, b, BARE) for b in F.rights]
    ratio = eta / 8.0
    for _ in range(MAX_RAMP_HALVINGS):
        nodes: List[float] = []
        values: List[float] = []
        for iv in E:
            r = ratio * iv.length
            nodes.extend((iv.a, iv.a + r, iv.b - r, iv.b))
            values.extend((0.0, 1.0, 1.0, 0.0))
        try:
            f = PiecewiseLinearFunction(tuple(nodes), tuple(values))
        except ValueError as err:
            raise ConstructionError(
                f"trapezoid_approximant: ramps collapsed, {err}"
            ) from err
        error = max(
            abs(hilbert_piecewise_linear(f, b, 0.0, BARE) - target)
            for b, target in zip(F.rights, targets)
        )
        if error < eta:
            logger.debug(
                f"trapezoid_approximant: ramp ratio {ratio:.3e}, error {error:.3e}"
            )
            return f, error
        ratio *= 0.5
    raise ConstructionError(f"trapezoid_approximant: error stays above {eta}")


@dataclass
class Theorem2Construction:
    seed: ExceptionalSeed
    stages: List[StageRecord]
    components: List[PiecewiseLinearFunction]
    f: PiecewiseLinearFunction
    eta: float

    @property
    def F_sets(self) -> List[FiniteOpenSet]:
        return [self.seed.ambient] + [stage.F for stage in self.stages]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed.to_dict(),
            "eta": self.eta,
            "stages": [stage.to_dict() for stage in self.stages],
            "f": {"nodes": list(self.f.nodes), "values": list(self.f.values)},
        }


def _sample_points(F: FiniteOpenSet, count: int) -> np.ndarray:
    inner = [np.linspace(iv.a, iv.b, count + 2)[1:-1] for iv in F]
    return np.concatenate(inner + [F.rights])


def thm2_construct(
    seed: ExceptionalSeed,
    depth: int,
    eta: float = 1.0,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Theorem2Construction:
    """
    Continuous f = sum_n f_n / 2^n with f_n a trapezoid approximant of 1_(E_n),
    stage n at level 2^n

    Stage tails are kept below 1/pi in the (1/pi) normalisation, that is below
    1 for the bare kernel.

    Args:
        seed (ExceptionalSeed): the points, with F_0 as ambient set
        depth (int): number of stages N, 2^N must stay below the saturation level
        eta (float): allowed endpoint error of each approximant, 0 < eta <= 1

    Returns:
        Theorem2Construction: stages, the f_n and their weighted sum

    Raises:
        ConstructionError: saturation, or an approximant misses H f_n > 2^n - 1 on F_n
    """
    if not 0 < eta <= 1:
        raise ValueError(f"thm2_construct: eta must lie in (0, 1], got {eta}")
    if 2.0**depth >= LAMBDA_SATURATION:
        raise ConstructionError(
            f"thm2_construct: level 2^{depth} passes the saturation level"
            f" {LAMBDA_SATURATION:.2f}"
        )
    stages = _run_stages(
        seed, depth, lambda n: 2.0**n, lambda n: 1.0 / math.pi, tolerances
    )

    components: List[PiecewiseLinearFunction] = []
    previous = seed.ambient
    for stage in stages:
        n = stage.index
        f_n, error = trapezoid_approximant(stage.E, stage.F, eta)
        samples = _sample_points(stage.F, tolerances.interior_samples)
        reached = min(
            hilbert_piecewise_linear(f_n, float(x), 0.0, BARE) for x in samples
        )
        margin = reached - (2.0**n - 1.0)
        if not margin > 0:
            raise ConstructionError(
                f"thm2_construct: H f_{n} reaches only 2^{n} - 1 + {margin:.3e}"
                f" on F_{n}"
            )
        windows = [
            p
            for p in tail_windows(previous, seed.points)
            if not _window_inside(previous, *p)
        ]
        stage.approximation_error = error
        stage.level_margin = margin
        stage.tail_window_max = max(
            (
                abs(hilbert_piecewise_linear(f_n, x, eps, BARE)) / 2.0**n
                for x, eps in windows
            ),
            default=0.0,
        )
        components.append(f_n)
        previous = stage.F

    f = components[0].scale(0.5)
    for stage, f_n in zip(stages[1:], components[1:]):
        f = f + f_n.scale(2.0**-stage.index)
    return Theorem2Construction(seed, stages, components, f, eta)


def thm2_witness(construction: Theorem2Construction, x: float) -> DivergenceWitness:
    """
    H_eps f(x) along the window sequence; stages whose F_(n-1) holds the window
    contribute more than 1 - 2^-n each, except the last one, which is bounded
    through its tail like the others
    """
    F_sets = construction.F_sets
    witness = DivergenceWitness(x)
    for eps in witness_epsilons(F_sets, x):
        inside = _window_stages(F_sets, x, eps)
        tails = {
            stage.index: 2.0**-stage.index * tail_integral(stage.E, x, eps, BARE)
            for stage in construction.stages
        }
        a_bound = math.fsum(t for n, t in tails.items() if n not in inside)
        last_tail = tails[inside[-1]] if inside else 0.0
        full = math.fsum(1.0 - construction.eta * 2.0**-n for n in inside[:-1])
        witness.epsilons.append(eps)
        witness.values.append(hilbert_piecewise_linear(construction.f, x, eps, BARE))
        witness.a_bounds.append(a_bound)
        witness.b_counts.append(len(inside))
        witness.lower_bounds.append(full - a_bound - last_tail)
        witness.nominal_bounds.append(math.fsum(1.0 - 2.0**-n for n in inside) - 1.0)
    return witness


@dataclass(frozen=True)
class ClosedSetBlock:
    """
    Block [start, end] of a closed exceptional set with its function

    Attributes:
        start (float): anchor x_k
        end (float): x_(k+1), with end - start > 1
        f (PiecewiseLinearFunction): continuous, supported in [start, end]
        correction (bool): add the phi term at the anchor
    """

    start: float
    end: float
    f: PiecewiseLinearFunction
    correction: bool = False


def thm2_closed_set_assembly(
    blocks: Sequence[ClosedSetBlock], truncation: int = 40
) -> PiecewiseLinearFunction:
    """
    g = sum_k f_k / (2^k (x_(k+1) - x_k)) + sum_k c_k 2^-k phi(x - x_k), k from 1,
    c_k = 1 on the blocks flagged for correction

    Raises:
        ConstructionError: blocks overlap, are too short, or a function leaves its block
    """
    if not blocks:
        raise ConstructionError("thm2_closed_set_assembly: no blocks")
    for block in blocks:
        if not block.end - block.start > 1:
            raise ConstructionError(
                f"thm2_closed_set_assembly: block [{block.start}, {block.end}]"
                " is too short"
            )
        lo, hi = block.f.support
        if lo < block.start or hi > block.end:
            raise ConstructionError(
                "thm2_closed_set_assembly: function leaves"
                f" [{block.start}, {block.end}]"
            )
    for first, second in zip(blocks, blocks[1:]):
        if second.start < first.end:
            raise ConstructionError("thm2_closed_set_assembly: blocks overlap")

    phi = lemma4_phi(truncation)
    g = PiecewiseLinearFunction.zero()
    for k, block in enumerate(blocks, start=1):
        g = g + block.f.scale(1.0 / (2.0**k * (block.end - block.start)))
        if block.correction:
            g = g + phi.translate(block.start).scale(2.0**-k)
    return g
