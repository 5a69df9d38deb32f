import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .constants_and_enums import DEFAULT_TOLERANCES, Tolerances
from .exceptions import EmptySetError, InvalidIntervalError

logger = logging.getLogger(__name__)

PairLike = Union["Interval", Tuple[float, float], Sequence[float]]


@dataclass(frozen=True, order=True)
class Interval:
    """Bounded open interval (a, b) with a < b"""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidIntervalError(
                f"Interval: endpoints must be finite, got ({self.a}, {self.b})"
            )
        if not self.a < self.b:
            raise InvalidIntervalError(
                f"Interval: need a < b, got ({self.a}, {self.b})"
            )

    @classmethod
    def from_pair(cls, pair: PairLike) -> "Interval":
        if isinstance(pair, Interval):
            return pair
        a, b = pair
        return cls(float(a), float(b))

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x: float) -> bool:
        return self.a < x < self.b

    def to_list(self) -> List[float]:
        return [self.a, self.b]


@dataclass(frozen=True)
class FiniteOpenSet:
    """
    Finite union of open intervals with pairwise disjoint closures, stored in
    increasing order. Use normalize() to build one from arbitrary intervals.
    """

    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self):
        intervals = tuple(Interval.from_pair(iv) for iv in self.intervals)
        object.__setattr__(self, "intervals", intervals)
        for left, right in zip(intervals, intervals[1:]):
            if not left.b < right.a:
                raise InvalidIntervalError(
                    f"FiniteOpenSet: intervals {left.to_list()} and {right.to_list()}"
                    " are not sorted with positive gap"
                )

    @classmethod
    def from_pairs(cls, pairs: Iterable[PairLike]) -> "FiniteOpenSet":
        return cls(tuple(Interval.from_pair(p) for p in pairs))

    @classmethod
    def empty(cls) -> "FiniteOpenSet":
        return cls(())

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    @property
    def lefts(self) -> np.ndarray:
        return np.array([iv.a for iv in self.intervals], dtype=float)

    @property
    def rights(self) -> np.ndarray:
        return np.array([iv.b for iv in self.intervals], dtype=float)

    @property
    def endpoints(self) -> Tuple[float, ...]:
        return tuple(p for iv in self.intervals for p in (iv.a, iv.b))

    @property
    def measure(self) -> float:
        return math.fsum(iv.length for iv in self.intervals)

    @property
    def infimum(self) -> float:
        self._require_nonempty("infimum")
        return self.intervals[0].a

    @property
    def supremum(self) -> float:
        self._require_nonempty("supremum")
        return self.intervals[-1].b

    @property
    def diameter(self) -> float:
        return self.supremum - self.infimum if self else 0.0

    def _require_nonempty(self, name: str) -> None:
        if not self.intervals:
            raise EmptySetError(f"FiniteOpenSet.{name}: the set is empty")

    def component_index(self, x: float) -> Optional[int]:
        """Index of the component containing x, None if x is not in the set"""
        lefts = self.lefts
        k = int(np.searchsorted(lefts, x, side="right")) - 1
        if k >= 0 and self.intervals[k].contains(x):
            return k
        return None

    def contains_point(self, x: float) -> bool:
        return self.component_index(x) is not None

    def contains_set(self, other: "FiniteOpenSet") -> bool:
        """Exact inclusion other ⊂ self"""
        for iv in other:
            k = self.component_index(iv.midpoint)
            if k is None:
                return False
            host = self.intervals[k]
            if iv.a < host.a or iv.b > host.b:
                return False
        return True

    def distance_to_complement(self, x: float) -> float:
        k = self.component_index(x)
        if k is None:
            return 0.0
        iv = self.intervals[k]
        return min(x - iv.a, iv.b - x)

    def translate(self, shift: float) -> "FiniteOpenSet":
        return FiniteOpenSet(tuple(Interval(iv.a + shift, iv.b + shift) for iv in self))

    def dilate(self, scale: float) -> "FiniteOpenSet":
        if not scale > 0:
            raise ValueError(
                f"FiniteOpenSet.dilate: scale must be positive, got {scale}"
            )
        return FiniteOpenSet(tuple(Interval(iv.a * scale, iv.b * scale) for iv in self))

    def reflect(self) -> "FiniteOpenSet":
        """Image under x -> -x"""
        return FiniteOpenSet(
            tuple(Interval(-iv.b, -iv.a) for iv in reversed(self.intervals))
        )

    def to_json(self) -> List[List[float]]:
        return [iv.to_list() for iv in self.intervals]

    @classmethod
    def from_json(cls, payload: Sequence[Sequence[float]]) -> "FiniteOpenSet":
        return normalize(Interval.from_pair(p) for p in payload)


def normalize(raw: Iterable[PairLike], require_nonempty: bool = False) -> FiniteOpenSet:
    """
    Canonical form of a union of open intervals

    Overlapping and touching intervals are merged. Endpoints are compared
    exactly, so nearly touching intervals stay separate.

    Args:
        raw (iterable): intervals or (a, b) pairs
        require_nonempty (bool): raise EmptySetError on empty input

    Returns:
        FiniteOpenSet: sorted, closure-disjoint union
    """
    items = sorted(Interval.from_pair(p) for p in raw)
    if not items:
        if require_nonempty:
            raise EmptySetError("normalize: a nonempty set is required")
        return FiniteOpenSet.empty()

    merged: List[Tuple[float, float]] = []
    cur_a, cur_b = items[0].a, items[0].b
    for iv in items[1:]:
        if iv.a <= cur_b:
            if iv.a == cur_b:
                logger.debug(f"normalize: merging touching intervals at {cur_b}")
            cur_b = max(cur_b, iv.b)
        else:
            merged.append((cur_a, cur_b))
            cur_a, cur_b = iv.a, iv.b
    merged.append((cur_a, cur_b))
    return FiniteOpenSet(tuple(Interval(a, b) for a, b in merged))


def measure(F: FiniteOpenSet) -> float:
    return F.measure


def union(F: FiniteOpenSet, G: FiniteOpenSet) -> FiniteOpenSet:
    return normalize(list(F.intervals) + list(G.intervals))


def intersection(F: FiniteOpenSet, G: FiniteOpenSet) -> FiniteOpenSet:
    pieces: List[Interval] = []
    i = j = 0
    while i < len(F) and j < len(G):
        f, g = F.intervals[i], G.intervals[j]
        lo, hi = max(f.a, g.a), min(f.b, g.b)
        if lo < hi:
            pieces.append(Interval(lo, hi))
        if f.b < g.b:
            i += 1
        else:
            j += 1
    return normalize(pieces)


def difference(F: FiniteOpenSet, G: FiniteOpenSet) -> FiniteOpenSet:
    """F minus the closure of G (equal to F minus G up to finitely many points)"""
    pieces: List[Interval] = []
    for f in F:
        lo = f.a
        for g in G:
            if g.b <= lo:
                continue
            if g.a >= f.b:
                break
            if g.a > lo:
                pieces.append(Interval(lo, g.a))
            lo = max(lo, g.b)
            if lo >= f.b:
                break
        if lo < f.b:
            pieces.append(Interval(lo, f.b))
    return normalize(pieces)


def symm_diff_measure(F: FiniteOpenSet, G: FiniteOpenSet) -> float:
    """|F △ G|"""
    return max(0.0, F.measure + G.measure - 2.0 * intersection(F, G).measure)


@dataclass(frozen=True)
class WhitneyCell:
    """
    Half-open dyadic cell [left, right) of a Whitney partition

    Attributes:
        left (float): left end
        right (float): right end
        component (int): index of the component of G holding the cell
        level (int): dyadic level j >= 1
        side (int): -1 for the cells accumulating at the left end of the
                    component, +1 for the right end
    """

    left: float
    right: float
    component: int
    level: int
    side: int

    @property
    def length(self) -> float:
        return self.right - self.left

    def as_interval(self) -> Interval:
        return Interval(self.left, self.right)


def cell_distance(first: WhitneyCell, second: WhitneyCell) -> float:
    return max(0.0, second.left - first.right, first.left - second.right)


@dataclass(frozen=True)
class WhitneyPartition:
    """
    Truncated Whitney partition of an open set G

    Cells are enumerated by (level, component, side), which is the index k used
    by the geometric budgets of the exceptional set constructions.

    Attributes:
        source (FiniteOpenSet): the partitioned set G
        cells (tuple): the WhitneyCell family
        neighbours (tuple): per cell, (index of I_k^-, index of I_k^+), None
                            where the truncation removed the neighbour
        depth (int): dyadic truncation level
    """

    source: FiniteOpenSet
    cells: Tuple[WhitneyCell, ...]
    neighbours: Tuple[Tuple[Optional[int], Optional[int]], ...]
    depth: int

    def __len__(self) -> int:
        return len(self.cells)

    def neighbourhood(self, k: int) -> Tuple[int, ...]:
        """Indices of the cells forming I_k* = I_k ∪ I_k^- ∪ I_k^+"""
        lower, upper = self.neighbours[k]
        return tuple(i for i in (lower, k, upper) if i is not None)

    def neighbourhood_set(self, k: int) -> FiniteOpenSet:
        return normalize(self.cells[i].as_interval() for i in self.neighbourhood(k))

    def cell_index(self, x: float) -> Optional[int]:
        for k, cell in enumerate(self.cells):
            if cell.left <= x < cell.right:
                return k
        return None

    @property
    def covered(self) -> FiniteOpenSet:
        return normalize(cell.as_interval() for cell in self.cells)

    @property
    def remainder_measure(self) -> float:
        return self.source.measure * 2.0**-self.depth


def whitney_partition(G: FiniteOpenSet, depth: int) -> WhitneyPartition:
    """
    Dyadic Whitney cells [a + L/2^(j+1), a + L/2^j) and [b - L/2^j, b - L/2^(j+1)),
    j = 1..depth, of every component (a, b) of G, L = b - a

    Args:
        G (FiniteOpenSet): nonempty open set
        depth (int): truncation level

    Returns:
        WhitneyPartition: cells with adjacency links
    """
    if not G:
        raise EmptySetError("whitney_partition: G must be nonempty")
    if depth < 1:
        raise ValueError(f"whitney_partition: depth must be >= 1, got {depth}")

    cells: List[WhitneyCell] = []
    for j in range(1, depth + 1):
        for c, iv in enumerate(G):
            length = iv.length
            near_end, far_end = length / 2 ** (j + 1), length / 2**j
            cells.append(WhitneyCell(iv.a + near_end, iv.a + far_end, c, j, -1))
            cells.append(WhitneyCell(iv.b - far_end, iv.b - near_end, c, j, 1))

    neighbours: List[List[Optional[int]]] = [[None, None] for _ in cells]
    for c in range(len(G)):
        members = sorted(
            (k for k, cell in enumerate(cells) if cell.component == c),
            key=lambda k: cells[k].left,
        )
        for lower, upper in zip(members, members[1:]):
            neighbours[upper][0] = lower
            neighbours[lower][1] = upper

    return WhitneyPartition(
        source=G,
        cells=tuple(cells),
        neighbours=tuple((lo, hi) for lo, hi in neighbours),
        depth=depth,
    )


@dataclass
class WhitneyReport:
    passed: bool
    disjoint: bool
    worst_distance_margin: float
    worst_separation_margin: float
    violations: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "disjoint": self.disjoint,
            "worst_distance_margin": self.worst_distance_margin,
            "worst_separation_margin": self.worst_separation_margin,
            "violations": list(self.violations),
        }


def _rounding(host: Interval) -> float:
    # endpoints a + L/2^j carry one rounding of the component scale
    return 4 * math.ulp(max(abs(host.a), abs(host.b)))


def verify_whitney(
    partition: WhitneyPartition, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> WhitneyReport:
    """
    Check disjointness, dist(I_k, G^c) = |I_k| and the separation
    dist(I_j, I_k) >= |I_j| / 2 for every pair with I_j outside I_k*

    Margins are reported in units of the cell length; the distance identity
    tolerates a relative rounding slack of tolerances.whitney_tol.

    Returns:
        WhitneyReport: pass/fail with the worst margins
    """
    cells = partition.cells
    source = partition.source
    slack = tolerances.whitney_tol
    violations: List[str] = []

    order = sorted(range(len(cells)), key=lambda k: cells[k].left)
    disjoint = all(
        cells[lo].right <= cells[hi].left for lo, hi in zip(order, order[1:])
    )
    if not disjoint:
        violations.append("cells overlap")

    worst_distance = math.inf
    for k, cell in enumerate(cells):
        host = source.intervals[cell.component]
        if cell.left < host.a or cell.right > host.b:
            violations.append(f"cell {k} leaves its component")
            worst_distance = -math.inf
            continue
        distance = min(cell.left - host.a, host.b - cell.right)
        margin = -abs(distance - cell.length) / cell.length
        worst_distance = min(worst_distance, margin)
        if -margin > slack + _rounding(host) / cell.length:
            violations.append(
                f"cell {k}: dist to complement {distance!r}"
                f" != length {cell.length!r}"
            )

    worst_separation = math.inf
    for k in range(len(cells)):
        near = set(partition.neighbourhood(k))
        for j in range(len(cells)):
            if j in near:
                continue
            length = cells[j].length
            margin = (cell_distance(cells[j], cells[k]) - length / 2) / length
            worst_separation = min(worst_separation, margin)
            rounding = max(
                _rounding(source.intervals[cells[i].component]) for i in (j, k)
            )
            if margin < -slack - rounding / length:
                violations.append(f"cells {j}, {k}: separation below |I_j|/2")

    return WhitneyReport(
        passed=not violations,
        disjoint=disjoint,
        worst_distance_margin=worst_distance,
        worst_separation_margin=worst_separation,
        violations=violations,
    )
