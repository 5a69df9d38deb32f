import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .constants_and_enums import DEFAULT_TOLERANCES, KernelNormalization, Tolerances
from .exceptions import ConvergenceError, InvalidIntervalError, SingularityError
from .intervals import FiniteOpenSet, Interval, difference, normalize
from .utils import log_ratio

logger = logging.getLogger(__name__)

PI = KernelNormalization.PI


@dataclass(frozen=True)
class EvaluationPoint:
    """
    Point of evaluation together with the flag marking an endpoint of the
    evaluated set, where the transform is a signed infinity
    """

    x: float
    excluded: bool

    @classmethod
    def of(cls, F: FiniteOpenSet, x: float) -> "EvaluationPoint":
        return cls(x, x in F.endpoints)


def log_kernel_sum(F: FiniteOpenSet, x: float) -> float:
    """
    Sum of ln|x - a_k| - ln|x - b_k| over the components of F, i.e. the
    integral of 1_F(t) / (x - t), with -inf at left and +inf at right endpoints
    """
    if not F:
        return 0.0
    if math.isinf(x):
        return 0.0
    terms = []
    for iv in F:
        if x == iv.a:
            return -math.inf
        if x == iv.b:
            return math.inf
        terms.append(log_ratio(x, iv.a, iv.b))
    return math.fsum(terms)


def hilbert_indicator(
    F: FiniteOpenSet, x: float, normalization: KernelNormalization = PI
) -> float:
    """
    Closed form of H1_F(x) = (1/pi) sum ln|(x - a_k) / (x - b_k)|

    Args:
        F (FiniteOpenSet): the set
        x (float): evaluation point, may be an endpoint or infinite
        normalization (KernelNormalization): PI or BARE kernel

    Returns:
        float: extended real value, -inf at a_k and +inf at b_k
    """
    return normalization.factor * log_kernel_sum(F, x)


def hilbert_indicator_many(
    F: FiniteOpenSet, xs: Sequence[float], normalization: KernelNormalization = PI
) -> np.ndarray:
    """Vectorised hilbert_indicator over an array of points"""
    xs = np.asarray(xs, dtype=float)
    total = np.zeros_like(xs)
    with np.errstate(divide="ignore"):
        for iv in F:
            above = xs > iv.b
            below = xs < iv.a
            inside = ~(above | below)
            part = np.empty_like(xs)
            part[above] = np.log1p(iv.length / (xs[above] - iv.b))
            part[below] = np.log1p(-iv.length / (iv.b - xs[below]))
            part[inside] = np.log(xs[inside] - iv.a) - np.log(iv.b - xs[inside])
            total += part
    total[np.isinf(xs)] = 0.0
    return normalization.factor * total


def _check_epsilon(eps: float, name: str) -> None:
    if not (eps > 0 and math.isfinite(eps)):
        raise ValueError(f"{name}: epsilon must be positive and finite, got {eps}")


def excise_window(F: FiniteOpenSet, x: float, eps: float) -> FiniteOpenSet:
    """F with the window (x - eps, x + eps) removed"""
    return difference(F, FiniteOpenSet((Interval(x - eps, x + eps),)))


def truncated_hilbert_indicator(
    F: FiniteOpenSet, x: float, eps: float, normalization: KernelNormalization = PI
) -> float:
    """
    H_eps 1_F(x) = (1/pi) * integral over F minus (x - eps, x + eps) of dt / (x - t)

    Returns:
        float: always finite
    """
    _check_epsilon(eps, "truncated_hilbert_indicator")
    return hilbert_indicator(excise_window(F, x, eps), x, normalization)


def tail_integral(
    F: FiniteOpenSet, x: float, eps: float, normalization: KernelNormalization = PI
) -> float:
    """(1/pi) * integral over F minus (x - eps, x + eps) of dt / |x - t|"""
    _check_epsilon(eps, "tail_integral")
    rest = excise_window(F, x, eps)
    tails = (abs(log_ratio(x, iv.a, iv.b)) for iv in rest)
    return normalization.factor * math.fsum(tails)


def default_epsilons(F: FiniteOpenSet, x: float, grid: int = 64) -> Tuple[float, ...]:
    """
    Candidate truncation levels for the maximal transform: the endpoint
    distances dilated by 1 -/+ 1e-6 and a logarithmic grid on
    [1e-9 * diam, diam], diam the distance to the farthest endpoint
    """
    distances = [abs(x - p) for p in F.endpoints if p != x]
    if not distances:
        return (1.0,)
    diam = max(distances)
    candidates = set(np.geomspace(1e-9 * diam, diam, grid).tolist())
    for d in distances:
        candidates.update((d * (1 - 1e-6), d * (1 + 1e-6)))
    return tuple(sorted(candidates))


def maximal_hilbert_indicator(
    F: FiniteOpenSet,
    x: float,
    candidate_epsilons: Optional[Sequence[float]] = None,
    normalization: KernelNormalization = PI,
) -> float:
    """
    Certified lower bound max |H_eps 1_F(x)| over a finite set of eps for
    H* 1_F(x) = sup_eps |H_eps 1_F(x)|

    Args:
        F (FiniteOpenSet): the set
        x (float): evaluation point
        candidate_epsilons (sequence, optional): truncation levels, defaults to
            default_epsilons(F, x)

    Returns:
        float: the lower bound
    """
    if candidate_epsilons is None:
        candidate_epsilons = default_epsilons(F, x)
    if len(candidate_epsilons) == 0:
        raise ValueError("maximal_hilbert_indicator: candidate list is empty")
    for eps in candidate_epsilons:
        _check_epsilon(eps, "maximal_hilbert_indicator")
    return max(
        abs(truncated_hilbert_indicator(F, x, eps, normalization))
        for eps in candidate_epsilons
    )


@dataclass(frozen=True)
class PiecewiseLinearFunction:
    """
    Continuous-between-nodes function, linear on each [nodes[i], nodes[i+1]]
    and zero outside [nodes[0], nodes[-1]]

    Attributes:
        nodes (tuple): strictly increasing abscissae
        values (tuple): finite values at the nodes
    """

    nodes: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(t) for t in self.nodes)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if len(nodes) != len(values):
            raise ValueError(
                "PiecewiseLinearFunction: nodes and values differ in length"
            )
        if len(nodes) < 2:
            raise ValueError("PiecewiseLinearFunction: at least two nodes are required")
        if not all(math.isfinite(t) for t in nodes + values):
            raise InvalidIntervalError(
                "PiecewiseLinearFunction: nodes and values must be finite"
            )
        if not all(lo < hi for lo, hi in zip(nodes, nodes[1:])):
            raise InvalidIntervalError(
                "PiecewiseLinearFunction: nodes must be strictly increasing"
            )

    @classmethod
    def zero(cls) -> "PiecewiseLinearFunction":
        return cls((0.0, 1.0), (0.0, 0.0))

    @property
    def support(self) -> Tuple[float, float]:
        return self.nodes[0], self.nodes[-1]

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values, left=0.0, right=0.0)

    def pieces(self) -> Iterator[Tuple[float, float, float, float]]:
        """Yield (t0, t1, v0, v1) for every linear piece"""
        for i in range(len(self.nodes) - 1):
            yield self.nodes[i], self.nodes[i + 1], self.values[i], self.values[i + 1]

    def is_continuous(self, tol: float = 0.0) -> bool:
        """Continuity on the line: only the support ends can jump"""
        return abs(self.values[0]) <= tol and abs(self.values[-1]) <= tol

    def scale(self, factor: float) -> "PiecewiseLinearFunction":
        return PiecewiseLinearFunction(
            self.nodes, tuple(factor * v for v in self.values)
        )

    def translate(self, shift: float) -> "PiecewiseLinearFunction":
        return PiecewiseLinearFunction(
            tuple(t + shift for t in self.nodes), self.values
        )

    def __add__(self, other: "PiecewiseLinearFunction") -> "PiecewiseLinearFunction":
        if not (self.is_continuous() and other.is_continuous()):
            raise ValueError(
                "PiecewiseLinearFunction: only functions vanishing at their"
                " support ends add"
            )
        nodes = np.union1d(self.nodes, other.nodes)
        values = self(nodes) + other(nodes)
        return PiecewiseLinearFunction(tuple(nodes), tuple(values))

    def l1_norm(self) -> float:
        total = []
        for t0, t1, v0, v1 in self.pieces():
            h = t1 - t0
            if v0 * v1 >= 0:
                total.append(0.5 * h * (abs(v0) + abs(v1)))
            else:
                total.append(0.5 * h * (v0 * v0 + v1 * v1) / (abs(v0) + abs(v1)))
        return math.fsum(total)

    def max_abs(self) -> float:
        return max(abs(v) for v in self.values)


def _linear_piece_integral(
    x: float, t0: float, t1: float, v0: float, v1: float, lo: float, hi: float
) -> float:
    # integral over [lo, hi] ⊂ [t0, t1] of (alpha t + beta) / (x - t),
    # x outside (lo, hi)
    alpha = (v1 - v0) / (t1 - t0)
    at_x = v0 + alpha * (x - t0)
    if at_x == 0.0:
        return -alpha * (hi - lo)
    return -alpha * (hi - lo) + at_x * log_ratio(x, lo, hi)


def hilbert_piecewise_linear(
    f: PiecewiseLinearFunction,
    x: float,
    eps: float = 0.0,
    normalization: KernelNormalization = PI,
) -> float:
    """
    Exact H_eps f(x) for a piecewise linear f; eps = 0 gives the principal value

    Each piece contributes -alpha (q - p) + (alpha x + beta) ln|(x - p) / (x - q)|
    over the part [p, q] left after removing (x - eps, x + eps).

    Raises:
        SingularityError: eps = 0 and x is a node where f jumps or does not vanish
            at a support end
    """
    if eps < 0 or not math.isfinite(eps):
        raise ValueError(
            f"hilbert_piecewise_linear: epsilon must be nonnegative, got {eps}"
        )
    if eps == 0.0 and x in (f.nodes[0], f.nodes[-1]) and f(x) != 0.0:
        raise SingularityError(
            f"hilbert_piecewise_linear: principal value diverges at node {x}"
        )

    window = (x - eps, x + eps) if eps > 0 else None
    total = []
    for t0, t1, v0, v1 in f.pieces():
        spans = [(t0, t1)]
        if window is not None:
            spans = [(t0, min(t1, window[0])), (max(t0, window[1]), t1)]
        elif t0 < x < t1:
            spans = [(t0, x), (x, t1)]
        for lo, hi in spans:
            if not lo < hi:
                continue
            if lo == x or hi == x:
                # principal value pairing: the log singularities of the two
                # halves cancel because f is continuous at x
                alpha = (v1 - v0) / (t1 - t0)
                at_x = v0 + alpha * (x - t0)
                far = lo if hi == x else hi
                sign = math.copysign(1.0, x - far)
                total.append(
                    -alpha * (hi - lo) + at_x * sign * math.log(abs(x - far))
                )
            else:
                total.append(_linear_piece_integral(x, t0, t1, v0, v1, lo, hi))
    return normalization.factor * math.fsum(total)


def _linear_kernel(
    x: float, t0: float, v0: float, alpha: float
) -> Callable[[float], float]:
    return lambda t: (v0 + alpha * (t - t0)) / (x - t)


def quadrature_oracle(
    source: Union[FiniteOpenSet, PiecewiseLinearFunction],
    x: float,
    eps: float,
    normalization: KernelNormalization = PI,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Independent adaptive quadrature of the truncated kernel integral, for
    checking the closed forms

    Raises:
        ConvergenceError: when scipy's quad exhausts its subdivision budget
    """
    _check_epsilon(eps, "quadrature_oracle")
    if isinstance(source, FiniteOpenSet):
        spans = [
            (iv.a, iv.b, lambda t: 1.0 / (x - t))
            for iv in excise_window(source, x, eps)
        ]
    else:
        window = normalize([(x - eps, x + eps)])
        spans = []
        for t0, t1, v0, v1 in source.pieces():
            alpha = (v1 - v0) / (t1 - t0)
            piece = difference(FiniteOpenSet((Interval(t0, t1),)), window)
            for iv in piece:
                spans.append((iv.a, iv.b, _linear_kernel(x, t0, v0, alpha)))

    if not spans:
        return 0.0
    share = tolerances.quadrature_abs_tol / len(spans)
    total = []
    for lo, hi, integrand in spans:
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                value, _ = quad(
                    integrand,
                    lo,
                    hi,
                    epsabs=share,
                    epsrel=0.0,
                    limit=tolerances.quadrature_limit,
                )
            except IntegrationWarning as err:
                raise ConvergenceError(
                    f"quadrature_oracle: {err} on ({lo}, {hi})"
                ) from err
        total.append(value)
    return normalization.factor * math.fsum(total)
