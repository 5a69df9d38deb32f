"""
Complex trigonometric polynomials with large partial sums on a set of small measure

The sublevel set E of a finite-open F carries H1_E > lambda on F. Oscillating
indicators of a slightly shrunken copy of E turn that into large modified
partial sums at every point of F, and Fejer means of the indicators give the
polynomial.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import sici

from .constants_and_enums import (
    DEFAULT_TOLERANCES,
    KernelNormalization,
    OscillationPhase,
    Tolerances,
)
from .exceptions import ConstructionError
from .hilbert import PiecewiseLinearFunction, hilbert_indicator, hilbert_indicator_many
from .intervals import FiniteOpenSet, Interval, normalize
from .level_set import sublevel_set
from .utils import gauss_legendre_pieces

logger = logging.getLogger(__name__)

BARE = KernelNormalization.BARE

# S*_m(x, f_m + i g_m) tends to KAPPA * H1_E~(x) in modulus, H1_E~ the bare log sum
KAPPA = 2.0 / math.pi**2
SEARCH_FRACTION = 0.75
BOUND_FRACTION = 2.0 / 3.0
SHRINK_LEVEL_FRACTION = 5.0 / 6.0
M_START = 16
MAX_DEGREE_FACTOR = 64
GRID_POINTS = 64
GRID_INSET = 1e-6
COEFFICIENT_CHUNK = 4096


class ComplexTrigPolynomial:
    """
    P(x) = sum_k c_k e^(ikx), stored densely for k = -n..n

    Args:
        coefficients (array-like): complex values for frequencies -n..n, odd length
    """

    def __init__(self, coefficients):
        coefficients = np.asarray(coefficients, dtype=complex).ravel()
        if coefficients.size % 2 != 1:
            raise ValueError("ComplexTrigPolynomial: need 2n + 1 coefficients")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("ComplexTrigPolynomial: coefficients must be finite")
        self.coefficients = coefficients

    @classmethod
    def from_dict(cls, mapping: Mapping[int, complex]) -> "ComplexTrigPolynomial":
        n = max((abs(int(k)) for k in mapping), default=0)
        coefficients = np.zeros(2 * n + 1, dtype=complex)
        for k, c in mapping.items():
            coefficients[int(k) + n] += c
        return cls(coefficients)

    @classmethod
    def zero(cls) -> "ComplexTrigPolynomial":
        return cls(np.zeros(1, dtype=complex))

    @property
    def half_length(self) -> int:
        return (self.coefficients.size - 1) // 2

    @property
    def frequencies(self) -> np.ndarray:
        n = self.half_length
        return np.arange(-n, n + 1)

    @property
    def degree(self) -> int:
        """Largest |k| with c_k != 0"""
        nonzero = np.flatnonzero(self.coefficients)
        if nonzero.size == 0:
            return 0
        return int(np.max(np.abs(self.frequencies[nonzero])))

    def coefficient(self, k: int) -> complex:
        n = self.half_length
        return complex(self.coefficients[k + n]) if abs(k) <= n else 0j

    def to_dict(self) -> Dict[int, complex]:
        return {
            int(k): complex(c)
            for k, c in zip(self.frequencies, self.coefficients)
            if c != 0
        }

    def _padded(self, n: int) -> np.ndarray:
        pad = n - self.half_length
        return np.pad(self.coefficients, (pad, pad)) if pad > 0 else self.coefficients

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        phases = np.exp(1j * np.multiply.outer(xs, self.frequencies))
        return phases @ self.coefficients

    def __add__(self, other: "ComplexTrigPolynomial") -> "ComplexTrigPolynomial":
        n = max(self.half_length, other.half_length)
        return ComplexTrigPolynomial(self._padded(n) + other._padded(n))

    def __mul__(self, scalar: complex) -> "ComplexTrigPolynomial":
        return ComplexTrigPolynomial(self.coefficients * scalar)

    __rmul__ = __mul__

    def shift(self, n: int) -> "ComplexTrigPolynomial":
        """e^(inx) P(x)"""
        if n < 0:
            raise ValueError(
                f"ComplexTrigPolynomial.shift: n must be nonnegative, got {n}"
            )
        half = self.half_length + n
        coefficients = np.zeros(2 * half + 1, dtype=complex)
        coefficients[2 * n :] = self.coefficients
        return ComplexTrigPolynomial(coefficients)

    def translate(self, s: float) -> "ComplexTrigPolynomial":
        """P(x - s)"""
        return ComplexTrigPolynomial(
            self.coefficients * np.exp(-1j * self.frequencies * s)
        )

    def real_part(self) -> "ComplexTrigPolynomial":
        """The real polynomial Re P, as Hermitian coefficients"""
        return ComplexTrigPolynomial(
            0.5 * (self.coefficients + np.conj(self.coefficients[::-1]))
        )

    def imag_part(self) -> "ComplexTrigPolynomial":
        return ComplexTrigPolynomial(
            -0.5j * (self.coefficients - np.conj(self.coefficients[::-1]))
        )


def partial_sum(P: ComplexTrigPolynomial, m: int, x):
    """S_m(x, P) = sum_(|k| <= m) c_k e^(ikx)"""
    if m < 0:
        raise ValueError(f"partial_sum: m must be nonnegative, got {m}")
    keep = np.abs(P.frequencies) <= m
    xs = np.asarray(x, dtype=float)
    waves = np.exp(1j * np.multiply.outer(xs, P.frequencies[keep]))
    return waves @ P.coefficients[keep]


def max_partial_sums(
    P: ComplexTrigPolynomial, xs: np.ndarray, m_max: Optional[int] = None
) -> np.ndarray:
    """max over 1 <= m <= m_max of |S_m(x, P)| at every x, m_max defaulting to deg P"""
    n = P.half_length
    m_max = P.degree if m_max is None else min(m_max, n)
    if m_max < 1:
        return np.abs(np.full(np.shape(xs), P.coefficient(0)))
    k = np.arange(1, m_max + 1)
    positive = P.coefficients[n + k]
    negative = P.coefficients[n - k]
    result = np.empty(len(xs))
    for i, x in enumerate(np.asarray(xs, dtype=float)):
        terms = positive * np.exp(1j * k * x) + negative * np.exp(-1j * k * x)
        result[i] = np.max(np.abs(P.coefficient(0) + np.cumsum(terms)))
    return result


def lipschitz_bound(P: ComplexTrigPolynomial) -> float:
    """sum |k| |c_k|, a Lipschitz constant of every partial sum of P"""
    return float(np.sum(np.abs(P.frequencies) * np.abs(P.coefficients)))


@dataclass(frozen=True)
class PeriodicPattern:
    """
    2 pi periodic function, smooth between the listed breakpoints of one period

    Attributes:
        name (str): label
        func (callable): vectorised g
        breakpoints (tuple): points of [0, 2 pi) where g is not smooth
        mean (float): (1 / 2 pi) * integral of g over a period
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    breakpoints: Tuple[float, ...]
    mean: float


SIGN_SIN = PeriodicPattern(
    "sign(sin)", lambda t: np.sign(np.sin(t)), (0.0, math.pi), 0.0
)
SIGN_COS = PeriodicPattern(
    "sign(cos)", lambda t: np.sign(np.cos(t)), (0.5 * math.pi, 1.5 * math.pi), 0.0
)
SIGN_SIN_TIMES_COS = PeriodicPattern(
    "cos*sign(sin)", lambda t: np.cos(t) * np.sign(np.sin(t)), (0.0, math.pi), 0.0
)
ABS_SIN = PeriodicPattern(
    "|sin|", lambda t: np.abs(np.sin(t)), (0.0, math.pi), 2.0 / math.pi
)
CONSTANT = PeriodicPattern("1", lambda t: np.ones_like(t), (), 1.0)


def _pattern_pieces(
    base: FiniteOpenSet, pattern: PeriodicPattern, frequency: int, max_length: float
) -> Tuple[np.ndarray, np.ndarray]:
    # pieces of base on which pattern(frequency * t) is smooth, none longer
    # than max_length
    lows: List[np.ndarray] = []
    highs: List[np.ndarray] = []
    period = 2.0 * math.pi / frequency
    for iv in base:
        cuts = [iv.a, iv.b]
        for b in pattern.breakpoints:
            offset = b / frequency
            first = math.ceil((iv.a - offset) / period)
            last = math.floor((iv.b - offset) / period)
            cuts.extend(offset + j * period for j in range(first, last + 1))
        cuts = np.unique(np.clip(cuts, iv.a, iv.b))
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if not hi > lo:
                continue
            count = max(1, math.ceil((hi - lo) / max_length))
            edges = np.linspace(lo, hi, count + 1)
            lows.append(edges[:-1])
            highs.append(edges[1:])
    if not lows:
        return np.empty(0), np.empty(0)
    return np.concatenate(lows), np.concatenate(highs)


def _dirichlet_like(m: int, u: np.ndarray) -> np.ndarray:
    # sin(m u) / u, regular at u = 0
    return m * np.sinc(m * u / math.pi)


@dataclass(frozen=True)
class OscillatingIndicator:
    """
    1_base(t) * sign(sin(m t)) or 1_base(t) * sign(cos(m t))

    Attributes:
        base (FiniteOpenSet): support, inside [-pi, pi]
        frequency (int): m >= 1
        phase (OscillationPhase): SIN or COS
    """

    base: FiniteOpenSet
    frequency: int
    phase: OscillationPhase = OscillationPhase.SIN

    def __post_init__(self):
        if self.frequency < 1:
            raise ValueError(
                "OscillatingIndicator: frequency must be >= 1,"
                f" got {self.frequency}"
            )
        if self.base and (self.base.infimum < -math.pi or self.base.supremum > math.pi):
            raise ValueError("OscillatingIndicator: base must lie in [-pi, pi]")

    @property
    def pattern(self) -> PeriodicPattern:
        return SIGN_SIN if self.phase is OscillationPhase.SIN else SIGN_COS

    def __call__(self, t):
        ts = np.asarray(t, dtype=float)
        inside = np.zeros(ts.shape, dtype=bool)
        for iv in self.base:
            inside |= (ts > iv.a) & (ts < iv.b)
        return np.where(inside, self.pattern.func(self.frequency * ts), 0.0)

    def jumps(self) -> Tuple[np.ndarray, np.ndarray]:
        """Jump points and jump sizes f(p+) - f(p-)"""
        lo, hi = _pattern_pieces(self.base, self.pattern, self.frequency, math.inf)
        signs = self.pattern.func(self.frequency * 0.5 * (lo + hi))
        points = np.concatenate([lo, hi])
        sizes = np.concatenate([signs, -signs])
        order = np.argsort(points, kind="stable")
        points, sizes = points[order], sizes[order]
        unique, inverse = np.unique(points, return_inverse=True)
        merged = np.zeros(unique.size)
        np.add.at(merged, inverse, sizes)
        keep = merged != 0
        return unique[keep], merged[keep]

    def l1_norm(self) -> float:
        return self.base.measure


def fourier_coefficients(f: OscillatingIndicator, degree: int) -> ComplexTrigPolynomial:
    """
    Exact c_k = (1 / 2 pi) * integral of f(t) e^(-ikt), |k| <= degree, from the jumps
    of the step function: c_k = sum_p J_p e^(-ikp) / (2 pi i k)
    """
    if degree < 0:
        raise ValueError(
            f"fourier_coefficients: degree must be nonnegative, got {degree}"
        )
    points, sizes = f.jumps()
    lo, hi = _pattern_pieces(f.base, f.pattern, f.frequency, math.inf)
    signs = f.pattern.func(f.frequency * 0.5 * (lo + hi))
    coefficients = np.zeros(2 * degree + 1, dtype=complex)
    coefficients[degree] = math.fsum(signs * (hi - lo)) / (2.0 * math.pi)
    ks = np.arange(1, degree + 1)
    for start in range(0, degree, COEFFICIENT_CHUNK):
        chunk = ks[start:start + COEFFICIENT_CHUNK]
        phases = np.exp(-1j * np.multiply.outer(chunk, points))
        positive = (phases @ sizes) / (2j * math.pi * chunk)
        coefficients[degree + chunk] = positive
        # f is real, so c_(-k) = conj(c_k)
        coefficients[degree - chunk] = np.conj(positive)
    return ComplexTrigPolynomial(coefficients)


def fejer_polynomial(
    base: FiniteOpenSet, m: int, phase: OscillationPhase, degree: int
) -> ComplexTrigPolynomial:
    """Fejer mean of order `degree` of 1_base * sign(sin or cos of m t)"""
    series = fourier_coefficients(OscillatingIndicator(base, m, phase), degree)
    damping = 1.0 - np.abs(series.frequencies) / (degree + 1.0)
    return ComplexTrigPolynomial(series.coefficients * damping)


def _cin(z: np.ndarray) -> np.ndarray:
    # Cin(z) = integral_0^z (1 - cos s) / s ds = gamma + ln|z| - Ci(|z|), even in z
    z = np.abs(z)
    result = np.zeros_like(z)
    positive = z > 0
    _, ci = sici(z[positive])
    result[positive] = np.euler_gamma + np.log(z[positive]) - ci
    return result


def _modified_sum_trig(P: ComplexTrigPolynomial, m: int, xs: np.ndarray) -> np.ndarray:
    k = P.frequencies.astype(float)
    out = np.empty(xs.shape, dtype=complex)
    for i, x in enumerate(xs):
        total = np.zeros(k.size, dtype=complex)
        for sign, u in ((1.0, x + math.pi), (-1.0, x - math.pi)):
            si_plus, _ = sici((m + k) * u)
            si_minus, _ = sici((m - k) * u)
            cosine = 0.5 * (si_plus + si_minus)
            sine = 0.5 * (_cin((m + k) * u) - _cin((m - k) * u))
            total += sign * (cosine - 1j * sine)
        out[i] = np.sum(P.coefficients * np.exp(1j * k * x) * total) / math.pi
    return out


def _modified_sum_numeric(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    m: int,
    xs: np.ndarray,
) -> np.ndarray:
    values = []
    for x in xs:
        pieces = gauss_legendre_pieces(
            lambda t: _dirichlet_like(m, x - t) * func(t), lo, hi
        )
        values.append(np.sum(pieces) / math.pi)
    return np.asarray(values)


Source = Union[OscillatingIndicator, ComplexTrigPolynomial, PiecewiseLinearFunction]


def modified_partial_sum(source: Source, m: int, x, method: str = "exact"):
    """
    S*_m(x, f) = (1/pi) * integral over [-pi, pi] of sin m(x - t) / (x - t) f(t) dt

    Oscillating indicators and piecewise linear functions use Gauss-Legendre
    on pieces where the integrand is smooth and no longer than pi / m. Trig
    polynomials are exact through Si and Cin, or by the same quadrature on
    [-pi, pi] with method="quadrature".

    Args:
        source: the function
        m (int): frequency >= 1
        x (float or array): evaluation points

    Returns:
        float, complex or ndarray: the sums, complex for trig polynomials
    """
    if m < 1:
        raise ValueError(f"modified_partial_sum: m must be >= 1, got {m}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if isinstance(source, ComplexTrigPolynomial):
        if method == "exact":
            result = _modified_sum_trig(source, m, xs)
        elif method == "quadrature":
            freq = max(m, source.half_length, 1)
            full = FiniteOpenSet((Interval(-math.pi, math.pi),))
            lo, hi = _pattern_pieces(full, CONSTANT, 1, math.pi / freq)
            result = _modified_sum_numeric(source, lo, hi, m, xs)
        else:
            raise ValueError(f"modified_partial_sum: unknown method {method!r}")
    elif isinstance(source, OscillatingIndicator):
        lo, hi = _pattern_pieces(
            source.base,
            source.pattern,
            source.frequency,
            math.pi / max(m, source.frequency),
        )
        pattern, frequency = source.pattern, source.frequency
        result = _modified_sum_numeric(
            lambda t: pattern.func(frequency * t), lo, hi, m, xs
        )
    elif isinstance(source, PiecewiseLinearFunction):
        lows, highs = [], []
        for t0, t1, _, _ in source.pieces():
            t0, t1 = max(t0, -math.pi), min(t1, math.pi)
            if t1 > t0:
                count = max(1, math.ceil((t1 - t0) * m / math.pi))
                edges = np.linspace(t0, t1, count + 1)
                lows.append(edges[:-1])
                highs.append(edges[1:])
        if not lows:
            result = np.zeros(xs.shape)
        else:
            result = _modified_sum_numeric(
                source, np.concatenate(lows), np.concatenate(highs), m, xs
            )
    else:
        raise TypeError(
            f"modified_partial_sum: unsupported source {type(source).__name__}"
        )
    return result if np.ndim(x) else result[0]


@dataclass
class MeanOscillationTable:
    """
    Attributes:
        pattern (str): name of g
        limit (float): (1 / 2 pi) * integral of w * integral of g over a period
        rows (list): (m, integral of w(t) g(mt) dt, |error|)
    """

    pattern: str
    limit: float
    rows: List[Tuple[int, float, float]] = field(default_factory=list)

    @property
    def errors(self) -> List[float]:
        return [err for _, _, err in self.rows]

    @property
    def observed_rate(self) -> Optional[float]:
        """Least squares p with error ~ m^-p, None while an error vanishes"""
        ms = np.array([m for m, _, _ in self.rows], dtype=float)
        errs = np.array(self.errors)
        if len(ms) < 2 or np.any(errs <= 0):
            return None
        slope, _ = np.polyfit(np.log(ms), np.log(errs), 1)
        return float(-slope)


def mean_oscillation_check(
    base: FiniteOpenSet, x: float, pattern: PeriodicPattern, m_list: Sequence[int]
) -> MeanOscillationTable:
    """
    integral of w(t) g(mt) dt against its limit (1 / 2 pi) * integral of w *
    integral of g over a period, for the kernel section w(t) = 1_base(t) / (x - t)

    Raises:
        ValueError: x lies in the closure of base, or m_list is not increasing
    """
    if any(iv.a <= x <= iv.b for iv in base):
        raise ValueError(
            f"mean_oscillation_check: x = {x} must lie off the closure of the base"
        )
    if not all(lo < hi for lo, hi in zip(m_list, m_list[1:])):
        raise ValueError("mean_oscillation_check: m_list must be increasing")
    limit = pattern.mean * hilbert_indicator(base, x, BARE)
    table = MeanOscillationTable(pattern.name, limit)
    for m in m_list:
        lo, hi = _pattern_pieces(base, pattern, m, math.pi / m)
        pieces = gauss_legendre_pieces(
            lambda t: pattern.func(m * t) / (x - t), lo, hi
        )
        value = float(np.sum(pieces))
        table.rows.append((int(m), value, abs(value - limit)))
    return table


def verification_grid(
    F: FiniteOpenSet, count: int = GRID_POINTS, inset: float = GRID_INSET
) -> np.ndarray:
    """count points per component of F, the end points moved inside by inset"""
    return np.concatenate([np.linspace(iv.a + inset, iv.b - inset, count) for iv in F])


def _grid_spacing(F: FiniteOpenSet, count: int, inset: float) -> float:
    return max((iv.length - 2 * inset) / (count - 1) for iv in F)


def shrink_set(
    E: FiniteOpenSet,
    delta: float,
    F: Optional[FiniteOpenSet] = None,
    level: Optional[float] = None,
    samples: int = 16,
) -> FiniteOpenSet:
    """
    Replace each component (c, a) of E by (c + delta, a - delta)

    With F and level given, the bare transform of the result must exceed level
    at the interior samples and midpoints of F.

    Raises:
        ValueError: delta is not below half the shortest component
        ConstructionError: the level check fails
    """
    if not E:
        raise ValueError("shrink_set: E is empty")
    shortest = min(iv.length for iv in E)
    if not 0 < delta < 0.5 * shortest:
        raise ValueError(
            f"shrink_set: delta must lie in (0, {0.5 * shortest}), got {delta}"
        )
    shrunk = FiniteOpenSet(tuple(Interval(iv.a + delta, iv.b - delta) for iv in E))
    if F is not None and level is not None:
        xs = np.concatenate(
            [
                np.append(np.linspace(iv.a, iv.b, samples + 2)[1:-1], iv.midpoint)
                for iv in F
            ]
        )
        worst = float(np.min(hilbert_indicator_many(shrunk, xs, BARE)))
        if not worst > level:
            raise ConstructionError(
                f"shrink_set: transform drops to {worst:.6f},"
                f" not above {level:.6f}"
            )
    return shrunk


def _choose_delta(E: FiniteOpenSet, grid: np.ndarray, level: float) -> float:
    delta = min(iv.length for iv in E) / 8.0
    for _ in range(60):
        shrunk = FiniteOpenSet(tuple(Interval(iv.a + delta, iv.b - delta) for iv in E))
        if np.min(hilbert_indicator_many(shrunk, grid, BARE)) >= level:
            return delta
        delta *= 0.5
    raise ConstructionError(
        "_choose_delta: no shrink keeps the transform above the level"
    )


@dataclass
class KKResult:
    """
    Attributes:
        lam (float): ln(pi / alpha)
        alpha (float): |F|
        E (FiniteOpenSet): sublevel set, |E| = pi - alpha
        E_tilde (FiniteOpenSet): shrunken E
        delta (float): shrink width, equal to dist(E~, F) or less
        m (int): chosen oscillation frequency
        P (ComplexTrigPolynomial): the polynomial
        bound (float): verified bound (2/3) KAPPA lam
        nominal_bound (float): pi lam / 3
        modified_margin (float): min |S*_m(x, P)| - bound on the grid
        approximation_error (float): max |S*_m(x, P) - S*_m(x, f_m + i g_m)|
        min_margin (float): min over the grid of max_m |S_m(x, P)| - bound
        lipschitz (float): lipschitz_bound(P)
        interval_margin (float): min_margin - lipschitz * spacing / 2
        grid (ndarray): verification points
        maxima (ndarray): max_m |S_m(x, P)| on the grid
        measure_error (float): ||E| - (pi - alpha)|
        measure_tol (float): measure_rel_tol * (pi - alpha)
    """

    lam: float
    alpha: float
    E: FiniteOpenSet
    E_tilde: FiniteOpenSet
    delta: float
    m: int
    P: ComplexTrigPolynomial
    bound: float
    nominal_bound: float
    modified_margin: float
    approximation_error: float
    min_margin: float
    lipschitz: float
    interval_margin: float
    grid: np.ndarray
    maxima: np.ndarray
    measure_error: float
    measure_tol: float

    @property
    def degree(self) -> int:
        return self.P.degree

    @property
    def passed(self) -> bool:
        return self.min_margin > 0 and self.measure_error <= self.measure_tol

    def rows(self) -> List[Tuple[float, float, float]]:
        """(x, max_partial_sum, bound)"""
        return [
            (float(x), float(v), self.bound) for x, v in zip(self.grid, self.maxima)
        ]

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "E": self.E.to_json(),
            "E_tilde": self.E_tilde.to_json(),
            "delta": self.delta,
            "m": self.m,
            "degree": self.degree,
            "bound": self.bound,
            "nominal_bound": self.nominal_bound,
            "modified_margin": self.modified_margin,
            "approximation_error": self.approximation_error,
            "min_margin": self.min_margin,
            "lipschitz": self.lipschitz,
            "interval_margin": self.interval_margin,
            "measure_error": self.measure_error,
            "measure_tol": self.measure_tol,
            "passed": self.passed,
        }


def kk_construct(
    F: FiniteOpenSet,
    delta: Optional[float] = None,
    m_budget: int = 2**14,
    approx_tol: Optional[float] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> KKResult:
    """
    Polynomial P with max_(1 <= m <= deg P) |S_m(x, P)| above (2/3) KAPPA lam on F,
    lam = ln(pi / |F|)

    Steps: invert the sublevel set E of F at lam; shrink E by delta; double m
    from 16 until |S*_m(x, f_m + i g_m)| passes (3/4) KAPPA lam on the grid;
    double the Fejer degree from 2m until the modified sums of P stay within
    approx_tol of those of f_m + i g_m and the standard partial sums clear
    the bound.

    Args:
        F (FiniteOpenSet): inside [0, pi], |F| < pi
        delta (float, optional): shrink width, the largest of l/8, l/16, ...
            keeping the bare transform of E~ above (5/6) lam on F by default,
            l the shortest component of E; a given width must keep the same level
        m_budget (int): largest frequency tried
        approx_tol (float, optional): defaults to KAPPA lam / 12

    Returns:
        KKResult: the polynomial and its margins

    Raises:
        ConstructionError: the budgets are exhausted, or a given delta drops the
            transform of E~ below the level
    """
    if not F:
        raise ValueError("kk_construct: F is empty")
    if F.infimum < 0 or F.supremum > math.pi:
        raise ValueError("kk_construct: F must lie in [0, pi]")
    alpha = F.measure
    if not alpha < math.pi:
        raise ValueError(f"kk_construct: |F| = {alpha} must be below pi")

    lam = math.log(math.pi / alpha)
    config = sublevel_set(F, lam, tolerances)
    E = config.E
    measure_error = abs(E.measure - (math.pi - alpha))
    logger.debug(
        f"kk_construct: lambda={lam:.6f},"
        f" |E| - (pi - alpha) = {measure_error:.3e}"
    )
    measure_tol = tolerances.measure_rel_tol * (math.pi - alpha)

    grid = verification_grid(F)
    if delta is None:
        delta = _choose_delta(E, grid, SHRINK_LEVEL_FRACTION * lam)
        E_tilde = shrink_set(E, delta)
    else:
        E_tilde = shrink_set(E, delta, F, SHRINK_LEVEL_FRACTION * lam)

    bound = BOUND_FRACTION * KAPPA * lam
    threshold = SEARCH_FRACTION * KAPPA * lam
    if approx_tol is None:
        approx_tol = KAPPA * lam / 12.0
    spacing = _grid_spacing(F, GRID_POINTS, GRID_INSET)

    best = -math.inf
    m = M_START
    while m <= m_budget:
        sin_part = OscillatingIndicator(E_tilde, m, OscillationPhase.SIN)
        cos_part = OscillatingIndicator(E_tilde, m, OscillationPhase.COS)
        sums = modified_partial_sum(sin_part, m, grid) + 1j * modified_partial_sum(
            cos_part, m, grid
        )
        reach = float(np.min(np.abs(sums)))
        logger.debug(
            f"kk_construct: m={m}, min |S*_m| = {reach:.6f},"
            f" threshold {threshold:.6f}"
        )
        if reach >= threshold:
            degree = 2 * m
            while degree <= MAX_DEGREE_FACTOR * m:
                P = fejer_polynomial(
                    E_tilde, m, OscillationPhase.SIN, degree
                ) + 1j * fejer_polynomial(E_tilde, m, OscillationPhase.COS, degree)
                modified = modified_partial_sum(P, m, grid)
                error = float(np.max(np.abs(modified - sums)))
                maxima = max_partial_sums(P, grid)
                margin = float(np.min(maxima)) - bound
                best = max(best, margin)
                if error <= approx_tol and margin > 0:
                    lipschitz = lipschitz_bound(P)
                    logger.info(
                        f"kk_construct: m={m}, degree {P.degree},"
                        f" margin {margin:.6f}"
                    )
                    return KKResult(
                        lam=lam,
                        alpha=alpha,
                        E=E,
                        E_tilde=E_tilde,
                        delta=delta,
                        m=m,
                        P=P,
                        bound=bound,
                        nominal_bound=math.pi * lam / 3.0,
                        modified_margin=float(np.min(np.abs(modified))) - bound,
                        approximation_error=error,
                        min_margin=margin,
                        lipschitz=lipschitz,
                        interval_margin=margin - 0.5 * lipschitz * spacing,
                        measure_error=measure_error,
                        measure_tol=measure_tol,
                        grid=grid,
                        maxima=maxima,
                    )
                degree *= 2
        m *= 2
    raise ConstructionError(
        f"kk_construct: budget m <= {m_budget} exhausted,"
        f" best margin {best:.3e}"
    )


@dataclass
class KKSplitResult:
    P: ComplexTrigPolynomial
    shift: int
    pieces: List[KKResult]
    margins: List[float]

    @property
    def first_piece_passed(self) -> bool:
        return self.margins[0] > 0

    def to_dict(self) -> dict:
        return {
            "degree": self.P.degree,
            "shift": self.shift,
            "pieces": [piece.to_dict() for piece in self.pieces],
            "margins": self.margins,
        }


@dataclass(frozen=True)
class KKSplit:
    """
    F = F_1 ∪ F_2 with each piece of diameter at most pi

    Attributes:
        F_1 (FiniteOpenSet): the part within pi of min F
        F_2 (FiniteOpenSet): the rest, possibly empty
    """

    F_1: FiniteOpenSet
    F_2: FiniteOpenSet

    @staticmethod
    def combine(
        P_1: ComplexTrigPolynomial, P_2: ComplexTrigPolynomial
    ) -> Tuple[ComplexTrigPolynomial, int]:
        """P_1 + e^(inx) P_2 with n = deg P_1 + deg P_2 + 1"""
        n = P_1.degree + P_2.degree + 1
        return P_1 + P_2.shift(n), n

    def construct(self, **options) -> KKSplitResult:
        """
        kk_construct on each piece moved to start at 0, moved back and combined;
        margins are min over each piece grid of max_(1 <= m <= deg P) |S_m(x, P)|
        minus that piece's bound
        """
        pieces = []
        polynomials = []
        for piece in (self.F_1, self.F_2):
            if not piece:
                continue
            s = piece.infimum
            result = kk_construct(piece.translate(-s), **options)
            pieces.append(result)
            polynomials.append(result.P.translate(s))
        if len(polynomials) == 1:
            P, n = polynomials[0], 0
        else:
            P, n = self.combine(*polynomials)
        margins = []
        for piece, result in zip((self.F_1, self.F_2), pieces):
            maxima = max_partial_sums(P, verification_grid(piece))
            margins.append(float(np.min(maxima)) - result.bound)
        return KKSplitResult(P, n, pieces, margins)


def kk_split(F: FiniteOpenSet) -> KKSplit:
    """
    Split F ⊂ (0, 2 pi) into two pieces of diameter at most pi, at the last gap
    before min F + pi, or at min F + pi when no gap falls in the second half

    Returns:
        KKSplit: F_2 empty when F already has diameter <= pi
    """
    if not F:
        raise ValueError("kk_split: F is empty")
    if F.infimum < 0 or F.supremum > 2 * math.pi:
        raise ValueError("kk_split: F must lie in [0, 2 pi]")
    if F.diameter <= math.pi:
        return KKSplit(F, FiniteOpenSet.empty())
    cut = F.infimum + math.pi
    first = [iv for iv in F if iv.b <= cut]
    if first and F.supremum - min(iv.a for iv in F if iv.b > cut) <= math.pi:
        rest = [iv for iv in F if iv.b > cut]
        return KKSplit(normalize(first), normalize(rest))
    left = [(iv.a, min(iv.b, cut)) for iv in F if iv.a < cut]
    right = [(max(iv.a, cut), iv.b) for iv in F if iv.b > cut]
    logger.debug(f"kk_split: no usable gap, cutting at {cut}")
    return KKSplit(normalize(left), normalize(right))
