import logging
import math
import sys
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import roots_legendre

from .constants_and_enums import DEFAULT_TOLERANCES, Tolerances
from .exceptions import ConvergenceError

logger = logging.getLogger(__name__)


def log_ratio(x: float, a: float, b: float) -> float:
    """
    ln|x - a| - ln|x - b| for a < b and x not in {a, b}

    Uses log1p outside [a, b], where the ratio approaches 1.

    Args:
        x (float): evaluation point
        a (float): left endpoint
        b (float): right endpoint

    Returns:
        float: the log ratio
    """
    if x > b:
        return math.log1p((b - a) / (x - b))
    if x < a:
        return math.log1p(-(b - a) / (b - x))
    return math.log((x - a) / (b - x))


def bisect_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    increasing: bool = True,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Root of a monotone function on the open bracket (lo, hi)

    The endpoints are never evaluated, so func may be singular there. While
    lo > 0 and hi / lo > 4 the midpoint is geometric, which lets offsets spanning
    many orders of magnitude converge within the iteration budget. A bracket
    starting at 0 is split against the smallest normal float instead, so roots
    far below hi / 2^200 are still found.

    Args:
        func (callable): monotone function with a sign change inside (lo, hi)
        lo (float): left end of the bracket
        hi (float): right end of the bracket
        increasing (bool): monotonicity direction of func
        tolerances (Tolerances): bisection_rel_tol and bisection_max_iter are used

    Returns:
        float: the root

    Raises:
        ConvergenceError: when the iteration budget is exhausted
    """
    for iteration in range(tolerances.bisection_max_iter):
        if lo == 0 and hi > 0:
            # geometric against the smallest normal float, so tiny roots resolve
            mid = math.sqrt(sys.float_info.min) * math.sqrt(hi)
        elif lo > 0 and hi > 4 * lo:
            mid = math.sqrt(lo) * math.sqrt(hi)
        else:
            mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        value = func(mid)
        if value == 0:
            return mid
        if (value < 0) == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tolerances.bisection_rel_tol * max(abs(lo), abs(hi)) and (
            lo > 0 or hi < 0
        ):
            break
    else:
        raise ConvergenceError(
            f"bisect_root: no convergence in {tolerances.bisection_max_iter} iterations"
            f" on ({lo!r}, {hi!r})"
        )
    logger.debug(f"bisect_root: converged after {iteration + 1} iterations")
    return 0.5 * (lo + hi)


def chebyshev_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    """Chebyshev nodes of the first kind mapped onto [lo, hi]"""
    k = np.arange(count)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * count))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[::-1]


@lru_cache(maxsize=8)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    return nodes, weights


def gauss_legendre_pieces(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    order: int = 16,
) -> np.ndarray:
    """
    Fixed order Gauss-Legendre rule applied to each piece [lo_i, hi_i]

    Args:
        func (callable): vectorised integrand
        lo (np.ndarray): left ends of the pieces
        hi (np.ndarray): right ends of the pieces
        order (int): number of nodes per piece

    Returns:
        np.ndarray: integral over each piece
    """
    nodes, weights = _legendre(order)
    lo = np.asarray(lo, dtype=float)[:, None]
    hi = np.asarray(hi, dtype=float)[:, None]
    half = 0.5 * (hi - lo)
    t = 0.5 * (hi + lo) + half * nodes[None, :]
    return (func(t) * weights[None, :]).sum(axis=1) * half[:, 0]
