import dataclasses
import math

import pytest

from hilbert_exceptional import DEFAULT_TOLERANCES, ConvergenceError
from hilbert_exceptional.utils import bisect_root, chebyshev_nodes, log_ratio


@pytest.mark.parametrize("root", [0.3, 1e-5, 1e-70, 1e-250, 1e-300])
def test_bisection_from_zero_resolves_tiny_roots(root):
    found = bisect_root(lambda d: math.log(d) - math.log(root), 0.0, 1.0)
    assert found == pytest.approx(root, rel=1e-12)


def test_bisection_on_a_decreasing_function():
    found = bisect_root(lambda x: 2.0 - x * x, 0.5, 3.0, increasing=False)
    assert found == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_bisection_budget():
    tight = dataclasses.replace(DEFAULT_TOLERANCES, bisection_max_iter=3)
    with pytest.raises(ConvergenceError):
        bisect_root(lambda x: x - 0.123456, 0.0, 1.0, tolerances=tight)


def test_log_ratio_far_away_keeps_precision():
    # ln(1 + 1/(x - 1)) at x = 1e12
    assert log_ratio(1e12, 0.0, 1.0) == pytest.approx(1e-12, rel=1e-9)
    assert log_ratio(0.25, 0.0, 1.0) == pytest.approx(math.log(1.0 / 3.0))


def test_chebyshev_nodes_stay_inside():
    nodes = chebyshev_nodes(-2.0, 5.0, 9)
    assert len(nodes) == 9
    assert all(-2.0 < x < 5.0 for x in nodes)
    assert list(nodes) == sorted(nodes)
