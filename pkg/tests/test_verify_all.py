import json

import numpy as np
import pytest

from hilbert_exceptional import DEFAULT_TOLERANCES, ConfigError, ConstructionError
from hilbert_exceptional import verify_all as verify_all_module
from hilbert_exceptional.verify_all import (
    CheckResult,
    check_lemma4,
    check_level_sets,
    check_oracle,
    check_stein_weiss,
    check_whitney,
    random_finite_open_set,
    verify_all,
)


def test_random_sets_follow_the_seed():
    first = random_finite_open_set(np.random.default_rng(3))
    second = random_finite_open_set(np.random.default_rng(3))
    assert first == second
    assert all(iv.length >= 0.01 for iv in first)


@pytest.mark.parametrize(
    "check, cases",
    [
        (check_oracle, 40),
        (check_level_sets, 20),
        (check_stein_weiss, 3),
        (check_whitney, 5),
    ],
)
def test_cheap_checks_pass_and_repeat(check, cases):
    first = check(np.random.default_rng(11), cases, DEFAULT_TOLERANCES)
    second = check(np.random.default_rng(11), cases, DEFAULT_TOLERANCES)
    assert first.passed, first.detail
    assert first.to_dict() == second.to_dict()


def test_lemma4_check():
    result = check_lemma4()
    assert result.passed
    assert result.detail["value_at_12"] < -0.5


@pytest.mark.parametrize("cases", [{"oracle": 0}, {"unknown": 2}, {"whitney": 1.5}])
def test_verify_all_rejects_bad_case_counts(cases):
    with pytest.raises(ConfigError):
        verify_all(cases=cases)


def test_a_raising_check_is_recorded_without_a_margin(monkeypatch):
    def cheap(name):
        return lambda *args: CheckResult(name, True, 1.0, 1)

    def broken(tolerances):
        raise ConstructionError("budget exhausted")

    monkeypatch.setattr(verify_all_module, "check_theorem1", cheap("theorem1"))
    monkeypatch.setattr(verify_all_module, "check_theorem2", cheap("theorem2"))
    monkeypatch.setattr(verify_all_module, "check_kk", broken)
    cases = {"oracle": 2, "level_set": 2, "stein_weiss": 1, "whitney": 1}
    summary = verify_all(cases=cases)
    assert not summary.passed
    failed = summary.checks[-1]
    assert failed.worst_margin is None
    assert failed.detail == {"error": "budget exhausted"}
    assert summary.rows()[-1] == ("kk", False, None)
    payload = json.loads(json.dumps(summary.to_dict()))
    assert payload["checks"][-1]["worst_margin"] is None
