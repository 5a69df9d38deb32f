import math

import numpy as np
import pytest

from hilbert_exceptional import (
    ClosedSetBlock,
    ConstructionError,
    DivergenceWitness,
    ExceptionalSeed,
    FiniteOpenSet,
    PiecewiseLinearFunction,
    intersection,
    lemma2_select,
    lemma2_verify,
    lemma3_step,
    lemma4_divergence_check,
    lemma4_phi,
    mu_from_lambda,
    thm1_construct,
    thm1_witness,
    thm2_closed_set_assembly,
    thm2_construct,
    thm2_witness,
    trapezoid_approximant,
    whitney_partition,
)
from hilbert_exceptional.constructions import lemma4_bound, witness_epsilons


@pytest.fixture(scope="module")
def thm1_depth6():
    return thm1_construct(ExceptionalSeed.around([0.0]), 6)


@pytest.fixture(scope="module")
def thm2_depth5():
    return thm2_construct(ExceptionalSeed.around([0.0]), 5)


def test_seed_validation():
    G = FiniteOpenSet.from_pairs([(-1, 1)])
    with pytest.raises(ValueError):
        ExceptionalSeed((0.5, 0.0), G)
    with pytest.raises(ValueError):
        ExceptionalSeed((2.0,), G)
    seed = ExceptionalSeed.around([1.0, 0.0, 1.0], radius=0.25)
    assert seed.points == (0.0, 1.0)
    assert len(seed.ambient) == 2


def test_lemma3_step_structure():
    seed = ExceptionalSeed.around([0.0])
    result = lemma3_step(seed.ambient, seed, 1.0, 0.5 / math.pi)
    report = result.report
    assert report.seed_in_f
    assert report.f_in_g
    assert report.e_in_g
    assert report.e_disjoint_f
    assert report.tail_margin > 0
    assert report.lemma2.off_g_contained
    assert not intersection(result.E, result.F)


def test_lemma3_step_rejects_bad_input():
    seed = ExceptionalSeed.around([0.0])
    with pytest.raises(ValueError):
        lemma3_step(seed.ambient, seed, 1.0, 0.0)


def test_thm1_stages_are_nested_and_disjoint():
    construction = thm1_construct(ExceptionalSeed.around([0.0]), 3)
    F_sets = construction.F_sets
    assert len(F_sets) == 4
    for outer, inner in zip(F_sets, F_sets[1:]):
        assert outer.contains_set(inner)
        assert inner.contains_point(0.0)
    for n, stage in enumerate(construction.stages):
        assert F_sets[n].contains_set(stage.E)
        for other in construction.stages[n + 1 :]:
            assert not intersection(stage.E, other.E)
    total = sum(s.E.measure for s in construction.stages)
    assert construction.E.measure == pytest.approx(total)


def test_thm1_rejects_zero_depth():
    with pytest.raises(ValueError):
        thm1_construct(ExceptionalSeed.around([0.0]), 0)


def test_thm1_witness_grows(thm1_depth6):
    witness = thm1_witness(thm1_depth6, 0.0)
    assert witness.passed
    assert max(witness.a_bounds) < 1
    assert witness.max_value >= 5.0
    assert all(b < a for a, b in zip(witness.epsilons, witness.epsilons[1:]))
    assert witness.to_dict()["passed"]


def test_witness_epsilons_shrink():
    F_sets = [
        FiniteOpenSet.from_pairs([(-1, 1)]),
        FiniteOpenSet.from_pairs([(-0.5, 0.5)]),
        FiniteOpenSet.from_pairs([(-0.1, 0.1)]),
    ]
    assert witness_epsilons(F_sets, 0.0) == pytest.approx([0.5, 0.25])
    # a point that left F_1 halves the previous window
    assert witness_epsilons(F_sets, 0.8) == pytest.approx([0.1, 0.05])


def test_lemma4_phi_nodes():
    phi = lemma4_phi(10)
    assert phi(-1.0) == pytest.approx(0.0)
    assert phi(-0.5) == pytest.approx(0.5)
    assert phi(0.0) == pytest.approx(1.0)
    assert phi(1.0) == pytest.approx(0.0)
    assert phi.is_continuous()
    with pytest.raises(ValueError):
        lemma4_phi(1)


def test_lemma4_table():
    assert lemma4_bound(1) == pytest.approx(0.5 - 0.5 * math.log(2.0))
    table = lemma4_divergence_check(40, 12)
    assert table.passed
    assert table.rows[-1][1] < -0.5
    with pytest.raises(ValueError):
        lemma4_divergence_check(10, 10)


def test_trapezoid_approximant_stays_below_the_indicator():
    E = FiniteOpenSet.from_pairs([(0.0, 1.0), (2.0, 2.5)])
    F = FiniteOpenSet.from_pairs([(3.0, 3.2)])
    f, error = trapezoid_approximant(E, F, 0.1)
    assert error < 0.1
    assert f.is_continuous()
    assert f.max_abs() == pytest.approx(1.0)
    assert f(1.5) == 0.0
    assert f.l1_norm() < E.measure


def test_thm2_function_is_continuous(thm2_depth5):
    assert thm2_depth5.f.is_continuous()
    for stage in thm2_depth5.stages:
        assert stage.level_margin > 0
        assert stage.approximation_error < thm2_depth5.eta


def test_thm2_witness(thm2_depth5):
    witness = thm2_witness(thm2_depth5, 0.0)
    target = math.fsum(1.0 - 2.0**-n for n in range(2, 6)) - 1.0
    assert witness.passed
    assert witness.max_value >= target


def test_thm2_rejects_saturation_and_eta():
    seed = ExceptionalSeed.around([0.0])
    with pytest.raises(ConstructionError):
        thm2_construct(seed, 10)
    with pytest.raises(ValueError):
        thm2_construct(seed, 2, eta=1.5)


def bump(start: float) -> PiecewiseLinearFunction:
    return PiecewiseLinearFunction(
        (start + 0.5, start + 1.0, start + 1.5), (0.0, 1.0, 0.0)
    )


def test_closed_set_assembly():
    blocks = [
        ClosedSetBlock(2.0, 4.0, bump(2.0), correction=True),
        ClosedSetBlock(4.0, 6.0, bump(4.0)),
    ]
    g = thm2_closed_set_assembly(blocks, truncation=20)
    assert g.is_continuous()
    # f_1 / (2 * 2) at its peak plus nothing from phi(x - 2), supported in [1, 3]
    assert g(5.0) == pytest.approx(1.0 / 8.0)
    assert g(2.0) == pytest.approx(0.5)


def test_closed_set_assembly_errors():
    with pytest.raises(ConstructionError):
        thm2_closed_set_assembly([])
    with pytest.raises(ConstructionError):
        thm2_closed_set_assembly([ClosedSetBlock(0.0, 0.5, bump(-0.5))])
    with pytest.raises(ConstructionError):
        thm2_closed_set_assembly([ClosedSetBlock(0.0, 2.0, bump(1.0))])
    with pytest.raises(ConstructionError):
        thm2_closed_set_assembly(
            [
                ClosedSetBlock(0.0, 2.0, bump(0.0)),
                ClosedSetBlock(1.5, 4.0, bump(2.0)),
            ]
        )


def selection_inputs(delta: float = 0.5 / math.pi):
    seed = ExceptionalSeed.around([0.0])
    partition = whitney_partition(seed.ambient, 6)
    lengths = np.array([cell.length for cell in partition.cells])
    deltas = math.pi * delta * lengths / 2.0 ** (np.arange(1, len(partition) + 1) + 1)
    gamma = abs(mu_from_lambda(1.0).mu)
    return seed, partition, gamma, deltas


def test_lemma2_select_with_an_empty_seed():
    seed, partition, gamma, deltas = selection_inputs()
    empty = ExceptionalSeed((), seed.ambient)
    assert not lemma2_select(seed.ambient, partition, empty, gamma, deltas)


def test_lemma2_select_meets_the_cell_budgets():
    seed, partition, gamma, deltas = selection_inputs()
    F = lemma2_select(seed.ambient, partition, seed, gamma, deltas)
    assert F.contains_point(0.0)
    report = lemma2_verify(F, seed.ambient, partition, gamma, deltas)
    assert report.budget_margin > 0
    assert report.off_g_contained
    assert report.cell_margin >= 0
    assert report.to_dict()["passed"]


def test_lemma2_select_shrinks_with_the_deltas():
    seed, partition, gamma, deltas = selection_inputs()
    wide = lemma2_select(seed.ambient, partition, seed, gamma, deltas)
    narrow = lemma2_select(seed.ambient, partition, seed, gamma, deltas / 10.0)
    assert wide.contains_set(narrow)
    assert narrow.measure <= wide.measure
    assert narrow.contains_point(0.0)


def test_lemma2_select_rejects_bad_input():
    seed, partition, gamma, deltas = selection_inputs()
    with pytest.raises(ValueError):
        lemma2_select(seed.ambient, partition, seed, 0.0, deltas)
    with pytest.raises(ValueError):
        lemma2_select(seed.ambient, partition, seed, gamma, -deltas)
    with pytest.raises(ValueError):
        lemma2_select(seed.ambient.translate(1.0), partition, seed, gamma, deltas)


@pytest.fixture(scope="module")
def thm1_two_seeds():
    return thm1_construct(ExceptionalSeed.around([0.0, 1.0 / 3.0]), 4)


def test_thm1_with_two_seed_points(thm1_two_seeds):
    F_sets = thm1_two_seeds.F_sets
    assert len(F_sets) == 5
    for outer, inner in zip(F_sets, F_sets[1:]):
        assert outer.contains_set(inner)
    for F in F_sets:
        assert F.contains_point(0.0)
        assert F.contains_point(1.0 / 3.0)
    assert len(F_sets[-1]) >= 2
    for x in (0.0, 1.0 / 3.0):
        assert thm1_witness(thm1_two_seeds, x).passed


def test_thm1_witness_off_the_seed_stays_bounded(thm1_depth6):
    x = 0.4
    assert not thm1_depth6.F_sets[1].contains_point(x)
    witness = thm1_witness(thm1_depth6, x)
    assert witness.passed
    assert max(witness.b_counts) <= 1
    assert max(abs(v) for v in witness.values) < 1.0


def test_witness_nominal_bound_is_reported_apart():
    witness = DivergenceWitness(
        0.0,
        epsilons=[1.0, 0.5],
        values=[-0.2, 1.5],
        a_bounds=[0.1, 0.2],
        b_counts=[1, 2],
        lower_bounds=[-0.5, 0.3],
        nominal_bounds=[0.0, 1.0],
    )
    assert witness.passed
    assert not witness.nominal_reached
    record = witness.to_dict()
    assert record["passed"] and not record["nominal_reached"]
    witness.values[0] = 0.1
    assert witness.nominal_reached
