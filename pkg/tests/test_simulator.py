import copy

import pytest

from fuzzy_placer import simulator
from fuzzy_placer.errors import DuplicateResourceId, InvalidConfig, InvalidMetrics, UnknownResource
from fuzzy_placer.resources import ResourceScore, paper_rulebase
from fuzzy_placer.simulator import (
    ClusterState,
    SimResource,
    Strategy,
    concentration_of,
    run,
    step,
)

from oracles import default_scores_oracle, mamdani_oracle

RB = paper_rulebase()
LOW = [(0.0, 1.0), (0.5, 0.0)]
HIGH = [(0.5, 0.0), (1.0, 1.0)]


def cluster(*specs, counts=None):
    counts = counts or [0] * len(specs)
    return ClusterState.fresh(SimResource(rid, s, r, c) for (rid, s, r), c in zip(specs, counts))


IDENTICAL3 = cluster(("a", 50, 95), ("b", 50, 95), ("c", 50, 95))
FAST_SLOW = cluster(("fast", 70, 99), ("slow", 30, 95))


# -- state -------------------------------------------------------------------


def test_state_invariants():
    with pytest.raises(InvalidConfig):
        ClusterState((SimResource("a", 1, 1, 2),), total_placed=3)
    with pytest.raises(InvalidConfig):
        ClusterState(())
    with pytest.raises(DuplicateResourceId):
        cluster(("a", 1, 1), ("a", 2, 2))
    with pytest.raises(InvalidMetrics):
        SimResource("a", -1, 50)
    with pytest.raises(InvalidMetrics):
        SimResource("a", 1, 150)
    with pytest.raises(InvalidConfig):
        SimResource("a", 1, 50, -2)


# -- concentration_of --------------------------------------------------------


def test_concentration_empty_cluster():
    assert [concentration_of(IDENTICAL3, r) for r in "abc"] == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("counts, expected", [([5, 5], [50.0, 50.0]), ([1, 3], [25.0, 75.0])])
def test_concentration_percentages(counts, expected):
    state = cluster(("x", 1, 1), ("y", 1, 1), counts=counts)
    assert [concentration_of(state, r) for r in "xy"] == expected


def test_concentration_unknown():
    with pytest.raises(UnknownResource):
        concentration_of(IDENTICAL3, "zz")


# -- step --------------------------------------------------------------------


def test_argmax_tie_goes_to_first():
    state = cluster(("a", 50, 95), ("b", 50, 95))
    new, chosen = step(state, Strategy.FUZZY_ARGMAX, RB, 0, 0)
    assert chosen == "a"
    assert [r.placed_chunks for r in new.resources] == [1, 0]
    assert new.total_placed == 1


def test_always_first():
    state = cluster(("a", 1, 1), ("b", 100, 100), counts=[7, 0])
    assert step(state, "always-first", RB, 0, 3)[1] == "a"


@pytest.mark.parametrize("k", range(7))
def test_round_robin(k):
    assert step(IDENTICAL3, Strategy.ROUND_ROBIN, RB, 0, k)[1] == "abc"[k % 3]


def test_step_does_not_touch_input():
    state = cluster(("a", 50, 95), ("b", 10, 91), counts=[2, 1])
    before = copy.deepcopy(state)
    for strategy in Strategy:
        step(state, strategy, RB, 11, 4)
    assert state == before


def test_sample_step_uses_seed_and_index():
    a = [step(IDENTICAL3, "fuzzy-sample", RB, 42, k)[1] for k in range(30)]
    assert a == [step(IDENTICAL3, "fuzzy-sample", RB, 42, k)[1] for k in range(30)]
    assert len(set(a)) > 1


def test_zero_mass_remaps_to_uniform(monkeypatch):
    monkeypatch.setattr(simulator, "resource_probability", lambda m, rb, rid="": ResourceScore(rid, 0.0))
    picks = [step(IDENTICAL3, "fuzzy-sample", RB, 9, k)[1] for k in range(3000)]
    for rid in "abc":
        assert picks.count(rid) / 3000 == pytest.approx(1 / 3, abs=0.05)


# -- run ---------------------------------------------------------------------


def test_empty_run():
    report = run(IDENTICAL3, "fuzzy-sample", RB, 1, 0)
    assert report.per_resource_counts == {"a": 0, "b": 0, "c": 0}
    assert not report.shares_defined


def test_fast_slow_golden_trace():
    report = run(FAST_SLOW, Strategy.FUZZY_ARGMAX, RB, 0, 10, trace=True)
    assert [pl.chosen_id for pl in report.placements] == ["fast", "slow"] * 5
    assert report.per_resource_counts == {"fast": 5, "slow": 5}

    # first three steps recomputed from scratch with the discretized oracle
    # step 0: both empty (concentration 0); step 1: fast 100 %, slow 0 %; step 2: 50 % each
    expected = [
        (default_scores_oracle(70, 99, 0), default_scores_oracle(30, 95, 0)),
        (default_scores_oracle(70, 99, 100), default_scores_oracle(30, 95, 0)),
        (default_scores_oracle(70, 99, 50), default_scores_oracle(30, 95, 50)),
    ]
    for pl, (fast, slow) in zip(report.placements, expected):
        assert pl.scores == pytest.approx((fast, slow), abs=1e-4)
    # the same three steps by hand: firing strengths from the ramp formulas
    speed_fast, speed_slow = 50 / 60, 10 / 60
    rel_fast, rel_slow = 9 / 9.9, 5 / 9.9
    hand = [
        (mamdani_oracle([(HIGH, min(speed_fast, rel_fast))], (0, 1)),
         mamdani_oracle([(HIGH, min(speed_slow, rel_slow))], (0, 1))),
        (mamdani_oracle([(LOW, min(1 - speed_fast, 1 - rel_fast))], (0, 1)),
         mamdani_oracle([(HIGH, min(speed_slow, rel_slow))], (0, 1))),
        (mamdani_oracle([(LOW, min(1 - speed_fast, 1 - rel_fast))], (0, 1)),
         mamdani_oracle([(LOW, min(1 - speed_slow, 1 - rel_slow))], (0, 1))),
    ]
    for pl, (fast, slow) in zip(report.placements, hand):
        assert pl.scores == pytest.approx((fast, slow), abs=1e-4)
    assert report.placements[0].scores[0] > report.placements[0].scores[1]
    assert report.placements[1].scores[1] > report.placements[1].scores[0]
    assert report.placements[2].scores[0] > report.placements[2].scores[1]


def test_identical_resources_balance_golden():
    report = run(IDENTICAL3, Strategy.FUZZY_SAMPLE, RB, 12345, 3000)
    # frozen from one seeded run
    assert report.per_resource_counts == {"a": 1001, "b": 1014, "c": 985}
    for share in report.per_resource_share.values():
        assert share == pytest.approx(1 / 3, abs=0.05)


def test_conservation_and_shares():
    for strategy in Strategy:
        report = run(FAST_SLOW, strategy, RB, 3, 257)
        assert sum(report.per_resource_counts.values()) == 257
        assert sum(report.per_resource_share.values()) == pytest.approx(1.0, abs=1e-9)


def test_run_is_deterministic():
    a = run(IDENTICAL3, Strategy.FUZZY_SAMPLE, RB, 77, 400, trace=True)
    b = run(IDENTICAL3, Strategy.FUZZY_SAMPLE, RB, 77, 400, trace=True)
    assert a == b


def test_balance_dominance():
    sampled = run(IDENTICAL3, Strategy.FUZZY_SAMPLE, RB, 5, 3000)
    first = run(IDENTICAL3, Strategy.ALWAYS_FIRST, RB, 5, 3000)
    assert first.max_share - first.min_share == 1.0
    assert sampled.max_share - sampled.min_share < first.max_share - first.min_share


def test_trace_for_baselines_records_scores():
    report = run(FAST_SLOW, Strategy.ROUND_ROBIN, RB, 0, 4, trace=True)
    assert [pl.chosen_id for pl in report.placements] == ["fast", "slow", "fast", "slow"]
    assert all(len(pl.scores) == 2 for pl in report.placements)


def test_negative_n_chunks():
    with pytest.raises(InvalidConfig):
        run(IDENTICAL3, Strategy.FUZZY_SAMPLE, RB, 0, -1)


def test_scores_fall_as_own_concentration_rises():
    # a resource's score never rises when more of the data moves onto it
    previous = None
    for c in range(0, 101):
        state = cluster(("me", 70, 99), ("other", 70, 99), counts=[c, 100 - c])
        p = simulator.score_state(state, RB)[0].p
        if previous is not None:
            assert p <= previous
        previous = p
