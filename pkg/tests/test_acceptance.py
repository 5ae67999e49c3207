"""Acceptance suite.

Each test carries a ``criterion`` marker; conftest prints a PASS/FAIL line per
criterion after the run. Tolerances are fixed here and never loosened.
"""

import io
import itertools
import math

import numpy as np
import pytest

from fuzzy_placer import cli, config
from fuzzy_placer.errors import DocumentError, ZeroMass
from fuzzy_placer.membership import MembershipFunction, aggregate, defuzzify_centroid, implicate
from fuzzy_placer.resources import ResourceMetrics, ResourceScore, paper_rulebase, resource_probability
from fuzzy_placer.selector import SelectionDistribution, normalize, sample, select_argmax
from fuzzy_placer.simulator import ClusterState, SimResource, Strategy, run

from mutations import fuzzed_documents
from oracles import default_scores_oracle, mamdani_oracle, random_curve

RB = paper_rulebase()

CENTROID_TOL = 1e-4
ENDPOINT_TOL = 1e-6
SCALING_TOL = 1e-9
FREQUENCY_TOL = 0.01
RECONSTRUCTION_TOL = 1e-12
SHARE_RANGE = (0.283, 0.383)

BEST, WORST = 0.833333, 0.166667


def random_aggregates(n, seed):
    """``n`` random clipped-and-merged outputs with the raw terms kept for the oracle."""
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n:
        lo = float(rng.uniform(-50, 50))
        universe = (lo, lo + float(rng.choice([1.0, 10.0, 100.0])) * float(rng.uniform(0.2, 1.0)))
        terms = []
        for _ in range(int(rng.integers(1, 5))):
            strength = 1.0 if rng.uniform() < 0.2 else float(rng.uniform(0.0, 1.0))
            terms.append((random_curve(rng, *universe), strength))
        agg = aggregate([implicate(MembershipFunction(bps), s) for bps, s in terms])
        if agg.curve.is_zero():
            continue
        cases.append((universe, terms, agg))
    return cases


AGGREGATES = random_aggregates(100, seed=20_240_601)


# -- 1 -----------------------------------------------------------------------


@pytest.mark.criterion(1, "closed-form centroid matches 10,001-point oracle within 1e-4 on 100 aggregates")
def test_centroid_matches_oracle():
    errors = [abs(defuzzify_centroid(agg, universe) - mamdani_oracle(terms, universe)) for universe, terms, agg in AGGREGATES]
    assert len(errors) == 100
    assert max(errors) <= CENTROID_TOL, max(errors)


# -- 2 -----------------------------------------------------------------------


@pytest.mark.criterion(2, "default shapes give 0.833333 and 0.166667 at the extreme inputs (+-1e-6)")
@pytest.mark.parametrize("inputs, expected", [((100, 100, 0), BEST), ((0, 0, 100), WORST)])
def test_endpoints(inputs, expected):
    # golden confirmed by the discretized oracle first
    assert default_scores_oracle(*inputs) == pytest.approx(expected, abs=1e-4)
    p = resource_probability(ResourceMetrics(*inputs), RB).p
    assert abs(p - expected) <= ENDPOINT_TOL


# -- 3 -----------------------------------------------------------------------


@pytest.mark.criterion(3, "11x11x11 grid: p rises with speed and reliability, falls with concentration")
def test_monotonicity_grid():
    axis = np.linspace(0, 100, 11)
    p = np.empty((11, 11, 11))
    for i, j, k in itertools.product(range(11), repeat=3):
        p[i, j, k] = resource_probability(ResourceMetrics(axis[i], axis[j], axis[k]), RB).p
    violations = (
        int(np.sum(np.diff(p, axis=0) < 0))
        + int(np.sum(np.diff(p, axis=1) < 0))
        + int(np.sum(np.diff(p, axis=2) > 0))
    )
    assert violations == 0


# -- 4 -----------------------------------------------------------------------


@pytest.mark.criterion(4, "centroid invariant under curve scaling (1e-9); argmax invariant under score scaling")
@pytest.mark.parametrize("c", [0.1, 0.5, 1.0])
def test_centroid_scaling(c):
    for universe, _, agg in AGGREGATES:
        assert abs(defuzzify_centroid(agg.scaled(c), universe) - defuzzify_centroid(agg, universe)) <= SCALING_TOL


@pytest.mark.criterion(4, "centroid invariant under curve scaling (1e-9); argmax invariant under score scaling")
@pytest.mark.parametrize("c", [0.01, 1, 100])
def test_argmax_scaling(c):
    rng = np.random.default_rng(4)
    for _ in range(200):
        ps = rng.uniform(0, 1, size=int(rng.integers(1, 9)))
        if rng.uniform() < 0.3:
            ps[int(rng.integers(len(ps)))] = ps.max()  # force a tie now and then
        base = [ResourceScore(f"r{i}", float(p)) for i, p in enumerate(ps)]
        scaled = [ResourceScore(s.resource_id, c * s.p) for s in base]
        assert select_argmax(base) == select_argmax(scaled)


# -- 5 -----------------------------------------------------------------------


def _draws(dist, seed, n):
    return [sample(dist, seed, k) for k in range(n)]


@pytest.mark.criterion(5, "100,000 seeded draws within +-0.01 of each weight; reruns bit-identical")
@pytest.mark.parametrize("weights", [[0.3, 0.7], [0.1, 0.2, 0.3, 0.4]])
def test_sampler_statistics(weights):
    dist = SelectionDistribution(tuple(f"w{i}" for i in range(len(weights))), tuple(weights))
    picks = _draws(dist, 2024, 100_000)
    for rid, w in zip(dist.ids, weights):
        assert abs(picks.count(rid) / len(picks) - w) <= FREQUENCY_TOL
    assert _draws(dist, 2024, 5_000) == picks[:5_000]


# -- 6 -----------------------------------------------------------------------


@pytest.mark.criterion(6, "normalize(p)*S reconstructs p to 1e-12; ZeroMass exactly when all p are 0")
def test_normalization_contract():
    rng = np.random.default_rng(6)
    for _ in range(500):
        n = int(rng.integers(1, 12))
        ps = rng.uniform(0, 1, size=n)
        ps[rng.uniform(size=n) < 0.3] = 0.0
        scores = [ResourceScore(str(i), float(p)) for i, p in enumerate(ps)]
        total = math.fsum(ps)
        if total == 0:
            with pytest.raises(ZeroMass):
                normalize(scores)
            continue
        dist = normalize(scores)
        for p, w in zip(ps, dist.weights):
            assert abs(w * total - p) <= RECONSTRUCTION_TOL
    for n in (1, 2, 5):
        with pytest.raises(ZeroMass):
            normalize([ResourceScore(str(i), 0.0) for i in range(n)])
    # a single positive score among zeros is enough
    assert normalize([ResourceScore("a", 0.0), ResourceScore("b", 5e-324)]).weights == (0.0, 1.0)


# -- 7 -----------------------------------------------------------------------

IDENTICAL = ClusterState.fresh(SimResource(rid, 50, 95) for rid in "abc")


@pytest.mark.criterion(7, "3 identical resources, fuzzy-sample, 3,000 chunks: counts conserved, shares in [0.283, 0.383]")
def test_balance_and_conservation():
    report = run(IDENTICAL, Strategy.FUZZY_SAMPLE, RB, 12345, 3000)
    assert sum(report.per_resource_counts.values()) == 3000
    for share in report.per_resource_share.values():
        assert SHARE_RANGE[0] <= share <= SHARE_RANGE[1]
    baseline = run(IDENTICAL, Strategy.ALWAYS_FIRST, RB, 12345, 3000)
    assert baseline.max_share == 1.0


# -- 8 -----------------------------------------------------------------------


@pytest.mark.criterion(8, "simulate run twice with the same flags writes byte-identical reports")
def test_simulate_is_byte_identical(tmp_path):
    inventory = tmp_path / "inv.csv"
    inventory.write_text(
        "id,speed_mbs,reliability_pct,concentration_pct\nssd,90,99.5,0\nhdd,40,96,0\ntape,5,99.9,0\n",
        encoding="utf-8",
    )
    blobs = []
    for name in ("first.yaml", "second.yaml"):
        target = tmp_path / name
        argv = ["simulate", "--inventory", str(inventory), "--strategy", "sample", "--chunks", "2000",
                "--seed", "31337", "--trace", "--out", str(target)]
        assert cli.main(argv, out=io.StringIO(), err=io.StringIO()) == 0
        blobs.append(target.read_bytes())
    assert blobs[0] == blobs[1]
    assert len(blobs[0]) > 0


# -- 9 -----------------------------------------------------------------------


@pytest.mark.criterion(9, "rulebase round-trips; 20 fuzz-mutated documents rejected with located errors")
def test_rulebase_round_trip_and_fuzz():
    assert config.parse_rulebase(config.serialize_rulebase(RB)) == RB
    documents = fuzzed_documents(20, seed=9)
    assert len(documents) == 20
    for name, text in documents:
        with pytest.raises(DocumentError) as info:
            config.parse_rulebase(text)
        assert info.value.line is not None and info.value.line >= 1, name
        assert info.value.column is not None, name
