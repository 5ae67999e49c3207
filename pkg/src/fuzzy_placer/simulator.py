"""A synthetic storage cluster that places chunks one at a time.

Each fuzzy step scores every resource with its live concentration (share of
all placed chunks, measured before the pending placement), picks a target and
records the placement. Baseline strategies ignore the scores. Chunks all have
the same size, and speed and reliability stay fixed for the whole run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DuplicateResourceId, InvalidConfig, UnknownResource, ZeroMass
from .inference import RuleBase
from .resources import ResourceMetrics, ResourceScore, resource_probability
from .selector import normalize, pick_index, select_argmax, uniform_draw


class Strategy(str, enum.Enum):
    FUZZY_ARGMAX = "fuzzy-argmax"
    FUZZY_SAMPLE = "fuzzy-sample"
    ROUND_ROBIN = "round-robin"
    ALWAYS_FIRST = "always-first"

    @property
    def is_fuzzy(self) -> bool:
        return self in (Strategy.FUZZY_ARGMAX, Strategy.FUZZY_SAMPLE)


@dataclass(frozen=True)
class SimResource:
    id: str
    speed: float
    reliability: float
    placed_chunks: int = 0

    def __post_init__(self):
        # reuse the metric range checks; concentration is derived, not stored
        ResourceMetrics(self.speed, self.reliability, 0.0)
        if self.placed_chunks < 0:
            raise InvalidConfig(f"resource {self.id!r}: placed_chunks must be >= 0")


@dataclass(frozen=True)
class ClusterState:
    resources: tuple[SimResource, ...]
    total_placed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "resources", tuple(self.resources))
        if not self.resources:
            raise InvalidConfig("a cluster needs at least one resource")
        ids = [r.id for r in self.resources]
        if len(set(ids)) != len(ids):
            raise DuplicateResourceId(f"duplicate resource ids in {ids}")
        if self.total_placed != sum(r.placed_chunks for r in self.resources):
            raise InvalidConfig("total_placed must equal the sum of placed_chunks")

    @classmethod
    def fresh(cls, resources: Sequence[SimResource]) -> "ClusterState":
        rs = tuple(resources)
        return cls(rs, sum(r.placed_chunks for r in rs))

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.resources]

    def index_of(self, resource_id: str) -> int:
        for i, r in enumerate(self.resources):
            if r.id == resource_id:
                return i
        raise UnknownResource(resource_id)


@dataclass(frozen=True)
class Placement:
    step: int
    chosen_id: str
    scores: tuple[float, ...]


@dataclass
class SimulationReport:
    """Final counts and shares of a run; ``placements`` is filled only when tracing."""

    per_resource_counts: dict[str, int]
    per_resource_share: dict[str, float]
    max_share: float
    min_share: float
    shares_defined: bool
    placements: list[Placement] | None = None
    final_state: ClusterState | None = field(default=None, repr=False, compare=False)


def concentration_of(state: ClusterState, resource_id: str) -> float:
    """Percent of all placed chunks held by ``resource_id`` (0 on an empty cluster)."""
    r = state.resources[state.index_of(resource_id)]
    if state.total_placed == 0:
        return 0.0
    return 100.0 * r.placed_chunks / state.total_placed


def score_state(state: ClusterState, rb: RuleBase) -> list[ResourceScore]:
    return [
        resource_probability(
            ResourceMetrics(r.speed, r.reliability, concentration_of(state, r.id)), rb, r.id
        )
        for r in state.resources
    ]


def _choose(state, strategy, scores, seed, step_index) -> int:
    if strategy is Strategy.ALWAYS_FIRST:
        return 0
    if strategy is Strategy.ROUND_ROBIN:
        return step_index % len(state.resources)
    if strategy is Strategy.FUZZY_ARGMAX:
        return state.index_of(select_argmax(scores))
    u = uniform_draw(seed, step_index)
    try:
        weights = normalize(scores).weights
    except ZeroMass:
        # a step must always place its chunk
        return min(int(u * len(scores)), len(scores) - 1)
    return pick_index(weights, u)


def step(
    state: ClusterState,
    strategy: Strategy | str,
    rb: RuleBase,
    seed: int,
    step_index: int,
) -> tuple[ClusterState, str]:
    """Place one chunk and return ``(new_state, chosen_id)``. ``state`` is not modified."""
    new_state, chosen, _ = _step(state, Strategy(strategy), rb, seed, step_index, want_scores=False)
    return new_state, chosen


def _step(state, strategy, rb, seed, step_index, want_scores):
    scores = score_state(state, rb) if strategy.is_fuzzy or want_scores else None
    k = _choose(state, strategy, scores, seed, step_index)
    resources = list(state.resources)
    resources[k] = replace(resources[k], placed_chunks=resources[k].placed_chunks + 1)
    new_state = ClusterState(tuple(resources), state.total_placed + 1)
    return new_state, resources[k].id, scores


def run(
    initial: ClusterState,
    strategy: Strategy | str,
    rb: RuleBase,
    seed: int,
    n_chunks: int,
    trace: bool = False,
) -> SimulationReport:
    """Place ``n_chunks`` chunks sequentially, starting from ``initial``.

    Step indices start at 0, so fuzzy-sample draw ``k`` uses ``(seed, k)``.
    Counts and shares in the report cover the whole final state, including
    chunks that were already placed in ``initial``.
    """
    if n_chunks < 0:
        raise InvalidConfig(f"n_chunks must be >= 0, got {n_chunks}")
    strategy = Strategy(strategy)
    state = initial
    placements = [] if trace else None
    for k in range(n_chunks):
        state, chosen, scores = _step(state, strategy, rb, seed, k, want_scores=trace)
        if trace:
            placements.append(Placement(k, chosen, tuple(s.p for s in scores)))

    counts = {r.id: r.placed_chunks for r in state.resources}
    total = state.total_placed
    if total:
        shares = {rid: c / total for rid, c in counts.items()}
        max_share, min_share = max(shares.values()), min(shares.values())
    else:
        shares = {rid: 0.0 for rid in counts}
        max_share = min_share = 0.0
    report = SimulationReport(
        per_resource_counts=counts,
        per_resource_share=shares,
        max_share=max_share,
        min_share=min_share,
        shares_defined=total > 0,
        placements=placements,
        final_state=state,
    )
    assert not total or math.isclose(math.fsum(shares.values()), 1.0, abs_tol=1e-9)
    return report
