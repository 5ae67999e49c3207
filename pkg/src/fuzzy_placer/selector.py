"""Choosing a placement target from resource scores.

Two strategies: take the highest score, or run a random trial where resource
``i`` wins with probability ``p_i / S``, ``S = sum(p)``.

Random draws are keyed, not streamed. Draw ``n`` under seed ``s`` takes the
first 64-bit word of Philox4x64-10 (numpy's ``Philox`` bit generator) with
``key=s`` and ``counter=n``, and maps it to ``u = (word >> 11) * 2**-53`` in
[0, 1). Any draw can be reproduced on its own, on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyScoreSet, InvalidConfig, ZeroMass
from .resources import ResourceScore

U64_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / (1 << 53)


@dataclass(frozen=True)
class SelectionDistribution:
    """Resource ids with normalized, non-negative weights."""

    ids: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.ids or len(self.ids) != len(self.weights):
            raise InvalidConfig("distribution needs matching, non-empty ids and weights")
        if any(not (w >= 0.0) for w in self.weights):
            raise InvalidConfig("weights must be non-negative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise InvalidConfig(f"weights sum to {math.fsum(self.weights)!r}, not 1")


def select_argmax(scores: Sequence[ResourceScore]) -> str:
    """Id of the highest score; the earliest one wins ties."""
    if not scores:
        raise EmptyScoreSet("no scores to select from")
    best = scores[0]
    for s in scores[1:]:
        if s.p > best.p:
            best = s
    return best.resource_id


def normalize(scores: Sequence[ResourceScore]) -> SelectionDistribution:
    """Divide every score by their sum.

    Raises:
        EmptyScoreSet: if ``scores`` is empty.
        ZeroMass: if every score is zero.
    """
    if not scores:
        raise EmptyScoreSet("no scores to normalize")
    ps = [s.p for s in scores]
    if any(not (p >= 0.0) for p in ps):
        raise InvalidConfig("scores must be non-negative")
    total = math.fsum(ps)
    if total == 0.0:
        raise ZeroMass("all scores are zero")
    weights = [p / total for p in ps]
    # push the rounding residue into the largest weight so the sum is 1 to the ulp
    residue = 1.0 - math.fsum(weights)
    if residue:
        k = max(range(len(weights)), key=weights.__getitem__)
        weights[k] += residue
    return SelectionDistribution(tuple(s.resource_id for s in scores), tuple(weights))


def uniform_draw(seed: int, draw_index: int) -> float:
    """The keyed uniform variate in [0, 1) for ``(seed, draw_index)``."""
    bitgen = np.random.Philox(key=int(seed) & U64_MASK, counter=int(draw_index) & U64_MASK)
    word = int(bitgen.random_raw())
    return (word >> 11) * _INV_2_53


def pick_index(weights: Sequence[float], u: float) -> int:
    """Smallest ``k`` whose cumulative weight exceeds ``u``.

    Cumulative sums run left to right; the last positive-weight bucket absorbs
    any rounding shortfall so every ``u`` in [0, 1) lands somewhere.
    """
    last = max(k for k, w in enumerate(weights) if w > 0.0)
    acc = 0.0
    for k, w in enumerate(weights):
        if w == 0.0:
            continue
        acc += w
        if u < acc or k == last:
            return k
    return last


def sample(dist: SelectionDistribution, seed: int, draw_index: int) -> str:
    """Roulette-wheel selection driven by the keyed draw ``(seed, draw_index)``."""
    return dist.ids[pick_index(dist.weights, uniform_draw(seed, draw_index))]
