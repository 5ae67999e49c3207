"""Scoring storage resources by speed, reliability and concentration.

Two production rules drive the score:

1. speed high AND reliability high AND concentration low -> probability high
2. speed not high AND reliability not high AND concentration not low -> probability low

"not" is the complement ``1 - mu`` of the positive term. The default term
shapes below are engineering choices and can be overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DegenerateOutput, DuplicateResourceId, InvalidConfig, InvalidMetrics
from .inference import LinguisticVariable, Rule, RuleAtom, RuleBase, infer
from .membership import MembershipFunction

SPEED = "speed"
RELIABILITY = "reliability"
CONCENTRATION = "concentration"
PROBABILITY = "probability"

HIGH = "высокая"
LOW = "низкая"

DEFAULT_VARIABLES = {
    SPEED: {"universe": (0.0, 100.0), "terms": {HIGH: [(20.0, 0.0), (80.0, 1.0)]}},
    RELIABILITY: {"universe": (0.0, 100.0), "terms": {HIGH: [(90.0, 0.0), (99.9, 1.0)]}},
    CONCENTRATION: {"universe": (0.0, 100.0), "terms": {LOW: [(0.0, 1.0), (50.0, 0.0)]}},
    PROBABILITY: {
        "universe": (0.0, 1.0),
        "terms": {LOW: [(0.0, 1.0), (0.5, 0.0)], HIGH: [(0.5, 0.0), (1.0, 1.0)]},
    },
}


@dataclass(frozen=True)
class ResourceMetrics:
    """Crisp inputs of one resource.

    Args:
        speed: access speed in Mb/s, >= 0. Values past the last breakpoint
            of the speed terms saturate.
        reliability: percent of time in continuous operation, in [0, 100].
        concentration: percent of the stored information already on the
            resource, in [0, 100].
    """

    speed: float
    reliability: float
    concentration: float

    def __post_init__(self):
        for name in (SPEED, RELIABILITY, CONCENTRATION):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidMetrics(name, f"not a number: {value!r}") from None
            if not math.isfinite(value):
                raise InvalidMetrics(name, f"must be finite, got {value}")
            if value < 0.0:
                raise InvalidMetrics(name, f"must be >= 0, got {value}")
            if name != SPEED and value > 100.0:
                raise InvalidMetrics(name, f"must be a percentage in [0, 100], got {value}")
            object.__setattr__(self, name, value)

    def as_inputs(self) -> dict[str, float]:
        return {SPEED: self.speed, RELIABILITY: self.reliability, CONCENTRATION: self.concentration}


@dataclass(frozen=True)
class ResourceScore:
    resource_id: str
    p: float


def _variable(name: str, shape: Mapping) -> LinguisticVariable:
    return LinguisticVariable(
        name,
        tuple(shape["universe"]),
        {term: MembershipFunction(bps) for term, bps in shape["terms"].items()},
    )


def paper_rulebase(overrides: Mapping[str, Mapping] | None = None) -> RuleBase:
    """Build the two-rule rulebase, optionally replacing default shapes.

    ``overrides`` maps a variable name to a dict with an optional
    ``"universe"`` pair and an optional ``"terms"`` dict of
    ``term -> breakpoints``. Terms not mentioned keep their defaults::

        paper_rulebase({"speed": {"universe": (0, 1000),
                                  "terms": {"высокая": [(100, 0), (800, 1)]}}})

    Raises:
        InvalidConfig: on unknown variables/terms or shapes that break the
            variable invariants.
    """
    shapes = {name: {"universe": s["universe"], "terms": dict(s["terms"])} for name, s in DEFAULT_VARIABLES.items()}
    for name, override in (overrides or {}).items():
        if name not in shapes:
            raise InvalidConfig(f"override for unknown variable {name!r}")
        if not isinstance(override, Mapping) or not set(override) <= {"universe", "terms"}:
            raise InvalidConfig(f"override for {name!r} must be a mapping with 'universe' and/or 'terms'")
        if "universe" in override:
            universe = tuple(override["universe"])
            if len(universe) != 2:
                raise InvalidConfig(f"override for {name!r}: universe must be a (min, max) pair")
            shapes[name]["universe"] = universe
        for term, bps in dict(override.get("terms", {})).items():
            if term not in shapes[name]["terms"]:
                raise InvalidConfig(f"override for {name!r}: unknown term {term!r}")
            shapes[name]["terms"][term] = bps
    try:
        variables = {name: _variable(name, shape) for name, shape in shapes.items()}
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfig):
            raise
        raise InvalidConfig(f"malformed override: {exc}") from exc

    rules = (
        Rule(
            (RuleAtom(SPEED, HIGH), RuleAtom(RELIABILITY, HIGH), RuleAtom(CONCENTRATION, LOW)),
            RuleAtom(PROBABILITY, HIGH),
        ),
        Rule(
            (
                RuleAtom(SPEED, HIGH, complemented=True),
                RuleAtom(RELIABILITY, HIGH, complemented=True),
                RuleAtom(CONCENTRATION, LOW, complemented=True),
            ),
            RuleAtom(PROBABILITY, LOW),
        ),
    )
    return RuleBase(
        inputs=(variables[SPEED], variables[RELIABILITY], variables[CONCENTRATION]),
        output=variables[PROBABILITY],
        rules=rules,
    )


def resource_probability(m: ResourceMetrics, rb: RuleBase, resource_id: str = "") -> ResourceScore:
    """Score one resource. When no rule fires the score is the output universe midpoint."""
    try:
        p = infer(rb, m.as_inputs())
    except DegenerateOutput:
        p = rb.output.midpoint
    return ResourceScore(resource_id, p)


def score_all(resources: Sequence[tuple[str, ResourceMetrics]], rb: RuleBase) -> list[ResourceScore]:
    ids = [rid for rid, _ in resources]
    seen = set()
    for rid in ids:
        if rid in seen:
            raise DuplicateResourceId(f"duplicate resource id {rid!r}")
        seen.add(rid)
    return [resource_probability(m, rb, rid) for rid, m in resources]
