"""Mamdani fuzzy scoring of storage resources and placement selection."""

from .errors import (
    DegenerateOutput,
    DuplicateResourceId,
    EmptyRuleSet,
    EmptyScoreSet,
    FuzzyPlacerError,
    InvalidConfig,
    InvalidMetrics,
    MissingInput,
    ParseError,
    UnknownResource,
    UnknownTerm,
    UnknownVariable,
    ValidationError,
    ZeroMass,
)
from .inference import LinguisticVariable, Rule, RuleAtom, RuleBase, atom_degree, firing_strength, infer
from .membership import (
    AggregatedOutput,
    MembershipFunction,
    aggregate,
    defuzzify_centroid,
    implicate,
    membership_degree,
)
from .resources import ResourceMetrics, ResourceScore, paper_rulebase, resource_probability, score_all
from .selector import SelectionDistribution, normalize, sample, select_argmax
from .simulator import ClusterState, SimResource, SimulationReport, Strategy, concentration_of, run, step

__version__ = "0.1.0"

__all__ = [
    "DegenerateOutput",
    "DuplicateResourceId",
    "EmptyRuleSet",
    "EmptyScoreSet",
    "FuzzyPlacerError",
    "InvalidConfig",
    "InvalidMetrics",
    "MissingInput",
    "ParseError",
    "UnknownResource",
    "UnknownTerm",
    "UnknownVariable",
    "ValidationError",
    "ZeroMass",
    "LinguisticVariable",
    "Rule",
    "RuleAtom",
    "RuleBase",
    "atom_degree",
    "firing_strength",
    "infer",
    "AggregatedOutput",
    "MembershipFunction",
    "aggregate",
    "defuzzify_centroid",
    "implicate",
    "membership_degree",
    "ResourceMetrics",
    "ResourceScore",
    "paper_rulebase",
    "resource_probability",
    "score_all",
    "SelectionDistribution",
    "normalize",
    "sample",
    "select_argmax",
    "ClusterState",
    "SimResource",
    "SimulationReport",
    "Strategy",
    "concentration_of",
    "run",
    "step",
]
