"""Linguistic variables, conjunctive rules and the Mamdani inference pipeline.

Operators: AND is ``min``, a complemented atom reads ``1 - mu``, implication
clips the consequent at the firing strength, aggregation takes the pointwise
``max`` and the crisp answer is the centroid of the aggregate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InvalidConfig, MissingInput, UnknownTerm, UnknownVariable
from .membership import (
    AggregatedOutput,
    MembershipFunction,
    aggregate,
    defuzzify_centroid,
    implicate,
    membership_degree,
)


@dataclass(frozen=True)
class LinguisticVariable:
    """A named universe of discourse carrying named fuzzy terms."""

    name: str
    universe: tuple[float, float]
    terms: Mapping[str, MembershipFunction] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise InvalidConfig("variable name must be a non-empty string")
        lo, hi = (float(v) for v in self.universe)
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise InvalidConfig(f"variable {self.name!r}: universe min must be < max, got [{lo}, {hi}]")
        object.__setattr__(self, "universe", (lo, hi))
        terms = dict(self.terms)
        for term, mf in terms.items():
            if not isinstance(mf, MembershipFunction):
                mf = MembershipFunction(mf)
                terms[term] = mf
            for x in mf.xs:
                if not lo <= x <= hi:
                    raise InvalidConfig(
                        f"variable {self.name!r}: term {term!r} has breakpoint x={x} outside universe [{lo}, {hi}]"
                    )
        object.__setattr__(self, "terms", terms)

    def term(self, name: str) -> MembershipFunction:
        try:
            return self.terms[name]
        except KeyError:
            raise UnknownTerm(self.name, name) from None

    @property
    def midpoint(self) -> float:
        lo, hi = self.universe
        return (lo + hi) / 2.0


@dataclass(frozen=True)
class RuleAtom:
    """``variable IS term``, or ``variable IS NOT term`` when ``complemented``."""

    variable: str
    term: str
    complemented: bool = False


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[RuleAtom, ...]
    consequent: RuleAtom

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(self.antecedent))
        if not self.antecedent:
            raise InvalidConfig("rule antecedent must contain at least one atom")
        if self.consequent.complemented:
            raise InvalidConfig("rule consequent cannot be complemented")


@dataclass(frozen=True)
class RuleBase:
    """Input variables, one output variable and the rules linking them."""

    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rules: tuple[Rule, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [v.name for v in self.inputs]
        if len(set(names)) != len(names):
            raise InvalidConfig(f"input variable names must be unique: {names}")
        if self.output.name in names:
            raise InvalidConfig(f"output variable {self.output.name!r} is also an input")
        if not self.rules:
            raise InvalidConfig("a rulebase needs at least one rule")
        variables = self.input_map
        for k, rule in enumerate(self.rules):
            for atom in rule.antecedent:
                if atom.variable == self.output.name:
                    raise InvalidConfig(f"rule {k}: antecedent references the output variable")
                if atom.variable not in variables:
                    raise InvalidConfig(f"rule {k}: unknown input variable {atom.variable!r}")
                if atom.term not in variables[atom.variable].terms:
                    raise InvalidConfig(f"rule {k}: variable {atom.variable!r} has no term {atom.term!r}")
            if rule.consequent.variable != self.output.name:
                raise InvalidConfig(
                    f"rule {k}: consequent must use the output variable {self.output.name!r}"
                )
            if rule.consequent.term not in self.output.terms:
                raise InvalidConfig(f"rule {k}: output has no term {rule.consequent.term!r}")

    @property
    def input_map(self) -> dict[str, LinguisticVariable]:
        return {v.name: v for v in self.inputs}

    @property
    def variables(self) -> dict[str, LinguisticVariable]:
        return {**self.input_map, self.output.name: self.output}


def _lookup(variables, name: str) -> LinguisticVariable:
    if isinstance(variables, Mapping):
        if name in variables:
            return variables[name]
    else:
        for v in variables:
            if v.name == name:
                return v
    raise UnknownVariable(name)


def atom_degree(
    atom: RuleAtom,
    variables: Mapping[str, LinguisticVariable] | Sequence[LinguisticVariable],
    inputs: Mapping[str, float],
) -> float:
    """Degree to which the crisp input satisfies ``atom``.

    Raises:
        UnknownVariable, UnknownTerm: if the atom does not resolve.
        MissingInput: if ``inputs`` has no value for the atom's variable.
    """
    mf = _lookup(variables, atom.variable).term(atom.term)
    if atom.variable not in inputs:
        raise MissingInput(atom.variable)
    mu = membership_degree(mf, inputs[atom.variable])
    return 1.0 - mu if atom.complemented else mu


def firing_strength(rule: Rule, variables, inputs: Mapping[str, float]) -> float:
    return min(atom_degree(atom, variables, inputs) for atom in rule.antecedent)


def aggregate_rules(rb: RuleBase, inputs: Mapping[str, float]) -> AggregatedOutput:
    variables = rb.input_map
    clipped = [
        implicate(rb.output.term(rule.consequent.term), firing_strength(rule, variables, inputs))
        for rule in rb.rules
    ]
    return aggregate(clipped)


def infer(rb: RuleBase, inputs: Mapping[str, float]) -> float:
    """Run the full Mamdani pipeline and return the crisp output.

    Raises:
        DegenerateOutput: when every rule fires at 0.
    """
    missing = [v.name for v in rb.inputs if v.name not in inputs]
    if missing:
        raise MissingInput(missing[0])
    return defuzzify_centroid(aggregate_rules(rb, inputs), rb.output.universe)
