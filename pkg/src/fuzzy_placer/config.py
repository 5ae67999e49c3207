"""Reading and writing the files the CLI works with.

Rulebase document (YAML, ``schema_version: 1``)::

    schema_version: 1
    output: probability
    variables:
      - name: speed
        universe: [0.0, 100.0]
        terms:
          высокая: [[20.0, 0.0], [80.0, 1.0]]
      ...
    rules:
      - if:
          - {variable: speed, term: высокая}
          - {variable: reliability, term: высокая, not: true}
        then: {variable: probability, term: высокая}

Every variable except ``output`` is an input. Errors carry the line, column
and field path of the offending node.

Inventory: CSV with header ``id,speed_mbs,reliability_pct,concentration_pct``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from pathlib import Path
from typing import Any

import yaml

from .errors import InvalidConfig, InvalidMetrics, ParseError, ValidationError
from .inference import LinguisticVariable, Rule, RuleAtom, RuleBase
from .membership import MembershipFunction, membership_degree
from .resources import ResourceMetrics, paper_rulebase

SCHEMA_VERSION = 1
RULEBASE_ENV = "FUZZY_PLACER_RULEBASE"
INVENTORY_HEADER = ("id", "speed_mbs", "reliability_pct", "concentration_pct")
CURVE_SAMPLES = 201


def fmt(value: float) -> str:
    """Fixed 6-decimal, locale-independent number formatting."""
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


# --------------------------------------------------------------------------
# rulebase documents


class _Doc:
    """Plain Python data from a YAML node tree plus the position of every node."""

    def __init__(self, source):
        self.source = source
        self.marks: dict[str, Any] = {}

    def convert(self, node, path=""):
        self.marks[path] = node.start_mark
        if isinstance(node, yaml.MappingNode):
            out = {}
            for key_node, value_node in node.value:
                key = self._loader.construct_object(key_node, deep=True)
                if not isinstance(key, str):
                    raise self.error(ParseError, f"mapping key must be a string, got {key!r}", path, key_node.start_mark)
                if key in out:
                    raise self.error(ParseError, f"duplicate key {key!r}", _join(path, key), key_node.start_mark)
                out[key] = self.convert(value_node, _join(path, key))
            return out
        if isinstance(node, yaml.SequenceNode):
            return [self.convert(item, f"{path}[{i}]") for i, item in enumerate(node.value)]
        return self._loader.construct_object(node, deep=True)

    def parse(self, text):
        self._loader = yaml.SafeLoader(text)
        try:
            root = self._loader.get_single_node()
        except yaml.MarkedYAMLError as exc:
            mark = exc.problem_mark or exc.context_mark
            raise self.error(ParseError, exc.problem or str(exc), "", mark) from None
        except yaml.YAMLError as exc:
            raise ParseError(str(exc), source=self.source) from None
        if root is None:
            raise ParseError("document is empty", line=1, column=1, source=self.source)
        return self.convert(root)

    def error(self, cls, message, path, mark=None):
        if mark is None:
            mark = self.mark_for(path)
        line = mark.line + 1 if mark is not None else None
        column = mark.column + 1 if mark is not None else None
        return cls(message, path=path, line=line, column=column, source=self.source)

    def mark_for(self, path):
        # fall back to the nearest enclosing node that has a position
        while path not in self.marks and path:
            cut = max(path.rfind("."), path.rfind("["))
            path = path[:cut] if cut > 0 else ""
        return self.marks.get(path)


def _join(path, key):
    return f"{path}.{key}" if path else str(key)


class _Validator:
    def __init__(self, doc: _Doc):
        self.doc = doc

    def fail(self, message, path):
        return self.doc.error(ValidationError, message, path)

    def mapping(self, value, path, required=(), optional=()):
        if not isinstance(value, dict):
            raise self.fail(f"expected a mapping, got {type(value).__name__}", path)
        for key in required:
            if key not in value:
                raise self.fail(f"missing required field {key!r}", path)
        unknown = set(value) - set(required) - set(optional)
        if unknown:
            raise self.fail(f"unknown field {sorted(unknown)[0]!r}", _join(path, sorted(unknown)[0]))
        return value

    def seq(self, value, path, min_len=0):
        if not isinstance(value, list):
            raise self.fail(f"expected a list, got {type(value).__name__}", path)
        if len(value) < min_len:
            raise self.fail(f"expected at least {min_len} item(s), got {len(value)}", path)
        return value

    def number(self, value, path):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(f"expected a number, got {value!r}", path)
        value = float(value)
        if not math.isfinite(value):
            raise self.fail(f"number must be finite, got {value}", path)
        return value

    def name(self, value, path):
        if not isinstance(value, str) or not value:
            raise self.fail(f"expected a non-empty string, got {value!r}", path)
        return value

    def variable(self, raw, path):
        self.mapping(raw, path, required=("name", "universe", "terms"))
        name = self.name(raw["name"], _join(path, "name"))
        upath = _join(path, "universe")
        universe = self.seq(raw["universe"], upath, 2)
        if len(universe) != 2:
            raise self.fail("universe must be a [min, max] pair", upath)
        lo, hi = (self.number(v, f"{upath}[{i}]") for i, v in enumerate(universe))
        if not lo < hi:
            raise self.fail(f"universe min must be < max, got [{lo}, {hi}]", upath)
        tpath = _join(path, "terms")
        terms_raw = raw["terms"]
        if not isinstance(terms_raw, dict):
            raise self.fail(f"expected a mapping of term names, got {type(terms_raw).__name__}", tpath)
        if not terms_raw:
            raise self.fail("a variable needs at least one term", tpath)
        terms = {}
        for term, bps_raw in terms_raw.items():
            bpath = _join(tpath, term)
            self.seq(bps_raw, bpath, 2)
            points = []
            for i, pair in enumerate(bps_raw):
                ppath = f"{bpath}[{i}]"
                self.seq(pair, ppath, 2)
                if len(pair) != 2:
                    raise self.fail("breakpoint must be an [x, mu] pair", ppath)
                x = self.number(pair[0], f"{ppath}[0]")
                mu = self.number(pair[1], f"{ppath}[1]")
                if not 0.0 <= mu <= 1.0:
                    raise self.fail(f"degree {mu} outside [0, 1]", f"{ppath}[1]")
                if not lo <= x <= hi:
                    raise self.fail(f"breakpoint x={x} outside universe [{lo}, {hi}]", f"{ppath}[0]")
                if points and x <= points[-1][0]:
                    raise self.fail("breakpoint x values must be strictly increasing", f"{ppath}[0]")
                points.append((x, mu))
            terms[term] = MembershipFunction(points)
        return LinguisticVariable(name, (lo, hi), terms)

    def atom(self, raw, path, variables, allow_not):
        self.mapping(raw, path, required=("variable", "term"), optional=("not",))
        var = self.name(raw["variable"], _join(path, "variable"))
        term = self.name(raw["term"], _join(path, "term"))
        negated = raw.get("not", False)
        if not isinstance(negated, bool):
            raise self.fail(f"'not' must be true or false, got {negated!r}", _join(path, "not"))
        if negated and not allow_not:
            raise self.fail("a rule consequent cannot be negated", _join(path, "not"))
        if var not in variables:
            raise self.fail(f"unknown variable {var!r}", _join(path, "variable"))
        if term not in variables[var].terms:
            raise self.fail(f"variable {var!r} has no term {term!r}", _join(path, "term"))
        return RuleAtom(var, term, negated)

    def rulebase(self, raw):
        self.mapping(raw, "", required=("schema_version", "output", "variables", "rules"))
        version = raw["schema_version"]
        if version != SCHEMA_VERSION or isinstance(version, bool):
            raise self.fail(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})", "schema_version")
        variables = {}
        for i, vraw in enumerate(self.seq(raw["variables"], "variables", 2)):
            var = self.variable(vraw, f"variables[{i}]")
            if var.name in variables:
                raise self.fail(f"duplicate variable name {var.name!r}", f"variables[{i}].name")
            variables[var.name] = var
        output = self.name(raw["output"], "output")
        if output not in variables:
            raise self.fail(f"output names undefined variable {output!r}", "output")
        inputs = {n: v for n, v in variables.items() if n != output}
        rules = []
        for k, rraw in enumerate(self.seq(raw["rules"], "rules", 1)):
            rpath = f"rules[{k}]"
            self.mapping(rraw, rpath, required=("if", "then"))
            antecedent = []
            for j, araw in enumerate(self.seq(rraw["if"], f"{rpath}.if", 1)):
                apath = f"{rpath}.if[{j}]"
                if isinstance(araw, dict) and araw.get("variable") == output:
                    raise self.fail("antecedent cannot reference the output variable", _join(apath, "variable"))
                antecedent.append(self.atom(araw, apath, inputs, allow_not=True))
            consequent = self.atom(rraw["then"], f"{rpath}.then", {output: variables[output]}, allow_not=False)
            rules.append(Rule(tuple(antecedent), consequent))
        try:
            return RuleBase(tuple(inputs.values()), variables[output], tuple(rules))
        except InvalidConfig as exc:
            raise self.fail(str(exc), "") from exc


def parse_rulebase(text: str, source: str | None = None) -> RuleBase:
    """Parse and validate a rulebase document.

    Raises:
        ParseError: malformed YAML or duplicate keys.
        ValidationError: well-formed document describing an invalid rulebase.
    """
    doc = _Doc(source)
    return _Validator(doc).rulebase(doc.parse(text))


def load_rulebase(path: str | os.PathLike | None = None, allow_defaults: bool = False) -> RuleBase:
    """Load a rulebase file.

    ``path=None`` means the built-in default rulebase. A missing file is an
    error unless ``allow_defaults`` is set, in which case the defaults are
    returned instead.
    """
    if path is None:
        return paper_rulebase()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        if allow_defaults:
            return paper_rulebase()
        raise ParseError("file not found", source=str(path)) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read file: {exc}", source=str(path)) from None
    return parse_rulebase(text, source=str(path))


def rulebase_to_dict(rb: RuleBase) -> dict:
    def var(v: LinguisticVariable):
        return {
            "name": v.name,
            "universe": [v.universe[0], v.universe[1]],
            "terms": {t: [[x, mu] for x, mu in mf.breakpoints] for t, mf in v.terms.items()},
        }

    def atom(a: RuleAtom):
        d = {"variable": a.variable, "term": a.term}
        if a.complemented:
            d["not"] = True
        return d

    return {
        "schema_version": SCHEMA_VERSION,
        "output": rb.output.name,
        "variables": [var(v) for v in (*rb.inputs, rb.output)],
        "rules": [{"if": [atom(a) for a in r.antecedent], "then": atom(r.consequent)} for r in rb.rules],
    }


def serialize_rulebase(rb: RuleBase) -> str:
    """YAML text for ``rb``; floats are written with ``repr`` so they round-trip exactly."""
    return yaml.safe_dump(rulebase_to_dict(rb), sort_keys=False, allow_unicode=True, default_flow_style=None)


def resolve_rulebase_path(flag_value: str | None) -> str | None:
    """``--rulebase`` wins over ``$FUZZY_PLACER_RULEBASE``; None means built-in defaults."""
    if flag_value:
        return flag_value
    return os.environ.get(RULEBASE_ENV) or None


# --------------------------------------------------------------------------
# inventory


def parse_inventory(text: str, source: str | None = None) -> list[tuple[str, ResourceMetrics]]:
    """Parse inventory CSV rows into ``(id, metrics)`` pairs, in file order."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ParseError("inventory is empty", line=1, column=1, source=source)
    header = tuple(h.strip() for h in rows[0])
    if header != INVENTORY_HEADER:
        raise ParseError(f"header must be {','.join(INVENTORY_HEADER)}", path="header", line=1, column=1, source=source)
    out = []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(INVENTORY_HEADER):
            raise ParseError(f"expected {len(INVENTORY_HEADER)} fields, got {len(row)}", line=lineno, column=1, source=source)
        rid = row[0].strip()
        if not rid:
            raise ValidationError("empty resource id", path="id", line=lineno, column=1, source=source)
        if rid in seen:
            raise ValidationError(f"duplicate resource id {rid!r}", path="id", line=lineno, column=1, source=source)
        seen.add(rid)
        values = []
        for col, (name, cell) in enumerate(zip(INVENTORY_HEADER[1:], row[1:]), start=2):
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", path=name, line=lineno, column=col, source=source) from None
        try:
            metrics = ResourceMetrics(*values)
        except InvalidMetrics as exc:
            col = {"speed": 2, "reliability": 3, "concentration": 4}[exc.field]
            raise ValidationError(str(exc), path=INVENTORY_HEADER[col - 1], line=lineno, column=col, source=source) from None
        out.append((rid, metrics))
    return out


def load_inventory(path: str | os.PathLike) -> list[tuple[str, ResourceMetrics]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read inventory: {exc}", source=str(path)) from None
    return parse_inventory(text, source=str(path))


# --------------------------------------------------------------------------
# outputs


def curve_rows(variable: LinguisticVariable, samples: int = CURVE_SAMPLES) -> list[list[float]]:
    """``[x, mu_term1, mu_term2, ...]`` rows over the universe.

    ``samples`` evenly spaced points plus every term breakpoint not already on
    the grid, sorted by ``x``.
    """
    lo, hi = variable.universe
    xs = [lo + (hi - lo) * i / (samples - 1) for i in range(samples)]
    xs.extend(x for mf in variable.terms.values() for x in mf.xs)
    xs.sort()
    merged = []
    for x in xs:
        if merged and x - merged[-1] <= 1e-12 * max(1.0, abs(x)):
            continue
        merged.append(x)
    return [[x, *(membership_degree(mf, x) for mf in variable.terms.values())] for x in merged]


def curves_csv(variable: LinguisticVariable, samples: int = CURVE_SAMPLES) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", *variable.terms])
    for row in curve_rows(variable, samples):
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


class _ReportDumper(yaml.SafeDumper):
    pass


def _represent_float(dumper, value):
    return dumper.represent_scalar("tag:yaml.org,2002:float", fmt(value))


_ReportDumper.add_representer(float, _represent_float)


def report_to_dict(report, strategy: str, seed: int, chunks: int) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "strategy": strategy,
        "seed": seed,
        "chunks": chunks,
        "shares_defined": report.shares_defined,
        "counts": dict(report.per_resource_counts),
        "shares": dict(report.per_resource_share),
        "max_share": report.max_share,
        "min_share": report.min_share,
    }
    if report.placements is not None:
        ids = list(report.per_resource_counts)
        doc["trace"] = {
            "columns": ["step", "chosen_id", *(f"p_{i}" for i in range(1, len(ids) + 1))],
            "resources": ids,
            "rows": [[pl.step, pl.chosen_id, *pl.scores] for pl in report.placements],
        }
    return doc


def dump_report(report, strategy: str, seed: int, chunks: int) -> str:
    return yaml.dump(
        report_to_dict(report, strategy, seed, chunks),
        Dumper=_ReportDumper,
        sort_keys=False,
        allow_unicode=True,
        default_flow_style=None,
        width=1_000_000,
    )
