"""Exception types raised across the package."""


class FuzzyPlacerError(Exception):
    """Base class for every error raised by fuzzy_placer."""


class InvalidConfig(FuzzyPlacerError, ValueError):
    """A membership function, variable or rulebase violates its invariants."""


class UnknownVariable(FuzzyPlacerError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown variable {self.name!r}"


class UnknownTerm(FuzzyPlacerError, KeyError):
    def __init__(self, variable, term):
        super().__init__(variable, term)
        self.variable = variable
        self.term = term

    def __str__(self):
        return f"variable {self.variable!r} has no term {self.term!r}"


class EmptyRuleSet(FuzzyPlacerError, ValueError):
    """Aggregation was asked to combine zero curves."""


class DegenerateOutput(FuzzyPlacerError, ArithmeticError):
    """The aggregated output has zero area, i.e. no rule fired."""


class InvalidMetrics(FuzzyPlacerError, ValueError):
    """A resource metric is out of range. ``field`` names the offending input."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message


class DuplicateResourceId(FuzzyPlacerError, ValueError):
    pass


class UnknownResource(FuzzyPlacerError, KeyError):
    pass


class EmptyScoreSet(FuzzyPlacerError, ValueError):
    pass


class ZeroMass(FuzzyPlacerError, ArithmeticError):
    """Every score is zero, so the scores cannot be normalized."""


class DocumentError(InvalidConfig):
    """Error in a file, addressed by line/column and field path.

    Attributes:
        path: dotted field path inside the document (``""`` for the root).
        line: 1-based line number, or None when the position is unknown.
        column: 1-based column number, or None.
    """

    def __init__(self, message, path="", line=None, column=None, source=None):
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self._render())

    def _render(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(f"line {self.line}, column {self.column}")
        prefix = ":".join(where)
        field = f"{self.path}: " if self.path else ""
        return f"{prefix}: {field}{self.message}" if prefix else f"{field}{self.message}"


class ParseError(DocumentError):
    """The file could not be read or is not well-formed."""


class ValidationError(DocumentError):
    """The file is well-formed but describes an invalid object."""


class MissingInput(FuzzyPlacerError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no crisp input for variable {self.name!r}"
