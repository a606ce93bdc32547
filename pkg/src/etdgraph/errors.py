"""Exception hierarchy shared by all modules.

Everything user-facing derives from EtdError so the CLI can map
validation problems to one exit code.
"""


class EtdError(Exception):
    """Base class for all data and validation errors."""


# -- model ------------------------------------------------------------------

class InvalidIri(EtdError):
    pass


class InvalidDate(EtdError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InvalidInterval(EtdError):
    pass


class InvalidLiteral(EtdError):
    pass


# -- vocab ------------------------------------------------------------------

class UnknownProperty(EtdError):
    pass


# -- store ------------------------------------------------------------------

class KindMismatch(EtdError):
    pass


class InvalidTriple(EtdError):
    pass


# -- ingest -----------------------------------------------------------------

class RecordSyntaxError(EtdError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownKey(RecordSyntaxError):
    pass


class MissingRequiredKey(RecordSyntaxError):
    pass


class DuplicateLocalId(RecordSyntaxError):
    pass


class InvalidLocalId(EtdError):
    pass


class DanglingReference(EtdError):
    pass


class IngestError(EtdError):
    """Raised when a batch has errors; carries the full report."""

    def __init__(self, report):
        self.report = report
        first = report.errors[0] if report.errors else None
        super().__init__(
            f"{len(report.errors)} error(s) in batch"
            + (f", first: {first}" if first else "")
        )


class NotFound(EtdError):
    pass


# -- reason -----------------------------------------------------------------

class NotABody(EtdError):
    pass


class NotAPerson(EtdError):
    pass


class HierarchyCycle(EtdError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("hierarchy cycle: " + " -> ".join(str(c) for c in self.cycle))


class SequenceCycle(EtdError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("succession cycle: " + " -> ".join(str(c) for c in self.cycle))


class AmbiguousSuccession(EtdError):
    def __init__(self, body, successors):
        self.body = body
        self.successors = list(successors)
        super().__init__(
            f"{body} has {len(self.successors)} successors: "
            + ", ".join(str(s) for s in self.successors)
        )


# -- query ------------------------------------------------------------------

class QueryParseError(EtdError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        suffix = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{suffix}")


class UnboundSelectVariable(EtdError):
    pass


# -- io ---------------------------------------------------------------------

class QuadParseError(EtdError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DanglingContext(EtdError):
    pass


# -- cli --------------------------------------------------------------------

class PortInUse(EtdError):
    pass
