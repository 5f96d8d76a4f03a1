"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class DtkgError(Exception):
    """Base class for all errors raised by this package."""


# --- parsing -----------------------------------------------------------------


class ParseError(DtkgError):
    """A source text could not be parsed.

    ``line`` and ``column`` are 1-based; ``expected`` names the token class the
    parser was looking for, when there is one.
    """

    def __init__(self, message: str, line: int, column: int, expected: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"{line}:{column}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class TurtleSyntaxError(ParseError):
    pass


class UnknownPrefix(ParseError):
    def __init__(self, prefix: str, line: int, column: int):
        self.prefix = prefix
        super().__init__(f"undeclared prefix {prefix!r}", line, column)


class QuerySyntaxError(ParseError):
    pass


# --- schema / conversion -----------------------------------------------------


class SchemaError(DtkgError):
    """Raised for a single schema diagnostic; ``diagnostic`` carries the details."""

    kind = "SchemaError"

    def __init__(self, diagnostic):
        self.diagnostic = diagnostic
        super().__init__(diagnostic.message)


class MissingDomainOrRange(SchemaError):
    kind = "MissingDomainOrRange"


class DuplicateDomainOrRange(SchemaError):
    kind = "DuplicateDomainOrRange"


class UndeclaredClass(SchemaError):
    kind = "UndeclaredClass"


class UndeclaredPredicate(SchemaError):
    kind = "UndeclaredPredicate"


class UntypedEntity(SchemaError):
    kind = "UntypedEntity"


class MultipleClasses(SchemaError):
    kind = "MultipleClasses"


class DomainViolation(SchemaError):
    kind = "DomainViolation"


class RangeViolation(SchemaError):
    kind = "RangeViolation"


SCHEMA_ERRORS = {
    cls.kind: cls
    for cls in (
        MissingDomainOrRange,
        DuplicateDomainOrRange,
        UndeclaredClass,
        UndeclaredPredicate,
        UntypedEntity,
        MultipleClasses,
        DomainViolation,
        RangeViolation,
    )
}


class ConversionError(DtkgError):
    """A conversion report carried diagnostics, so no typed graph can be built."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        n = len(self.diagnostics)
        super().__init__(f"{n} diagnostic{'s' if n != 1 else ''}: " + "; ".join(d.message for d in self.diagnostics[:3]))


# --- kernel ------------------------------------------------------------------


class KernelError(DtkgError):
    pass


class NameCollision(KernelError):
    pass


class DuplicateName(KernelError):
    pass


class UnknownName(KernelError):
    pass


class KernelTypeError(KernelError):
    """A witness does not fit its relation's domain or range."""


class IllTyped(KernelError):
    def __init__(self, path: str, expected: str, actual: str):
        self.path = path
        self.expected = expected
        self.actual = actual
        super().__init__(f"{path}: expected {expected}, got {actual}")


class TypeMismatch(KernelError):
    pass


class InvalidCoercion(KernelError):
    pass


# --- query language ----------------------------------------------------------


class QueryError(DtkgError):
    """Resolution error in a query file or goal; may carry a source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line is not None else message)


class UnknownType(QueryError):
    pass


class UnknownRecord(QueryError):
    pass


class UnknownTerm(QueryError):
    pass


class NoCoercibleField(QueryError):
    pass


class MultipleCoercibleFields(QueryError):
    pass


class CyclicRecord(QueryError):
    pass


class DuplicateDeclaration(QueryError):
    pass


class ArityMismatch(QueryError):
    pass


class ArgumentTypeMismatch(QueryError):
    pass


# --- engine / oracle ---------------------------------------------------------


class EngineError(DtkgError):
    pass


class NotARecordGoal(EngineError):
    pass


class NotDirectForm(EngineError):
    pass


class UnknownRelation(EngineError):
    pass


class OracleError(DtkgError):
    pass


class UnboundProjection(OracleError):
    pass


class NotTranslatable(OracleError):
    pass
