"""Exception hierarchy shared across the package."""


class RnAuditError(Exception):
    """Base class for all rnaudit errors."""


class GraphError(RnAuditError):
    """Invalid network construction input."""


class DuplicateItemIdError(GraphError):
    pass


class UnknownEndpointError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateRankError(GraphError):
    pass


class UnknownItemError(RnAuditError):
    """A node id was requested that is not in the network."""


class IngestError(RnAuditError):
    """Unrecoverable problem in a dump file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedLineError(IngestError):
    pass


class MalformedRowError(IngestError):
    pass


class NonPositiveRankError(IngestError):
    pass


class EmptyGenreSetError(RnAuditError):
    pass


class MissingCentralityError(RnAuditError):
    pass


class DegenerateBinningError(RnAuditError):
    """Only one bin carries edge mass; the mixing coefficient is undefined."""


class ZeroExposureError(RnAuditError):
    pass


class UnitMismatchError(RnAuditError):
    """Two labelled vectors do not share the same unit labels."""


class InfeasibleConfigError(RnAuditError):
    """Generator configuration cannot produce a valid network."""
