"""Exception types shared across the package."""


class EdparseError(Exception):
    """Base class for all errors raised by this package."""


class ConlluError(EdparseError):
    """Malformed CoNLL-U input.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphError(EdparseError):
    """Invalid enhanced-graph structure (bad endpoints, duplicate arcs, ...)."""


class IllegalTransition(EdparseError):
    """A transition was applied in a configuration where it is not legal."""


class OracleDeadEnd(EdparseError):
    """The static oracle cannot derive the gold graph under the constraints."""


class AlignmentError(EdparseError):
    """Gold and predicted documents do not share sentence/token structure."""


class ModelFormatError(EdparseError):
    """A model file does not conform to the documented format."""
