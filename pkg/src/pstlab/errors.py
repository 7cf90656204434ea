"""Exception hierarchy shared across the package."""


class PstlabError(Exception):
    """Base class for all package errors."""


class GraphError(PstlabError, ValueError):
    """Invalid graph input or an operation outside its domain."""


class ParseError(PstlabError, ValueError):
    """Malformed textual input.

    ``offset`` is the byte (or line) position where decoding failed, when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class IntegrityError(PstlabError, RuntimeError):
    """A numeric or exact consistency check failed.

    Raised when an identity that must hold (moment sums, projector algebra,
    multiplicity agreement) is violated. Indicates a bug or an input outside
    the numeric envelope, never a property of the graph.
    """


class UnsupportedInputError(PstlabError, ValueError):
    """Input is well formed but outside what an operation supports."""


class NotHadamardError(PstlabError, ValueError):
    """A +-1 matrix whose rows are not pairwise orthogonal."""
