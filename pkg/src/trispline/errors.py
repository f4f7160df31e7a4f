"""Exception hierarchy shared by the whole package."""


class TrisplineError(Exception):
    """Base class for all package errors."""


class GeometryError(TrisplineError, ValueError):
    """Degenerate triangle, zero-length edge or a direction parallel to an edge."""


class DomainError(TrisplineError, ValueError):
    """Evaluation point outside the triangle (or mesh) it was requested on."""

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class PreconditionError(TrisplineError, ValueError):
    """An operation was called on input violating its documented precondition."""


class MeshError(TrisplineError, ValueError):
    """Non-conforming mesh structure (T-junction, overlap, bad indices)."""

    def __init__(self, message, triangles=None):
        super().__init__(message)
        self.triangles = triangles


class TupleValidationError(TrisplineError, ValueError):
    """A shape-function tuple failed a required validation; carries the report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
