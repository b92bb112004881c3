"""Exception hierarchy shared by the algebra modules and the CLI."""


class QJWError(Exception):
    """Base class for all qjw errors."""


class ShapeMismatchError(QJWError):
    """Two maps or vectors live on incompatible module shapes."""


class IndexRangeError(QJWError):
    """A strand or generator index lies outside its allowed range."""


class SpecializationError(QJWError):
    """A denominator vanishes at the requested specialization point."""


class UnknownOperatorError(QJWError):
    """An operator identifier is not registered."""
