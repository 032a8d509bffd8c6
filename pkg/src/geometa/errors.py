"""Exception hierarchy shared by the library and the command-line tool."""


class GeoMetaError(Exception):
    """Base class for all errors raised by geometa."""


class DataError(GeoMetaError, ValueError):
    """Malformed or inconsistent input data (files, tables, datasets)."""


class EmbeddingFormatError(DataError):
    pass


class DimensionMismatchError(DataError):
    pass


class EmptyIntersectionError(DataError):
    pass


class DatasetError(DataError):
    pass


class SolverError(GeoMetaError, RuntimeError):
    """The optimizer could not make progress."""


class LineSearchError(SolverError):
    pass


class ManifoldError(SolverError):
    """A point left its manifold (step too large or numerical breakdown)."""
