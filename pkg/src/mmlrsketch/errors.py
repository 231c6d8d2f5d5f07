"""Exception types raised across the package."""


class MmlrError(Exception):
    """Base class for all package errors."""


class DimensionError(MmlrError, ValueError):
    """Shapes do not conform, or a size constraint such as n <= c <= m fails."""


class RankDeficient(MmlrError):
    """A matrix required to have full column rank is numerically rank deficient."""


class RankNotPreserved(MmlrError):
    """The sketched basis S @ Q lost rank, so a rank-preserving construction is undefined."""


class InvalidOrder(MmlrError, ValueError):
    """Schatten order below 1."""


class InvalidWeights(MmlrError, ValueError):
    """Sampling probabilities are not strictly positive or do not sum to one."""


class InvalidMatrix(MmlrError, ValueError):
    """Input is not a finite real two-dimensional array."""


class EmptySubspace(MmlrError, ValueError):
    """An operation needs a subspace of dimension at least one."""


class NotApplicable(MmlrError):
    """A bound was requested on an instance that violates its hypotheses."""


class ConfigError(MmlrError, ValueError):
    """Invalid experiment configuration."""


class ParseError(MmlrError, ValueError):
    """Malformed matrix file. Carries the offending line and column."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
