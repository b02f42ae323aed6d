"""Exception types shared across the package."""


class KnotError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(KnotError):
    """A coordinate file could not be parsed.

    Carries the path and the 1-based line number of the offending line.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class DegenerateCurve(KnotError):
    """Curve violates a geometric validity requirement (too few vertices,
    coincident consecutive vertices, non-finite coordinates)."""


class DegenerateProjection(KnotError):
    """Projection direction is not generic for the curve; resample it."""


class DegenerateAxis(KnotError):
    """Crankshaft rotation axis is undefined (coincident pivot vertices)."""


class TrivialChain(KnotError):
    """Open chain whose dominant closure type is the unknot: no knot core."""


class TrivialCurve(KnotError):
    """Closed curve classified as the unknot: intensity is identically zero."""


class UnresolvedType(KnotError):
    """Dominant type fell outside the classification catalog."""

    def __init__(self, message, label=None):
        self.label = label
        super().__init__(message)


class SamplingTimeout(KnotError):
    """Random-polygon sampling exhausted its attempt budget."""

    def __init__(self, message, attempts=None):
        self.attempts = attempts
        super().__init__(message)
