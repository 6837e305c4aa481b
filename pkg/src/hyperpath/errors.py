"""Exception types raised across the package."""


class HyperpathError(ValueError):
    """Base class for all package errors."""


class NotAdjacent(HyperpathError):
    pass


class NotComparable(HyperpathError):
    pass


class DimensionTooLarge(HyperpathError):
    pass


class InvalidParameter(HyperpathError):
    pass


class InvalidInput(HyperpathError):
    pass


class InvalidParams(HyperpathError):
    pass


class VertexNotInTree(HyperpathError, KeyError):
    pass


class TraceMismatch(HyperpathError):
    pass
