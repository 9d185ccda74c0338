"""Exception hierarchy shared by every cachecost module."""


class CacheCostError(Exception):
    """Base class for all cachecost errors."""


class ConfigError(CacheCostError, ValueError):
    """Invalid system configuration, sweep specification or grid."""


class DomainError(CacheCostError, ValueError):
    """An argument lies outside the domain of an operation."""


class BinomialOverflowError(CacheCostError, OverflowError):
    """A binomial coefficient was requested beyond the exact-arithmetic ceiling."""


class RegimeError(CacheCostError, ValueError):
    """An operation was called for a configuration in the wrong regime."""


class QuantizationError(CacheCostError, ValueError):
    """The file length is too small to realize an allocation."""


class DemandError(CacheCostError, ValueError):
    """The demand vector is not a set of distinct valid file indices."""


class DecodeError(CacheCostError):
    """A user failed to reconstruct its requested file."""


class InvariantError(CacheCostError):
    """A computed result violates a solution invariant."""
