# rmt/errors.py
"""Exceptions raised by the numerical services and the experiment runner."""


class RMTError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RMTError, ValueError):
    """Argument lies on a branch cut or outside an operation's domain."""


class HermiteOverflowError(RMTError, OverflowError):
    """Even the log-scaled representation left the floating point range."""


class QuadratureError(RMTError):
    """An adaptive quadrature did not reach its requested accuracy."""


class EigensolverError(RMTError):
    """The Hermitian eigensolve failed or broke the spectrum invariants."""


class DegenerateSampleError(RMTError):
    """A sample hit a probability-zero event (e.g. tr X^2 underflow)."""


class MetadataMismatchError(RMTError, ValueError):
    """Two estimates with different grids or rescalings cannot be merged."""


class ConfigError(RMTError, ValueError):
    """An experiment configuration failed validation."""
