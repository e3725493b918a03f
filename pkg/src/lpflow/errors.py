"""Exception types shared across the package."""


class LpflowError(Exception):
    """Base class for package errors."""


class DimensionMismatchError(LpflowError, ValueError):
    """Operands live over different splittings or block shapes disagree."""


class SingularOperatorError(LpflowError, ValueError):
    """A matrix that must be invertible is singular to working precision."""


class RadiusError(LpflowError, ValueError):
    """Argument outside the convergence radius of the generating series."""


class IndexRangeError(LpflowError, ValueError):
    """Polynomial or Hamiltonian index outside its admissible range."""


class ConfigError(LpflowError, ValueError):
    """Malformed run configuration."""
