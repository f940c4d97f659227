"""Exception types shared across the lattice models."""


class LatticeflowError(Exception):
    """Base class for all package-specific errors."""


class EmptyDomain(LatticeflowError):
    """A domain was constructed from an empty face set."""


class NotSimplyConnected(LatticeflowError):
    """The face set has a hole (its complement is disconnected)."""


class InvalidDegree(LatticeflowError):
    """A loop configuration has a vertex of degree 1 or 3."""


class InconsistentPair(LatticeflowError):
    """A two-spin pair violates the consistency (ice) rule."""


class NotRepresentable(LatticeflowError):
    """A spin pair admits no height function in the required boundary class."""


class IceRuleViolated(LatticeflowError):
    """Both diagonals disagree at a six-vertex interior vertex."""


class IncompatibleInput(LatticeflowError):
    """Inputs to a conditional resampling step are mutually incompatible."""


class RhombusOutOfDomain(LatticeflowError):
    """The crossing rhombus is not contained in the domain."""


class AnnulusOutOfDomain(LatticeflowError):
    """The circuit annulus is not contained in the domain."""


class TooLarge(LatticeflowError):
    """An exact enumeration exceeds the configured state budget."""


class EncodingMismatch(LatticeflowError):
    """Empirical and exact distributions use different state encodings."""


class InsufficientSamples(LatticeflowError):
    """Too few samples for the requested estimate."""


class InsufficientPoints(LatticeflowError):
    """Too few data points for the requested fit."""


class OddStepCount(LatticeflowError):
    """A walk-return probability was requested for an odd step count."""


class RegimeWarning(UserWarning):
    """Parameters are outside the regime where coupling guarantees hold."""
