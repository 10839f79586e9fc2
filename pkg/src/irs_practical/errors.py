"""Exception types raised by the simulation library."""


class IRSError(Exception):
    """Base class for all library errors."""


class DegenerateResonanceError(IRSError, ValueError):
    """The element impedance denominator vanishes (singular circuit)."""


class PhaseDomainError(IRSError, ValueError):
    """A phase shift lies outside [-pi, pi)."""


class InsufficientSamplesError(IRSError, ValueError):
    """Too few (or too narrowly spread) samples to fit a phase-shift model."""


class SubReferenceDistanceError(IRSError, ValueError):
    """A link distance is below the 1 m path-loss reference distance."""


class ZeroChannelError(IRSError, ValueError):
    """An effective channel is identically zero, so MRT is undefined."""
