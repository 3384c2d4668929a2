"""Exception hierarchy shared by all modules."""


class CoagulationError(Exception):
    """Base class for errors raised by :mod:`forcedcoag`."""


class ParameterError(CoagulationError, ValueError):
    """A parameter lies outside the admissible range of a formula."""


class KernelIndexError(CoagulationError, IndexError):
    """A tabulated model was queried outside its table."""


class CertificationError(CoagulationError):
    """A declared growth envelope is violated by the model."""

    def __init__(self, message, k=None, l=None):
        super().__init__(message)
        self.k = k
        self.l = l


class DimensionError(CoagulationError, ValueError):
    """Two states with different truncation sizes were combined."""


class StiffnessError(CoagulationError):
    """The step size of the explicit integrator underflowed."""

    def __init__(self, message, t, component):
        super().__init__(message)
        self.t = t
        self.component = component


class ConvergenceError(CoagulationError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class InsufficientDataError(CoagulationError):
    """Too few usable samples for a fit."""


class ToleranceError(CoagulationError):
    """A quadrature could not reach the requested tolerance."""


class ConfigError(CoagulationError):
    """A run configuration could not be parsed or validated."""
