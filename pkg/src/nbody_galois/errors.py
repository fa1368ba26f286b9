"""Exception hierarchy shared by all modules."""


class NBodyGaloisError(Exception):
    """Base class for every error raised by this package."""


class InputError(NBodyGaloisError, ValueError):
    """Invalid or inconsistent user input."""


class SingularConfigurationError(NBodyGaloisError):
    """Two bodies coincide (a mutual distance vanishes)."""


class DegenerateDarbouxError(NBodyGaloisError):
    """The multiplier of a Darboux point is zero."""


class ConvergenceError(NBodyGaloisError):
    """An iterative solver hit its iteration cap or a singular Jacobian."""


class NotAlignedError(NBodyGaloisError):
    """The W matrix does not have the block form of an aligned configuration."""


class NotSingularPointError(NBodyGaloisError):
    """A local analysis was requested at an ordinary point."""


class NoObstructionDefinedError(NBodyGaloisError):
    """The exponent difference at a singularity is not a nonnegative integer."""


class TrajectorySingularError(NBodyGaloisError):
    """A radial trajectory reached the collision phi = 0."""


class ClearanceError(NBodyGaloisError):
    """A continuation path came too close to a singularity."""


class InconclusiveError(NBodyGaloisError):
    """A numerical certificate cannot separate signal from integration noise."""
