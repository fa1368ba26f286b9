"""Galois-theoretic non-integrability checks for Newtonian n-body problems.

Central configurations, the spectral reduction of the mass-scaled Hessian,
the normal variational equation along conic orbits and its monodromy.
"""

__version__ = "0.1.0"

from .errors import (ClearanceError, ConvergenceError, DegenerateDarbouxError, InconclusiveError,
                     InputError, NBodyGaloisError, NoObstructionDefinedError, NotAlignedError,
                     NotSingularPointError, SingularConfigurationError, TrajectorySingularError)

__all__ = [
    "__version__", "NBodyGaloisError", "InputError", "SingularConfigurationError",
    "DegenerateDarbouxError", "ConvergenceError", "NotAlignedError", "NotSingularPointError",
    "NoObstructionDefinedError", "TrajectorySingularError", "ClearanceError", "InconclusiveError",
]
