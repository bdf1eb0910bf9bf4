"""Exception types shared across the package.

ParameterError covers bad inputs (model parameters, configs, CLI flags);
SolverError and its subclasses cover numerical failures.  The CLI maps
ParameterError to exit code 2 and SolverError to exit code 1.
"""


class ParameterError(ValueError):
    """Invalid model parameter, configuration value, or flag combination."""


class SolverError(RuntimeError):
    """A numerical routine failed to produce a trustworthy result."""


class EigenConvergenceError(SolverError):
    """Eigensolver did not converge or violated its residual bound."""


class PropagatorCollapseError(SolverError):
    """One-period propagator has a (numerically) zero eigenvalue."""


class DimensionCapError(SolverError):
    """Requested extended Floquet matrix exceeds the configured size cap."""


class ConvergenceCapError(SolverError):
    """An adaptive refinement loop hit its cap before reaching tolerance."""


class AliasingError(SolverError):
    """Folding window is too narrow for the spectrum being compared."""
