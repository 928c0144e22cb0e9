"""Exception types shared across the package."""


class TriringError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TriringError):
    """Invalid configuration or input parameters (exit code 2 in the CLI)."""


class NumericalError(TriringError):
    """Numerical failure during a computation (exit code 3 in the CLI)."""


class DegenerateInputError(ConfigError):
    """Inputs that leave a requested quantity undefined (e.g. both couplings zero)."""


class SingularPulseError(NumericalError):
    """Inverse-engineered pulse exceeded the configured amplitude cap."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NoBoundStateError(ConfigError):
    """Trap parameters admit no bound state (existence condition violated)."""


class TuningError(NumericalError):
    """Depth tuning could not bracket a root at the requested energy."""


class TableRangeError(NumericalError):
    """Requested coupling lies outside the tabulated range."""

    def __init__(self, message, time=None, coupling=None):
        super().__init__(message)
        self.time = time
        self.coupling = coupling


class TableMonotonicityError(NumericalError):
    """Tabulated coupling failed to decrease monotonically with barrier height."""


class ResolutionError(ConfigError):
    """Spatial grid too coarse for the requested trap width."""


class StepSizeError(ConfigError):
    """Time step violates the potential-phase guard dt*max|V| <= pi."""


class ConvergenceError(NumericalError):
    """Iterative routine failed to converge within the allowed iterations."""
