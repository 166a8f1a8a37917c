"""Error taxonomy shared across the package.

The CLI maps these to process exit codes: configuration and query
problems exit with 2, numerical failures with 3, I/O failures with 4.
"""


class SimulationError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidConfigError(SimulationError):
    """A configuration value or combination of values is unusable."""


class QueryError(SimulationError):
    """A lookup asked for something outside the configured basis or data."""


class ConsistencyError(SimulationError):
    """Objects built over different bases (or times) were mixed."""


class NumericalError(SimulationError):
    """A numerical routine failed or produced unusable output."""


class StepSizeError(NumericalError):
    """Norm drift exceeded tolerance; reduce the integration step."""
