"""Exception hierarchy shared across the package.

The CLI and the HTTP service map these onto exit codes / status payloads:
config problems -> 1, data problems -> 2, numerical failures -> 3.
"""


class SblorecError(Exception):
    """Base class for all package errors."""


class ConfigError(SblorecError):
    """Invalid configuration file, unknown keys, bad CLI arguments."""


class DataError(SblorecError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    """Malformed line in an edge-list file."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class ConsistencyError(DataError):
    """Objects passed together do not share the required provenance/universe."""


class NumericalError(SblorecError):
    """Numerical failure in a solver or downstream computation."""


class SolverError(NumericalError):
    """Linear solve failed or did not reach the requested residual."""

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (relative residual {residual:.3e})"
        super().__init__(message)


#: Process exit codes used by the CLI.
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def exit_code_for(exc: BaseException) -> int:
    """Exit code the CLI should use for an exception."""
    if isinstance(exc, (ConfigError, ValueError)):
        return EXIT_CONFIG
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    # DataError, OSError and anything else raised while touching inputs.
    return EXIT_DATA
