"""Exception hierarchy shared by the simulator modules."""


class PolqmemError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(PolqmemError, ValueError):
    pass


class DecompositionError(PolqmemError, ArithmeticError):
    pass


class UnsupportedConfigurationError(PolqmemError):
    """The requested physical configuration has no model in this package."""


class DegenerateDataError(PolqmemError, ValueError):
    pass


class ConvergenceError(PolqmemError, RuntimeError):
    """Optimizer hit its iteration cap; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CutoffTooSmallError(PolqmemError, ValueError):
    pass


class OutOfModelError(PolqmemError, ValueError):
    pass


class ConfigError(PolqmemError, ValueError):
    """Bad experiment configuration; message carries the offending key/line."""

    def __init__(self, message, key=None, line=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if key is not None:
            loc.append(f"key {key!r}")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)
        self.key = key
        self.line = line
