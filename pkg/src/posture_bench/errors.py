"""Error taxonomy shared across the bench modules."""


class BenchError(Exception):
    """Base class for everything raised on purpose by this package."""


class RangeError(BenchError, ValueError):
    """A requested value falls outside a configured mechanical bound.

    Messages always name the offending quantity and the bound so callers can
    surface them verbatim.
    """


class ConfigurationError(BenchError, ValueError):
    """The mechanism or filter configuration is internally inconsistent."""


class InputError(BenchError, ValueError):
    """Malformed external input: bad CSV, bad channel map, degenerate data."""


class PlanningError(BenchError):
    """No feasible posture exists for the requested view combination."""


class CommandRejected(BenchError):
    """A session command is illegal in the current mode; names the mode."""

    def __init__(self, message: str, mode: str):
        super().__init__(message)
        self.mode = mode
