"""Exception hierarchy.

The CLI maps these onto exit codes: ``ConfigError`` -> 1, ``DataError`` -> 2,
``InvariantError`` -> 3.
"""


class NetClassError(Exception):
    """Base class for all errors raised by netclass."""


class ConfigError(NetClassError, ValueError):
    """Invalid parameter or configuration value."""


class DataError(NetClassError, ValueError):
    """Input data violates a precondition (non-finite values, bad shapes, parse errors)."""


class DisconnectedGraphError(DataError):
    def __init__(self, n_components: int):
        super().__init__(f"graph is disconnected: {n_components} components")
        self.n_components = n_components


class DegenerateClassError(DataError):
    """Relative variation requested on a class whose baseline measure is zero."""


class InvariantError(NetClassError):
    """An internal consistency check failed (e.g. a corrupted model file)."""
