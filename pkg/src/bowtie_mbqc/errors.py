"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad site assignment, graph description or CLI configuration."""


class BranchImpossibleError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


class PreconditionError(ValueError):
    """An operation was called on a value it is not defined for."""
