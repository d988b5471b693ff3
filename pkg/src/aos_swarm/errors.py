class InputError(ValueError):
    """Rejected input: value outside an operation's precondition."""


class DetectorUnavailable(RuntimeError):
    """Too few covered cells for stable background statistics."""


class ConstraintInfeasible(RuntimeError):
    """Minimum-distance repulsion did not converge."""


class UnsupportedSize(ValueError):
    """Swarm size outside the tabulated packing range."""


class ConfigError(ValueError):
    """Scenario configuration failed to parse or validate."""
