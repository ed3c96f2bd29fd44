"""Exception types used across the toolkit."""


class ConfigError(ValueError):
    """Invalid configuration (bad layout, bad stimulus parameters, bad file)."""


class SimulationError(RuntimeError):
    """Numerical failure during field evaluation."""
