class ConfigError(ValueError):
    """Invalid parameter value, unknown config key or unusable config file."""


class ProbeCapExceeded(RuntimeError):
    """The oracle lattice would need more probes than allowed."""

    def __init__(self, needed: int, cap: int):
        super().__init__(f"oracle needs {needed} probes, exceeding the cap of {cap}")
        self.needed = needed
        self.cap = cap


class OracleMismatch(RuntimeError):
    """Probe-lattice and closed-form solution-cell counts disagree."""
