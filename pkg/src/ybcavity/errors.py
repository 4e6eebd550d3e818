"""Exception types shared across the package.

The CLI maps these onto distinct exit codes (config problems vs numerical
failures), so library code should raise the most specific type that applies.
"""


class YbCavityError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(YbCavityError):
    """Invalid or inconsistent user-supplied configuration."""


class ResonanceError(ConfigError):
    """A perturbative light-shift formula was evaluated too close to resonance."""


class ModelError(YbCavityError):
    """Inconsistent model assembly (dimension mismatches, bad operators)."""


class NumericalError(YbCavityError):
    """A solver failed to converge or produced an unusable result."""
