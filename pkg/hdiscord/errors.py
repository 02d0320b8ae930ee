"""
Exception hierarchy shared by every hdiscord module
"""

from typing import Optional


class DiscordError(Exception):
    """Base class for all errors raised by hdiscord"""


class DimensionError(DiscordError, ValueError):
    """Shapes or subsystem dimensions do not match"""


class DomainError(DiscordError, ValueError):
    """A parameter or matrix lies outside the domain of the operation"""


class NotPSDError(DomainError):
    """Matrix has an eigenvalue below the PSD tolerance"""


class ProbabilityError(DiscordError, ValueError):
    """Probability table is negative or not normalized"""


class ArityError(DiscordError, ValueError):
    """Operation needs a different number of parties"""


class UnsupportedError(DiscordError):
    """Valid input the requested evaluator cannot handle"""


class ResourceError(DiscordError):
    """Request would exceed the brute-force or grid limits"""


class ModelDomainError(DomainError):
    """Spin-model parameters select an unphysical or undefined branch"""


class ConvergenceError(DiscordError):
    """Fock truncation did not converge"""

    def __init__(self, message: str, suggested_cutoff: Optional[int] = None):
        super().__init__(message)
        self.suggested_cutoff = suggested_cutoff


class StateFileError(DiscordError, ValueError):
    """State file could not be read or failed validation"""


class ConfigError(DiscordError, ValueError):
    """Configuration value is malformed"""


class UsageError(DiscordError):
    """Command-line request does not fit the input"""
