class LabError(Exception):
    """Base class for every error raised by the lab packages"""


class ConfigError(LabError, ValueError):
    """Invalid configuration value, key, flag or mode"""


class DimensionError(LabError, ValueError):
    """Vector or matrix shape does not match the network topology"""


class NonFiniteError(LabError, ValueError):
    """A NaN or infinite value reached a place that requires finite input"""


class ResultsIOError(LabError, OSError):
    """File or database failure; the message always names the path"""

    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")
