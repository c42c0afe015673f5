"""Exception types."""


class ExtractorError(Exception):
    """Base class for everything this package raises on purpose."""


class ConfigError(ExtractorError):
    """Unusable job configuration: unknown names, bad paths, bad shapes."""


class UnsupportedCombination(ExtractorError):
    """Model and method cannot be paired, e.g. guided backprop on a GELU network."""
