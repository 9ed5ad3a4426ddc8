class ConfigurationError(ValueError):
    """Invalid code, interleaver or sweep definition."""


class UsageError(ValueError):
    """Arguments inconsistent with an otherwise valid configuration."""
