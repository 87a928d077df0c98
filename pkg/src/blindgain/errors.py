class ConfigurationError(ValueError):
    """Raised for invalid dimensions, parameters, or config files."""
