from hebbian_tmaze.config.settings import ConfigError, RuntimeSettings, configure_logging

__all__ = ["ConfigError", "RuntimeSettings", "configure_logging"]
