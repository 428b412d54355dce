from src.config.settings import configure_logging, get_workers

__all__ = ["configure_logging", "get_workers"]
