from .logger import configure_rich_root_logger, close_log_files
from .logger import LoggingLevels

__all__ = ["configure_rich_root_logger", "close_log_files", "LoggingLevels"]
