"""核心模块：配置、日志和异常"""

from .config import cfg, Config
from .errors import (
    ArborError,
    DegenerateLatticeError,
    ResourceCapError,
    TruncationError,
    ValidationError,
)
from .logger import attach_run_log, setup_logger, get_logger

__all__ = [
    "cfg",
    "Config",
    "setup_logger",
    "get_logger",
    "attach_run_log",
    "ArborError",
    "ValidationError",
    "ResourceCapError",
    "TruncationError",
    "DegenerateLatticeError",
]
