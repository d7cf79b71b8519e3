"""日志配置：控制台输出与每次运行的日志文件"""

import logging
import sys
from pathlib import Path
from typing import Optional

# 日志格式
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# 输出过多调试信息的第三方库
QUIET_LIBRARIES = ("networkx", "scipy")

_initialized = False
_run_handler: Optional[logging.FileHandler] = None


def _resolve_level(level: int | str) -> int:
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(level.upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logger(level: int | str = logging.INFO) -> None:
    """
    配置全局日志（只生效一次）

    Args:
        level: 日志级别，接受数值或 "DEBUG" 这类名称；无法识别时用 INFO
    """
    global _initialized
    if _initialized:
        return

    level = _resolve_level(level)
    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
    root_logger.addHandler(console_handler)

    for name in QUIET_LIBRARIES:
        logging.getLogger(name).setLevel(logging.WARNING)

    _initialized = True


def attach_run_log(path: Path) -> Path:
    """
    把之后的日志同时写入 path（覆盖写），替换上一次运行的日志文件

    Returns:
        日志文件路径
    """
    global _run_handler
    root_logger = logging.getLogger()
    if _run_handler is not None:
        root_logger.removeHandler(_run_handler)
        _run_handler.close()

    path.parent.mkdir(parents=True, exist_ok=True)
    _run_handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    _run_handler.setLevel(root_logger.level)
    _run_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
    root_logger.addHandler(_run_handler)
    return path


def get_logger(name: Optional[str] = None) -> logging.Logger:
    return logging.getLogger(name)
