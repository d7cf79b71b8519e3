"""存储模块"""

from .report import TOLERANCES, ReportAggregator
from .results import ResultStore, config_key, omit_empty

__all__ = ["ResultStore", "ReportAggregator", "TOLERANCES", "config_key", "omit_empty"]
