"""混合性模块：回返时间尾部、相关系数衰减、观测函数、远足分解"""

from .correlations import (
    common_envelope,
    decay_rate_fit,
    exact_correlations,
    letter_chain,
    monte_carlo_correlations,
)
from .excursions import dilation_audit, excursion_decomposition, jacobian_constancy_check, one_sided_distance
from .models import (
    CorrelationSeries,
    Excursion,
    ExcursionSet,
    ExponentialFit,
    JacobianCheck,
    ReturnTail,
    SeriesPoint,
)
from .observables import Observable
from .tails import exp_tail_fit, return_time_tail

__all__ = [
    "Observable",
    "SeriesPoint",
    "ReturnTail",
    "ExponentialFit",
    "CorrelationSeries",
    "Excursion",
    "ExcursionSet",
    "JacobianCheck",
    "return_time_tail",
    "exp_tail_fit",
    "letter_chain",
    "exact_correlations",
    "monte_carlo_correlations",
    "decay_rate_fit",
    "common_envelope",
    "jacobian_constancy_check",
    "excursion_decomposition",
    "dilation_audit",
    "one_sided_distance",
]
