"""热力学形式化模块：导通系数、振幅、Poincaré 级数、Patterson 密度、影子引理"""

from .cocycle import amplitude, cocycle_check, gibbs_cocycle
from .conductances import Conductances
from .models import MeasureEstimate, PoincarePartial, PotentialSummary, ShadowLemmaReport
from .patterson import PattersonDensity, is_homogeneous, patterson_shadow_measure
from .series import (
    annulus_sums,
    critical_exponent,
    exponent_bounds_hold,
    poincare_partial,
    transfer_exponent,
)
from .shadow_lemma import shadow_lemma_check

__all__ = [
    "Conductances",
    "MeasureEstimate",
    "PoincarePartial",
    "PotentialSummary",
    "ShadowLemmaReport",
    "PattersonDensity",
    "amplitude",
    "cocycle_check",
    "gibbs_cocycle",
    "annulus_sums",
    "poincare_partial",
    "critical_exponent",
    "transfer_exponent",
    "exponent_bounds_hold",
    "patterson_shadow_measure",
    "is_homogeneous",
    "shadow_lemma_check",
]
