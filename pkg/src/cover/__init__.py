"""覆盖树模块：Bass–Serre 树的地址、球、测地线、锥与测度模式转移算子"""

from .models import Cone, CoverBall, CoverPath, CoverVertex, OrbitPoint, Step, common_prefix
from .transfer import TransferOperator
from .tree import BassSerreCover

__all__ = [
    "BassSerreCover",
    "TransferOperator",
    "CoverVertex",
    "CoverBall",
    "CoverPath",
    "Cone",
    "OrbitPoint",
    "Step",
    "common_prefix",
]
