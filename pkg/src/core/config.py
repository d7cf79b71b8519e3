"""运行配置管理"""

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

# 加载环境变量
load_dotenv()

# 项目根目录
ROOT_DIR = Path(__file__).parent.parent.parent


@dataclass
class Config:
    """运行配置类"""

    # 元素枚举上限（群阶或陪集数超过该值时只能使用测度模式）
    enumeration_cap: int

    # 覆盖树球内顶点数预算
    vertex_budget: int

    # Patterson 估计的指数偏移 ε
    patterson_offset: float

    # 影子引理默认半径 r
    shadow_radius: int

    # 拟合窗口起点 n₀
    fit_start: int

    # 日志级别
    log_level: str

    # 数据目录与运行结果目录
    data_dir: Path
    runs_dir: Path

    @classmethod
    def from_env(cls) -> "Config":
        """从环境变量加载配置"""
        return cls(
            enumeration_cap=int(os.getenv("ARBOR_ENUMERATION_CAP", "10000")),
            vertex_budget=int(os.getenv("ARBOR_VERTEX_BUDGET", "200000")),
            patterson_offset=float(os.getenv("ARBOR_PATTERSON_OFFSET", "0.05")),
            shadow_radius=int(os.getenv("ARBOR_SHADOW_RADIUS", "2")),
            fit_start=int(os.getenv("ARBOR_FIT_START", "3")),
            log_level=os.getenv("ARBOR_LOG_LEVEL", "INFO").upper(),
            data_dir=ROOT_DIR / "data",
            runs_dir=ROOT_DIR / "data" / "runs",
        )

    def ensure_dirs(self) -> None:
        """确保数据目录存在"""
        for dir_path in [self.data_dir, self.runs_dir]:
            dir_path.mkdir(parents=True, exist_ok=True)


# 全局配置实例
cfg = Config.from_env()
