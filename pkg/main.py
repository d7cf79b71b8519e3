"""
Arbor - 树格上的热力学形式化、符号编码与混合性数值验证

主入口文件
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from src.core import ArborError, attach_run_log, cfg, get_logger, setup_logger
from src.pipeline import COMMANDS, load_config, run_command
from src.storage import ResultStore

logger = get_logger(__name__)


def _window(text: str) -> Tuple[int, int]:
    """解析拟合窗口 "n0:n1" """
    start, sep, end = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"窗口格式应为 n0:n1: {text}")
    try:
        return int(start), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(f"窗口端点必须是整数: {text}")


def _children(text: str) -> Tuple[int, ...]:
    """解析子节点数列表 "2,3" """
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"子节点数列表必须是逗号分隔的整数: {text}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arbor",
        description="树格上的 Gibbs 测度、符号编码与混合性数值验证",
    )
    parser.add_argument("command", choices=[*COMMANDS, "report"], help="要执行的命令")
    parser.add_argument("--lattice", help="生成器类型 (modular_ray, quadratic_growth, rooted_tree_lattice) 或 JSON 配置路径")
    parser.add_argument("--q", type=int, help="生成器参数 q")
    parser.add_argument("--depth", type=int, help="截断深度")
    parser.add_argument("--children", type=_children, help="有根树的子节点数列表，如 2 或 2,3")
    parser.add_argument("--conductance", help="zero | visual | constant:<κ> | random:<seed> | JSON 文件")
    parser.add_argument("--epsilon", type=float, help="Patterson 估计的指数偏移 ε")
    parser.add_argument("--radius", type=int, help="截断半径 R")
    parser.add_argument("--seed", type=int, help="主种子（随机命令必需）")
    parser.add_argument("--samples", type=int, help="样本量")
    parser.add_argument("--out", type=Path, help="运行目录，默认 data/runs")
    parser.add_argument("--alpha", type=float, help="Hölder 指数 α")
    parser.add_argument("--nmax", type=int, help="序列的最大 n")
    parser.add_argument("--window", type=_window, help="拟合窗口 n0:n1")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行入口

    Returns:
        退出码：0 成功，2 参数或输入不合法，3 资源上限，4 退化格
    """
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if v is not None}
    setup_logger(cfg.log_level)

    try:
        config = load_config(**values)
    except ArborError as e:
        logger.error(f"❌ {e}")
        return e.exit_code

    store = ResultStore(config.out)
    if config.command == "report":
        log_name = "report.log"
    else:
        log_name = f"{store.stem(config.command, config.key_fields())}.log"
    attach_run_log(store.base_path / log_name)

    try:
        paths: List[Path] = run_command(config)
    except ArborError as e:
        logger.error(f"❌ {config.command} failed: {e}")
        return e.exit_code

    for path in paths:
        logger.info(f"Wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
