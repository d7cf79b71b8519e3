"""运行结果存储"""

import csv
import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)


def omit_empty(data: Any) -> Any:
    """递归移除字典中的 None 值，非有限浮点数写成字符串"""
    if isinstance(data, dict):
        return {str(k): omit_empty(v) for k, v in data.items() if v is not None}
    elif isinstance(data, (list, tuple)):
        return [omit_empty(item) for item in data]
    elif isinstance(data, float) and not math.isfinite(data):
        return str(data)
    else:
        return data


def config_key(config: dict) -> str:
    """配置的内容哈希：规范 JSON 的 SHA-256 前 12 位"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


class ResultStore:
    """结果存储（按 命令-配置哈希 命名，保存到 runs 目录）"""

    def __init__(self, base_path: Optional[Path] = None):
        from src.core import cfg
        if base_path is None:
            cfg.ensure_dirs()
        self.base_path = Path(base_path or cfg.runs_dir)

    def stem(self, command: str, config: dict) -> str:
        return f"{command}-{config_key(config)}"

    def save_summary(self, command: str, config: dict, result: dict) -> Path:
        """
        保存 JSON 摘要

        Args:
            command: 命令名
            config: 运行配置（参与哈希）
            result: 命令结果

        Returns:
            保存的文件路径
        """
        file_path = self.base_path / f"{self.stem(command, config)}.json"
        payload = {
            "command": command,
            "key": config_key(config),
            "config": config,
            "result": result,
        }
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            json.dump(omit_empty(payload), f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")
        return file_path

    def save_series(
        self,
        command: str,
        config: dict,
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
        name: Optional[str] = None,
    ) -> Path:
        """
        保存 CSV 序列

        Args:
            name: 同一命令有多条序列时的后缀
        """
        suffix = f"-{name}" if name else ""
        file_path = self.base_path / f"{self.stem(command, config)}{suffix}.csv"
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return file_path

    def save_trajectory(self, command: str, config: dict, lines: List[str]) -> Path:
        """保存轨迹文件，每步一行 index<TAB>edge<TAB>letter"""
        file_path = self.base_path / f"{self.stem(command, config)}.tsv"
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines))
            f.write("\n")
        return file_path

    def load_summaries(self) -> List[dict]:
        """
        加载目录中的全部 JSON 摘要（report 自身的输出除外）

        Returns:
            按文件名排序的摘要列表
        """
        if not self.base_path.exists():
            return []

        summaries = []
        for json_file in sorted(self.base_path.glob("*.json")):
            if json_file.name == "report.json":
                continue
            try:
                with open(json_file, "r", encoding="utf-8") as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning(f"⚠️ Skipping unreadable summary {json_file.name}: {e}")
                continue
            if "command" in data and "result" in data:
                summaries.append(data)
        return summaries
