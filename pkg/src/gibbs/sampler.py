"""Gibbs 测度下的测地线与字母序列采样"""

import logging
from typing import TYPE_CHECKING, List, Optional, Sequence

import numpy as np

from src.core import DegenerateLatticeError, ValidationError
from src.cover import BassSerreCover

from .measure import GibbsMeasure
from .models import SampledGeodesic

if TYPE_CHECKING:
    from src.coding import Alphabet

logger = logging.getLogger(__name__)


def spawn_seeds(master: int, tasks: int) -> List[np.random.SeedSequence]:
    """由主种子派生每个任务的种子"""
    return np.random.SeedSequence(master).spawn(tasks)


class _EdgeChain:
    """边转移链的累积分布表"""

    def __init__(self, measure: GibbsMeasure):
        self.measure = measure
        P = measure.transition
        self.indptr = P.indptr
        self.indices = P.indices
        self.cumulative = [np.cumsum(P.data[P.indptr[i]:P.indptr[i + 1]]) for i in range(P.shape[0])]
        self.start = np.cumsum(measure.edge_law)
        if self.start[-1] <= 0:
            raise DegenerateLatticeError("平稳边分布为零")

    def run(self, rng: np.random.Generator, n_steps: int) -> np.ndarray:
        path = np.empty(n_steps, dtype=np.int64)
        current = int(np.searchsorted(self.start, rng.random() * self.start[-1], side="right"))
        path[0] = current
        draws = rng.random(n_steps)
        for k in range(1, n_steps):
            cum = self.cumulative[current]
            if cum.size == 0:
                raise DegenerateLatticeError(f"边 '{self.measure.edges[current]}' 没有后继")
            j = int(np.searchsorted(cum, draws[k] * cum[-1], side="right"))
            current = int(self.indices[self.indptr[current] + min(j, cum.size - 1)])
            path[k] = current
        return path


def sample_geodesic(
    measure: GibbsMeasure,
    n_steps: int,
    seed: int,
    lift: bool = False,
) -> SampledGeodesic:
    """
    采样 n_steps 条边的平稳测地线片段，时间 0 位于中间

    起始边按平稳边分布抽取，之后按前向转移律逐步延伸。
    lift=True 时同时在覆盖树中提升：从起点的典范提升出发，
    每步在不回溯的陪集中均匀选择。

    Raises:
        ValidationError: n_steps < 1
        DegenerateLatticeError: 链在某条边上无法继续
    """
    if n_steps < 1:
        raise ValidationError(f"步数必须 ≥ 1: {n_steps}")
    rng = np.random.default_rng(seed)
    ids = _EdgeChain(measure).run(rng, n_steps)
    edges = [measure.edges[i] for i in ids]

    vertices = None
    if lift:
        cover = BassSerreCover(measure.gog)
        current = cover.canonical_lift(measure.gog.graph.o(edges[0]))
        previous = None
        vertices = [current]
        for e in edges:
            options = [w for c in cover.coset_reps(e) if (w := cover.step(current, e, c)) != previous]
            previous, current = current, options[int(rng.integers(len(options)))]
            vertices.append(current)

    logger.debug(f"Sampled {n_steps} steps with seed {seed}")
    return SampledGeodesic(edges=edges, footpoint=n_steps // 2, seed=seed, vertices=vertices)


def sample_letters(
    measure: GibbsMeasure,
    alphabet: "Alphabet",
    n_letters: int,
    seed: int,
) -> List[int]:
    """
    直接采样平稳字母过程

    先按边转移链采样 n_letters + 1 条边，再对每次转移 (e⁻, e⁺) 按类大小成比例地选取双陪集类。

    Returns:
        字母编号列表
    """
    if n_letters < 1:
        raise ValidationError(f"字母数必须 ≥ 1: {n_letters}")
    rng = np.random.default_rng(seed)
    ids = _EdgeChain(measure).run(rng, n_letters + 1)

    tables = {}
    for (e_minus, e_plus), letters in alphabet.by_transition().items():
        sizes = np.array([alphabet.letters[a].class_size for a in letters], dtype=float)
        tables[(e_minus, e_plus)] = (np.array(letters), np.cumsum(sizes))

    draws = rng.random(n_letters)
    out = []
    for k in range(n_letters):
        key = (measure.edges[ids[k]], measure.edges[ids[k + 1]])
        if key not in tables:
            raise DegenerateLatticeError(f"转移 {key[0]} → {key[1]} 不在字母表中")
        letters, cum = tables[key]
        j = int(np.searchsorted(cum, draws[k] * cum[-1], side="right"))
        out.append(int(letters[min(j, len(letters) - 1)]))
    logger.debug(f"Sampled {n_letters} letters with seed {seed}")
    return out


def sample_tasks(measure: GibbsMeasure, n_steps: int, master_seed: int, tasks: int) -> List[str]:
    """按任务顺序拼接多个独立采样的边序列"""
    merged: List[str] = []
    per_task = -(-n_steps // tasks)
    for k, seq in enumerate(spawn_seeds(master_seed, tasks)):
        steps = min(per_task, n_steps - len(merged))
        if steps <= 0:
            break
        seed = int(seq.generate_state(1)[0])
        merged.extend(sample_geodesic(measure, steps, seed).edges)
    return merged


def edge_frequencies(edges: Sequence[str], universe: Sequence[str]) -> np.ndarray:
    """经验单边频率（按 universe 的顺序）"""
    position = {e: i for i, e in enumerate(universe)}
    counts = np.bincount([position[e] for e in edges], minlength=len(universe)).astype(float)
    return counts / max(len(edges), 1)


def trajectory_lines(sample: SampledGeodesic, letters: Optional[Sequence[str]] = None) -> List[str]:
    """轨迹文件的行：index<TAB>边<TAB>字母（没有字母时为 '-'）"""
    lines = []
    for k, e in enumerate(sample.edges):
        letter = letters[k] if letters is not None and k < len(letters) else "-"
        lines.append(f"{k - sample.footpoint}\t{e}\t{letter}")
    return lines
