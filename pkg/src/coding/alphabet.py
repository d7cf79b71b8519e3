"""字母表与转移矩阵"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from src.algebra import DoubleCosetDecomposition, double_cosets
from src.core import ResourceCapError, ValidationError
from src.lattice import GraphOfGroups

from .models import Letter

logger = logging.getLogger(__name__)


@dataclass
class TransitionMatrix:
    """A[a, b] = 1 当且仅当 a 的 e⁺ 等于 b 的 e⁻"""

    matrix: sparse.csr_matrix

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def admissible(self, a: int, b: int) -> bool:
        return bool(self.matrix[a, b])

    def successors(self, a: int) -> List[int]:
        row = self.matrix.getrow(a)
        return [int(j) for j in row.indices]

    def row_counts(self) -> np.ndarray:
        return np.diff(self.matrix.indptr)

    def column_counts(self) -> np.ndarray:
        return np.diff(self.matrix.tocsc().indptr)

    def edge_list(self) -> List[Tuple[int, int]]:
        coo = self.matrix.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist()))


@dataclass
class Alphabet:
    """截断格上的全部字母，编号按 (e⁻, h, e⁺) 的字典序"""

    gog: GraphOfGroups
    letters: List[Letter]
    decompositions: Dict[Tuple[str, str], DoubleCosetDecomposition]
    omitted: List[str] = field(default_factory=list)
    """因枚举上限而跳过的顶点"""

    def __post_init__(self):
        self.index = {(a.e_minus, a.h, a.e_plus): i for i, a in enumerate(self.letters)}

    def __len__(self) -> int:
        return len(self.letters)

    def letter_id(self, e_minus: str, h: Sequence[int], e_plus: str) -> int:
        """
        Raises:
            ValidationError: 字母不存在（例如回溯的单位类）
        """
        key = (e_minus, tuple(h), e_plus)
        if key not in self.index:
            raise ValidationError(f"字母 ({e_minus}, {list(h)}, {e_plus}) 不在字母表中")
        return self.index[key]

    def decomposition(self, e_minus: str, e_plus: str) -> DoubleCosetDecomposition:
        """
        Raises:
            ResourceCapError: 该顶点在构建时因上限被跳过
        """
        key = (e_minus, e_plus)
        if key not in self.decompositions:
            raise ResourceCapError(f"转移 {e_minus} → {e_plus} 超出元素模式")
        return self.decompositions[key]

    def by_transition(self) -> Dict[Tuple[str, str], List[int]]:
        """(e⁻, e⁺) → 该转移上全部字母的编号"""
        groups: Dict[Tuple[str, str], List[int]] = {}
        for i, a in enumerate(self.letters):
            groups.setdefault((a.e_minus, a.e_plus), []).append(i)
        return groups

    def counts_per_vertex(self) -> Dict[str, int]:
        graph = self.gog.graph
        counts = {v: 0 for v in self.gog.vertices}
        for a in self.letters:
            counts[graph.t(a.e_minus)] += 1
        return counts

    def class_sizes(self) -> np.ndarray:
        return np.array([a.class_size for a in self.letters], dtype=float)

    @cached_property
    def transitions(self) -> TransitionMatrix:
        """可容许转移矩阵"""
        starting: Dict[str, List[int]] = {}
        for i, a in enumerate(self.letters):
            starting.setdefault(a.e_minus, []).append(i)
        rows, cols = [], []
        for i, a in enumerate(self.letters):
            for j in starting.get(a.e_plus, []):
                rows.append(i)
                cols.append(j)
        n = len(self.letters)
        matrix = sparse.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        return TransitionMatrix(matrix)

    def to_dict(self) -> dict:
        """JSON 导出：字母记录与稀疏转移边表"""
        return {
            "lattice": self.gog.name,
            "letters": [a.to_dict(i) for i, a in enumerate(self.letters)],
            "transitions": [list(p) for p in self.transitions.edge_list()],
            "counts_per_vertex": self.counts_per_vertex(),
            "omitted": self.omitted,
        }


def build_alphabet(gog: GraphOfGroups) -> Alphabet:
    """
    构建字母表

    对每个顶点 v、每条进入 v 的边 e⁻ 和每条离开 v 的边 e⁺，取
    H = α_{ē⁻}(G_{e⁻})，K = α_{e⁺}(G_{e⁺})，字母是 H\\G_v/K 的各个类；
    e⁺ = ē⁻ 时去掉单位类（该类对应回溯）。

    Returns:
        Alphabet；双陪集个数超过枚举上限的顶点整体跳过并记录在 omitted 中
    """
    graph = gog.graph
    letters: List[Letter] = []
    decompositions: Dict[Tuple[str, str], DoubleCosetDecomposition] = {}
    omitted: List[str] = []

    for v in gog.vertices:
        group = gog.vertex_groups[v]
        found: List[Letter] = []
        local: Dict[Tuple[str, str], DoubleCosetDecomposition] = {}
        try:
            for e_minus in graph.in_edges(v):
                H = gog.monos[graph.bar(e_minus)].image
                for e_plus in graph.out_edges(v):
                    dc = double_cosets(group, H, gog.monos[e_plus].image)
                    local[(e_minus, e_plus)] = dc
                    backtrack = e_plus == graph.bar(e_minus)
                    for h in dc.representatives:
                        if backtrack and dc.is_identity_class(h):
                            continue
                        found.append(Letter(e_minus, h, e_plus, dc.class_size))
        except ResourceCapError as e:
            logger.warning(f"⚠️ Skipping letters at vertex '{v}': {e}")
            omitted.append(v)
            continue
        letters.extend(found)
        decompositions.update(local)

    letters.sort()
    alphabet = Alphabet(gog, letters, decompositions, omitted)
    logger.info(f"✅ Built alphabet of {len(letters)} letters on '{gog.name}'")
    return alphabet


def transitivity_witness(alphabet: Alphabet, max_length: Optional[int] = None) -> dict:
    """
    拓扑传递性见证：任意两个字母之间是否存在长度不超过 max_length 的可容许字

    max_length 缺省为商图直径的两倍加 2。

    Returns:
        {"components", "max_length", "longest", "failures", "failure_examples"}
    """
    matrix = alphabet.transitions.matrix
    if max_length is None:
        graph = alphabet.gog.graph
        diameter = max(max(graph.distances_from(v).values(), default=0) for v in alphabet.gog.vertices)
        max_length = 2 * diameter + 2

    n_components, _ = csgraph.connected_components(matrix, directed=True, connection="strong")
    loops = csgraph.shortest_path(matrix, directed=True, unweighted=True)
    dist = loops.copy()
    # 同一字母到自身需要一条回路，而不是空字
    np.fill_diagonal(dist, np.inf)
    for a in range(matrix.shape[0]):
        succ = matrix.getrow(a).indices
        if succ.size:
            dist[a, a] = 1 + loops[succ, a].min()

    bad = np.argwhere(~(dist <= max_length))
    finite = dist[np.isfinite(dist)]
    longest = int(finite.max()) if finite.size else 0
    if bad.size:
        logger.warning(f"⚠️ {len(bad)} letter pairs without an admissible word of length ≤ {max_length}")
    else:
        logger.info(f"✅ Transition graph is transitive (longest connecting word {longest})")
    return {
        "components": int(n_components),
        "max_length": max_length,
        "longest": longest,
        "failures": int(len(bad)),
        "failure_examples": [[int(a), int(b)] for a, b in bad[:10]],
    }
