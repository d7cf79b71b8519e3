"""测度模式：商图有向边上的非回溯转移算子

覆盖树中从基点出发的非回溯路径只依赖于商图边序列及其重数，
因此球面计数、加权轨道和与 Perron 向量都可以在商图上用稀疏矩阵算出。
"""

import logging
import math
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.lattice import GraphOfGroups, edge_transitions

logger = logging.getLogger(__name__)

# 稠密特征分解的规模上限
DENSE_EIGEN_LIMIT = 1500

# 幂迭代参数
POWER_TOL = 1e-13
POWER_MAX_ITER = 200000


class TransferOperator:
    """N[e,e'] = [t(e)=o(e')]·(index(e') − [e' = ē])"""

    def __init__(self, gog: GraphOfGroups):
        self.gog = gog
        self.edges, self.position, self.counts = edge_transitions(gog)
        graph = gog.graph
        self.index = np.array([gog.edge_index(e) for e in self.edges], dtype=float)
        self.edge_orders = np.array([gog.edge_order(e) for e in self.edges], dtype=float)
        self.opposite = np.array([self.position[graph.bar(e)] for e in self.edges], dtype=int)
        base = gog.base_vertex
        self.from_base = np.array([graph.o(e) == base for e in self.edges])
        self.to_base = np.array([graph.t(e) == base for e in self.edges])

    @property
    def size(self) -> int:
        return len(self.edges)

    def vector(self, values: Mapping[str, float]) -> np.ndarray:
        return np.array([float(values[e]) for e in self.edges])

    def weights(self, c: Optional[np.ndarray] = None, s: float = 0.0) -> np.ndarray:
        """每条边的权重 e^{c(e) − s}"""
        if c is None:
            c = np.zeros(self.size)
        return np.exp(np.asarray(c, dtype=float) - s)

    def weighted(self, c: Optional[np.ndarray] = None, s: float = 0.0) -> sparse.csr_matrix:
        """W_s = N·diag(e^{c − s})"""
        return (self.counts @ sparse.diags(self.weights(c, s))).tocsr()

    def start_vector(self, c: Optional[np.ndarray] = None, s: float = 0.0) -> np.ndarray:
        """从基点出发第一步：u₁[e] = index(e)·e^{c(e)−s}，o(e) = 基点"""
        return np.where(self.from_base, self.index * self.weights(c, s), 0.0)

    def propagate(self, start: np.ndarray, steps: int, c: Optional[np.ndarray] = None, s: float = 0.0):
        """
        依次给出 u₁, u₂, …, u_{steps}，u_{n+1} = u_n·W_s

        Yields:
            每一步的行向量
        """
        W_T = self.weighted(c, s).T.tocsr()
        u = np.asarray(start, dtype=float)
        for _ in range(steps):
            yield u
            u = W_T @ u

    def sphere_counts(self, radius: int) -> list:
        """距基点为 n 的覆盖顶点个数，n = 0..radius"""
        sizes = [1]
        for u in self.propagate(self.start_vector(), radius):
            sizes.append(int(round(math.fsum(u))))
        return sizes

    def annulus_sums(self, radius: int, c: Optional[np.ndarray] = None, s: float = 0.0) -> np.ndarray:
        """
        a_n = |G_base|·Σ_{γ: d(x*,γx*)=n} e^{∫(F−s)}，n = 0..radius

        Γ 元素个数等于基点提升个数乘以基点稳定子的阶。
        """
        stab = self.gog.vertex_order(self.gog.base_vertex)
        sums = np.zeros(radius + 1)
        sums[0] = stab
        for n, u in enumerate(self.propagate(self.start_vector(c, s), radius, c, s), start=1):
            sums[n] = stab * math.fsum(u[self.to_base])
        return sums

    def perron(self, c: Optional[np.ndarray] = None, tol: float = POWER_TOL) -> Tuple[float, np.ndarray]:
        """
        W = N·diag(e^{c}) 的 Perron 根与右特征向量（最大分量为 1）

        小规模用稠密特征分解，否则对 W + I 做幂迭代。
        """
        W = self.weighted(c)
        if self.size <= DENSE_EIGEN_LIMIT:
            values, vectors = np.linalg.eig(W.toarray())
            k = int(np.argmax(values.real))
            rho = float(values[k].real)
            phi = np.abs(vectors[:, k].real)
        else:
            phi = np.ones(self.size)
            shifted = (W + sparse.identity(self.size, format="csr")).tocsr()
            for iteration in range(POWER_MAX_ITER):
                nxt = shifted @ phi
                nxt /= nxt.max()
                if np.max(np.abs(nxt - phi)) < tol:
                    phi = nxt
                    break
                phi = nxt
            else:
                logger.warning(f"⚠️ Power iteration did not reach tol {tol}")
            rho = float(math.fsum(W @ phi) / math.fsum(phi))
        phi = phi / phi.max()
        logger.debug(f"Perron root {rho:.12g} on {self.size} edges")
        return rho, phi

    def edge_ids(self, path: Sequence[str]) -> list:
        return [self.position[e] for e in path]

    def horizon_sums(
        self,
        steps: int,
        c: Optional[np.ndarray] = None,
        s: float = 0.0,
        terminal: Optional[np.ndarray] = None,
    ) -> List[np.ndarray]:
        """
        g_k = W_s^k·h，k = 0..steps，h 默认全为 1

        g_k[e] 是以 e 结尾的路径再走 k 步、且末边满足 h 的全部延伸的权重和。
        """
        W = self.weighted(c, s)
        sums = [np.ones(self.size) if terminal is None else np.asarray(terminal, dtype=float)]
        for _ in range(steps):
            sums.append(W @ sums[-1])
        return sums

    def out_of(self, vertex: str) -> np.ndarray:
        """以 vertex 为起点的边的掩码"""
        graph = self.gog.graph
        return np.array([graph.o(e) == vertex for e in self.edges])

    def paths(self, max_length: int, start: Optional[str] = None, end: Optional[str] = None) -> Iterator[Tuple[int, ...]]:
        """
        从 start（默认基点）出发、在覆盖树中不回溯的商图边路径（深度优先）

        Args:
            max_length: 最大长度
            end: 只给出终点为该顶点的路径

        Yields:
            边下标元组
        """
        start = start or self.gog.base_vertex
        terminus = [self.gog.graph.t(e) for e in self.edges]
        successors = [self.counts.indices[self.counts.indptr[i]:self.counts.indptr[i + 1]] for i in range(self.size)]
        stack = [(i,) for i in reversed(np.flatnonzero(self.out_of(start)).tolist())]
        while stack:
            path = stack.pop()
            if end is None or terminus[path[-1]] == end:
                yield path
            if len(path) < max_length:
                stack.extend(path + (int(j),) for j in reversed(sorted(successors[path[-1]])))
