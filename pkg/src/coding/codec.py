"""编码 Θ 与解码：提升测地线 ↔ 字母序列"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

from src.core import ResourceCapError, ValidationError
from src.cover import BassSerreCover, CoverVertex

from .alphabet import Alphabet
from .models import SymbolSequence

logger = logging.getLogger(__name__)


def letter_at(cover: BassSerreCover, alphabet: Alphabet, prev: CoverVertex, x: CoverVertex, nxt: CoverVertex) -> int:
    """
    顶点 x 处的字母：h 是 x 的局部坐标中出、入两个标签之差所在的双陪集

    Raises:
        ResourceCapError: 该转移不在元素模式字母表内
        ValidationError: 三个顶点不构成不回溯路径
    """
    e_in, c_in = cover.label(x, prev)
    e_plus, c_out = cover.label(x, nxt)
    if prev == nxt:
        raise ValidationError(f"路径在 {x} 处回溯")
    e_minus = cover.graph.bar(e_in)
    dc = alphabet.decomposition(e_minus, e_plus)
    group = cover.gog.vertex_groups[x.projection]
    return alphabet.letter_id(e_minus, dc.class_of(group.sub(c_out, c_in)), e_plus)


def encode_path(
    cover: BassSerreCover,
    alphabet: Alphabet,
    vertices: Sequence[CoverVertex],
    footpoint: int,
) -> SymbolSequence:
    """
    覆盖树中不回溯路径的编码

    第 i 个字母位于 vertices[i + 1]；原点是 footpoint 处顶点的字母。
    路径进入元素模式以外的区域时在该处截止并记录 boundary。
    """
    if len(vertices) < 3:
        raise ValidationError("编码至少需要两条边")
    letters: List[int] = []
    boundary: Optional[int] = None
    for k in range(1, len(vertices) - 1):
        try:
            letters.append(letter_at(cover, alphabet, vertices[k - 1], vertices[k], vertices[k + 1]))
        except ResourceCapError as e:
            logger.warning(f"⚠️ Encoding stopped at vertex {k}: {e}")
            boundary = k
            break
    origin = min(max(footpoint - 1, 0), max(len(letters) - 1, 0))
    anchor = (vertices[0], cover.label(vertices[0], vertices[1]))
    return SymbolSequence(letters, origin, anchor, boundary)


def encode(cover: BassSerreCover, alphabet: Alphabet, sample) -> SymbolSequence:
    """
    采样测地线（带提升）的编码

    Raises:
        ValidationError: 样本没有提升
    """
    if sample.vertices is None:
        raise ValidationError("编码需要带提升的样本 (lift=True)")
    return encode_path(cover, alphabet, sample.vertices, sample.footpoint)


def conjugacy_mismatches(
    cover: BassSerreCover,
    alphabet: Alphabet,
    vertices: Sequence[CoverVertex],
    footpoint: int,
) -> int:
    """
    Θ(g₁ℓ) 与 σΘ(ℓ) 在公共窗口上不一致的位置数

    ℓ 是去掉最后一个顶点的窗口，时间 0 在 footpoint；g₁ℓ 是去掉第一个顶点的窗口，
    时间 0 落在原路径的 footpoint + 1。两个窗口各自从自己的起点编码。

    Raises:
        ValidationError: 路径太短或 footpoint 不在内部
        ResourceCapError: 窗口进入元素模式以外的区域
    """
    if not (1 <= footpoint <= len(vertices) - 4):
        raise ValidationError(f"共轭检查需要内部的 footpoint: {footpoint} / {len(vertices)}")
    before = encode_path(cover, alphabet, vertices[:-1], footpoint)
    after = encode_path(cover, alphabet, vertices[1:], footpoint)
    if not (before.complete and after.complete):
        raise ResourceCapError("共轭检查的窗口超出元素模式")

    shifted = before.shifted()
    lo = -min(shifted.origin, after.origin)
    hi = min(len(shifted) - shifted.origin, len(after) - after.origin)
    return sum(1 for i in range(lo, hi) if shifted.at(i) != after.at(i))


def word_edges(alphabet: Alphabet, word: Sequence[int]) -> List[str]:
    """
    字对应的商图边路径 e⁻₀, e⁺₀, e⁺₁, …

    Raises:
        ValidationError: 字不可容许
    """
    if not word:
        raise ValidationError("空字")
    letters = [alphabet.letters[a] for a in word]
    for i, (a, b) in enumerate(zip(letters, letters[1:])):
        if a.e_plus != b.e_minus:
            raise ValidationError(f"第 {i} 与 {i + 1} 个字母不可衔接")
    return [letters[0].e_minus] + [a.e_plus for a in letters]


def decode(cover: BassSerreCover, alphabet: Alphabet, seq: SymbolSequence) -> Tuple[List[str], List[CoverVertex]]:
    """
    解码：字母序列 → 商图边路径与覆盖树中的提升

    起点与第一步取自 anchor（缺省为典范提升与单位陪集）；之后每步取
    出标签 = 入标签 + h 的典范代表元，所以提升在双陪集内的选取上是规范化的。

    Returns:
        (商图边列表, 顶点列表)
    """
    edges = word_edges(alphabet, seq.letters)
    if seq.anchor is not None:
        start, (first_edge, first_coset) = seq.anchor
        if first_edge != edges[0]:
            raise ValidationError(f"锚点边 '{first_edge}' 与首字母的 e⁻ '{edges[0]}' 不符")
    else:
        start = cover.canonical_lift(cover.graph.o(edges[0]))
        first_coset = cover.identity(start.projection)

    vertices = [start, cover.step(start, edges[0], first_coset)]
    for a in seq.letters:
        letter = alphabet.letters[a]
        x = vertices[-1]
        group = cover.gog.vertex_groups[x.projection]
        c_in = cover.label(x, vertices[-2])[1]
        vertices.append(cover.step(x, letter.e_plus, group.add(c_in, letter.h)))
    return edges, vertices


def shift_distance(x: SymbolSequence, y: SymbolSequence) -> float:
    """
    d(x, y) = exp(−sup{n : 在 [−n, n] 上一致})，0 处不同则为 1

    两个截断完全相同时为 0；在公共窗口上处处一致但长度不同时返回的是上界。
    """
    if x.letters == y.letters and x.origin == y.origin:
        return 0.0
    return math.exp(-_agreement(x.at, y.at, min(x.origin, y.origin), min(len(x) - x.origin, len(y) - y.origin) - 1))


def trajectory_distance(a: Sequence[CoverVertex], b: Sequence[CoverVertex], origin: int) -> float:
    """以下标 origin 为时间 0 的两条离散测地线之间的同型距离"""
    if list(a) == list(b):
        return 0.0

    def at(seq):
        return lambda i: seq[origin + i] if 0 <= origin + i < len(seq) else None

    return math.exp(-_agreement(at(a), at(b), origin, min(len(a), len(b)) - origin - 1))


def _agreement(at_x, at_y, back: int, forward: int) -> int:
    """最大的 n 使得 [−n, n] 上一致；0 处不同时为 0"""
    if at_x(0) != at_y(0):
        return 0
    n = 0
    while n < min(back, forward):
        k = n + 1
        if at_x(k) != at_y(k) or at_x(-k) != at_y(-k):
            break
        n = k
    return n
