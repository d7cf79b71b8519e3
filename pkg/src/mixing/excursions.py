"""远足分解、常 Jacobian 检查与扩张性审计"""

import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from src.coding import Alphabet, word_mass, words
from src.core import ValidationError
from src.gibbs import GibbsMeasure

from .models import Excursion, ExcursionSet, JacobianCheck

logger = logging.getLogger(__name__)

MassFn = Callable[[Sequence[int]], float]


def jacobian_constancy_check(
    measure: GibbsMeasure,
    alphabet: Alphabet,
    word: Sequence[int],
    depth: int = 2,
    mass: Optional[MassFn] = None,
) -> JacobianCheck:
    """
    比较 P([w·z]) 与 P([w_n·z]) 在全部长度为 depth 的延伸 z 上的比值

    Args:
        mass: 柱集质量函数，默认精确的 word_mass；可传入经验质量
    """
    if not word:
        raise ValidationError("字不能为空")
    mass = mass or (lambda w: word_mass(measure, alphabet, w))
    word = list(word)
    last = word[-1]

    low, high = math.inf, 0.0
    refinements = skipped = 0
    for first in alphabet.transitions.successors(last):
        for tail in words(alphabet, depth, start=[first]):
            if len(tail) != depth:
                continue
            full, short = mass(word + tail), mass([last] + tail)
            if full <= 0 or short <= 0:
                skipped += 1
                continue
            ratio = full / short
            low, high = min(low, ratio), max(high, ratio)
            refinements += 1

    if not refinements:
        low = high = 1.0
    check = JacobianCheck(word=word, low=low, high=high, refinements=refinements, skipped=skipped)
    logger.debug(f"Jacobian check on {word}: deviation {check.deviation:.3g} over {refinements} refinements")
    return check


def _distance_to_set(alphabet: Alphabet, E: Sequence[str]) -> Dict[str, int]:
    graph = alphabet.gog.graph
    best: Dict[str, int] = {}
    for v in E:
        for w, d in graph.distances_from(v).items():
            best[w] = min(best.get(w, d), d)
    return best


def excursion_decomposition(
    measure: GibbsMeasure,
    alphabet: Alphabet,
    E: Iterable[str],
    length_cap: int = 12,
    min_mass: float = 0.0,
) -> ExcursionSet:
    """
    从 E-字母出发、内部避开 E-字母、回到 E-字母的全部字

    E-字母是位于 E 中顶点的字母（t(e⁻) ∈ E）。超过 length_cap 仍未返回、或质量低于
    min_mass 而被剪枝的前缀质量计入 remaining，所以每个 E-字母上远足质量与剩余质量之和
    等于该字母的质量。

    Raises:
        ValidationError: E 为空或不含任何字母
    """
    E = sorted(set(E))
    if not E:
        raise ValidationError("集合 E 不能为空")
    graph = alphabet.gog.graph
    members = set(E)
    letters_E = [a for a, x in enumerate(alphabet.letters) if graph.t(x.e_minus) in members]
    if not letters_E:
        raise ValidationError(f"E = {E} 上没有字母")
    in_E = set(letters_E)
    distance = _distance_to_set(alphabet, E)

    def height(word: List[int]) -> int:
        return max(distance[graph.t(alphabet.letters[a].e_minus)] for a in word)

    excursions: List[Excursion] = []
    letter_mass = {a: word_mass(measure, alphabet, [a]) for a in letters_E}
    remaining = {a: 0.0 for a in letters_E}
    complete = True

    for a in letters_E:
        stack = [[a]]
        while stack:
            prefix = stack.pop()
            for b in alphabet.transitions.successors(prefix[-1]):
                word = prefix + [b]
                m = word_mass(measure, alphabet, word)
                if b in in_E:
                    excursions.append(Excursion(word, m, height(word)))
                elif len(word) > length_cap or m < min_mass:
                    remaining[a] += m
                    complete = False
                else:
                    stack.append(word)

    excursions.sort(key=lambda ex: (ex.word[0], ex.length, ex.word))
    result = ExcursionSet(
        E=E,
        letters=letters_E,
        excursions=excursions,
        letter_mass=letter_mass,
        remaining=remaining,
        length_cap=length_cap,
        complete=complete,
    )
    logger.info(
        f"✅ {len(excursions)} excursions from {len(letters_E)} letters on E={E}, "
        f"tail bound {max(remaining.values()):.3g}"
    )
    return result


def one_sided_distance(x: Sequence[int], y: Sequence[int]) -> float:
    """单边移位度量 exp(−第一个不同的下标)，截断相同时为 0"""
    for n, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return math.exp(-n)
    return 0.0


def dilation_audit(alphabet: Alphabet, excursions: Sequence[Excursion], extra: int = 3) -> List[dict]:
    """
    首次回返映射 σ^L 在同一远足柱集内的扩张因子

    对每个远足，取在其后再一致 extra 个字母、随后分岔的两条序列，比较 σ^L 前后的距离；
    因子应恰为 e^L。末字母之后无法分岔的远足跳过。
    """
    rows = []
    for ex in excursions:
        pair = _branching_pair(alphabet, ex.word, extra)
        if pair is None:
            continue
        x, y = pair
        before = one_sided_distance(x, y)
        after = one_sided_distance(x[ex.length:], y[ex.length:])
        rows.append({
            "word": ex.word,
            "length": ex.length,
            "factor": after / before,
            "expected": math.exp(ex.length),
        })
    return rows


def _branching_pair(alphabet: Alphabet, word: List[int], extra: int):
    """沿唯一后继延长 extra 步后在有两个后继的位置分岔"""
    x = list(word)
    for _ in range(extra):
        succ = alphabet.transitions.successors(x[-1])
        if not succ:
            return None
        x.append(succ[0])
    for cut in range(len(x) - 1, len(word) - 1, -1):
        succ = alphabet.transitions.successors(x[cut])
        if len(succ) >= 2:
            head = x[:cut + 1]
            return head + [succ[0]], head + [succ[1]]
    return None
