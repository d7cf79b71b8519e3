"""字母过程的 Markov 性检验"""

import logging
from collections import Counter, defaultdict
from typing import Dict, Sequence

import numpy as np
from scipy import stats

from src.core import ValidationError

from .models import MarkovTestResult

logger = logging.getLogger(__name__)

# 每个上下文（前一字母）至少需要的观测数
MIN_CONTEXT = 100
RECOMMENDED_LETTERS = 100_000


def markov_test(letters: Sequence[int], order: int = 1, min_count: int = MIN_CONTEXT) -> MarkovTestResult:
    """
    比较 P(Z_{n+1} | Z_n) 与 P(Z_{n+1} | Z_n, Z_{n−1})

    对每个中间字母 b 建立 (前一字母 a) × (后一字母 c) 的列联表，只保留观测数
    不少于 min_count 的行，做 χ² 独立性检验；各中间字母的统计量与自由度求和后
    给出总体 p 值。

    Raises:
        ValidationError: order 不是 1
    """
    if order != 1:
        raise ValidationError(f"只支持一阶 Markov 性检验: order={order}")
    if len(letters) < RECOMMENDED_LETTERS:
        logger.warning(f"⚠️ Markov test on only {len(letters)} letters (recommended ≥ {RECOMMENDED_LETTERS})")

    triples: Dict[int, Counter] = defaultdict(Counter)
    for a, b, c in zip(letters, letters[1:], letters[2:]):
        triples[b][(a, c)] += 1

    total, dof = 0.0, 0
    contexts, skipped = [], []
    for b in sorted(triples):
        counts = triples[b]
        row_totals = Counter()
        for (a, _), n in counts.items():
            row_totals[a] += n
        rows = sorted(a for a, n in row_totals.items() if n >= min_count)
        cols = sorted({c for (a, c) in counts if a in rows})
        if len(rows) < 2 or len(cols) < 2:
            skipped.append(int(b))
            continue
        table = np.array([[counts.get((a, c), 0) for c in cols] for a in rows], dtype=float)
        table = table[:, table.sum(axis=0) > 0]
        statistic, p_value, k, _ = stats.chi2_contingency(table, correction=False)
        total += float(statistic)
        dof += int(k)
        contexts.append({
            "letter": int(b),
            "statistic": float(statistic),
            "dof": int(k),
            "p_value": float(p_value),
            "observations": int(table.sum()),
        })

    p_value = float(stats.chi2.sf(total, dof)) if dof > 0 else 1.0
    result = MarkovTestResult(statistic=total, dof=dof, p_value=p_value, contexts=contexts, skipped=skipped)
    if result.violation:
        logger.info(f"⚠️ Order-1 Markov property rejected: χ² = {total:.2f}, dof = {dof}, p = {p_value:.3g}")
    else:
        logger.info(f"✅ No Markov violation detected: χ² = {total:.2f}, dof = {dof}, p = {p_value:.3g}")
    return result
