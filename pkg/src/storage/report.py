"""运行目录汇总报告"""

import json
import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .results import ResultStore, omit_empty

logger = logging.getLogger(__name__)

# 各项检查的容差
TOLERANCES = {
    "volume_tail": 1e-9,
    "delta_vs_reference": 0.05,
    "shadow_variation": 0.10,
    "patterson_relative": 0.10,
    "gibbs_constant": 10.0,
    "gibbs_slope": 0.05,
    "sample_tv": 0.02,
    "gurevich_vs_delta": 0.10,
    "tail_r_squared": 0.95,
    "tail_kappa": 0.4,
    "mix_r_squared": 0.9,
    "jacobian": 1e-6,
    "markov_p": 0.01,
}

# 命令输出顺序
COMMAND_ORDER = {
    "build": 1,
    "volume": 2,
    "delta": 3,
    "shadows": 4,
    "cylinders": 5,
    "sample": 6,
    "code": 7,
    "gibbs-check": 8,
    "markov": 9,
    "gurevich": 10,
    "tails": 11,
    "mix": 12,
}

Check = Tuple[str, bool, str]


def _close(value: Optional[float], reference: Optional[float], tol: float) -> bool:
    if value is None or reference is None:
        return False
    return abs(float(value) - float(reference)) <= tol


def _check_build(r: dict) -> List[Check]:
    return [("structure valid", bool(r["validation"]["valid"]), f"{len(r['validation']['errors'])} errors")]


def _check_volume(r: dict) -> List[Check]:
    tail = r.get("tail_bound")
    checks = [("volume bracket", tail is not None and tail <= TOLERANCES["volume_tail"], f"tail bound {tail}")]
    if "sphere_bounds" in r:
        bad = [row["n"] for row in r["sphere_bounds"] if not row["ok"]]
        checks.append(("sphere bound", not bad, f"violations at n = {bad}" if bad else "all spheres within bound"))
    return checks


def _check_delta(r: dict) -> List[Check]:
    estimate = r["delta_estimate"]
    checks = [(
        "δ̂ vs exact",
        _close(estimate, r.get("delta_exact"), TOLERANCES["delta_vs_reference"]),
        f"δ̂ = {estimate:.4f}, exact = {r.get('delta_exact')}",
    )]
    if "log_q" in r:
        checks.append((
            "δ̂ vs ln q",
            _close(estimate, r["log_q"], TOLERANCES["delta_vs_reference"]),
            f"ln q = {r['log_q']:.4f}",
        ))
    return checks


def _check_shadows(r: dict) -> List[Check]:
    variation = r.get("variation")
    ok = variation is not None and math.isfinite(r["kappa"]) and variation < TOLERANCES["shadow_variation"]
    return [("shadow constant stable", ok, f"κ̂ = {r['kappa']:.4f}, variation {variation}")]


def _check_cylinders(r: dict) -> List[Check]:
    return [
        ("Patterson agreement", r["max_relative_error"] <= TOLERANCES["patterson_relative"],
         f"max relative error {r['max_relative_error']:.4f}"),
        ("sibling additivity", r["additivity_violations"] == 0, f"{r['additivity_violations']} violations"),
    ]


def _check_sample(r: dict) -> List[Check]:
    return [("edge frequencies", r["tv_distance"] <= TOLERANCES["sample_tv"], f"TV = {r['tv_distance']:.4f}")]


def _check_code(r: dict) -> List[Check]:
    return [
        ("roundtrip", r["roundtrip_failures"] == 0, f"{r['segments']} segments"),
        ("flow/shift conjugacy", r["conjugacy_failures"] == 0, f"{r['conjugacy_failures']} failures"),
        ("deck invariance", r["deck_failures"] == 0, f"{r['deck_failures']} failures"),
        ("transitivity", r["transitivity"]["failures"] == 0,
         f"{r['transitivity']['components']} components, longest witness {r['transitivity']['longest']}"),
    ]


def _check_gibbs(r: dict) -> List[Check]:
    g = r["gibbs"]
    return [
        ("Gibbs constant", g["constant"] <= TOLERANCES["gibbs_constant"], f"C = {g['constant']:.4f}"),
        ("log-mass slope", _close(g["slope"], -g["delta"], TOLERANCES["gibbs_slope"]),
         f"slope {g['slope']:.4f}, δ = {g['delta']:.4f}"),
    ]


def _check_markov(r: dict) -> List[Check]:
    tol = TOLERANCES["markov_p"]
    return [
        ("i.i.d. control", r["iid_control"]["p_value"] > tol, f"p = {r['iid_control']['p_value']:.4g}"),
        ("Markov control", r["markov_control"]["p_value"] > tol, f"p = {r['markov_control']['p_value']:.4g}"),
    ]


def _check_gurevich(r: dict) -> List[Check]:
    return [(
        "Gurevich pressure vs δ",
        _close(r["pressure"], r["delta"], TOLERANCES["gurevich_vs_delta"]),
        f"P = {r['pressure']:.4f}, δ = {r['delta']:.4f}",
    )]


def _check_tails(r: dict) -> List[Check]:
    fit = r["exact"]["fit"]
    return [
        ("tail fit R²", fit["r_squared"] >= TOLERANCES["tail_r_squared"], f"R² = {fit['r_squared']:.4f}"),
        ("tail rate", fit["kappa"] >= TOLERANCES["tail_kappa"], f"κ' = {fit['kappa']:.4f}"),
    ]


def _check_mix(r: dict) -> List[Check]:
    envelope = r["envelope"]
    return [
        ("length spectrum gcd", r["gcd"] == 1, f"gcd = {r['gcd']}"),
        ("correlation envelope", envelope["kappa"] > 0, f"κ = {envelope['kappa']:.4f}, c' = {envelope['constant']:.4g}"),
        ("envelope fit R²", r["min_r_squared"] >= TOLERANCES["mix_r_squared"], f"min R² = {r['min_r_squared']:.4f}"),
        ("Jacobian constancy", r["jacobian_deviation"] - 1.0 <= TOLERANCES["jacobian"],
         f"max/min = {r['jacobian_deviation']:.10f}"),
    ]


CHECKS: Dict[str, Callable[[dict], List[Check]]] = {
    "build": _check_build,
    "volume": _check_volume,
    "delta": _check_delta,
    "shadows": _check_shadows,
    "cylinders": _check_cylinders,
    "sample": _check_sample,
    "code": _check_code,
    "gibbs-check": _check_gibbs,
    "markov": _check_markov,
    "gurevich": _check_gurevich,
    "tails": _check_tails,
    "mix": _check_mix,
}


class ReportAggregator:
    """汇总一个运行目录中的全部命令输出"""

    def __init__(self, run_path: Optional[Path] = None):
        self.store = ResultStore(run_path)
        self.run_path = self.store.base_path

    def evaluate(self) -> List[dict]:
        """
        按 TOLERANCES 评估每个摘要

        Returns:
            每个摘要一条记录 {command, key, lattice, checks}
        """
        entries = []
        for summary in self.store.load_summaries():
            command = summary["command"]
            check = CHECKS.get(command)
            if check is None:
                continue
            try:
                checks = check(summary["result"])
            except (KeyError, TypeError, ValueError) as e:
                logger.warning(f"⚠️ Malformed {command} summary {summary.get('key')}: {e}")
                checks = [("summary readable", False, str(e))]
            entries.append({
                "command": command,
                "key": summary.get("key"),
                "lattice": summary.get("config", {}).get("lattice"),
                "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
            })
        entries.sort(key=lambda x: (COMMAND_ORDER.get(x["command"], 999), x["key"] or ""))
        return entries

    def generate(self) -> dict:
        """
        生成 report.json 与 report.md

        Returns:
            汇总 {entries, passed, failed, tolerances}
        """
        entries = self.evaluate()
        passed = sum(c["passed"] for e in entries for c in e["checks"])
        failed = sum(not c["passed"] for e in entries for c in e["checks"])
        report = {"entries": entries, "passed": passed, "failed": failed, "tolerances": TOLERANCES}

        self.run_path.mkdir(parents=True, exist_ok=True)
        with open(self.run_path / "report.json", "w", encoding="utf-8") as f:
            json.dump(omit_empty(report), f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")
        with open(self.run_path / "report.md", "w", encoding="utf-8") as f:
            f.write(self._generate_markdown(entries, passed, failed))

        if failed:
            logger.warning(f"⚠️ Report: {passed} passed, {failed} failed ({len(entries)} summaries)")
        else:
            logger.info(f"✅ Report: {passed} checks passed ({len(entries)} summaries)")
        return report

    def _generate_markdown(self, entries: List[dict], passed: int, failed: int) -> str:
        """生成 Markdown 内容"""
        lines = ["# 运行报告\n", f"\n通过 {passed} 项，失败 {failed} 项。\n"]
        for entry in entries:
            lines.append(f"\n## {entry['command']} ({entry['lattice']}, {entry['key']})\n\n")
            for c in entry["checks"]:
                mark = "✅" if c["passed"] else "❌"
                lines.append(f"- {mark} {c['name']}: {c['detail']}\n")
        return "".join(lines)
