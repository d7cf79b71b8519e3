"""
命令流水线

每个命令包装一个模块的计算，返回 JSON 摘要、CSV 序列和可选的轨迹行，
由 run_command 按 命令-配置哈希 写入运行目录。
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import islice
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as ModelValidationError

from src.coding import (
    Alphabet,
    build_alphabet,
    conjugacy_mismatches,
    decode,
    encode,
    encode_path,
    gurevich_pressure,
    markov_test,
    symbolic_gibbs_check,
    transitivity_witness,
)
from src.core import ResourceCapError, ValidationError, cfg
from src.cover import BassSerreCover, Cone
from src.gibbs import (
    GibbsMeasure,
    edge_frequencies,
    gibbs_property_check,
    sample_geodesic,
    sample_letters,
    sample_tasks,
    spawn_seeds,
    total_mass,
    trajectory_lines,
)
from src.lattice import (
    GeneratorRegistry,
    GeneratorSpec,
    build,
    core_prune,
    sphere_bound_certificate,
    length_spectrum_gcd,
    sphere_volumes,
    validate,
    volume,
)
from src.mixing import (
    Observable,
    common_envelope,
    decay_rate_fit,
    dilation_audit,
    exact_correlations,
    excursion_decomposition,
    exp_tail_fit,
    jacobian_constancy_check,
    monte_carlo_correlations,
    return_time_tail,
)
from src.storage import ReportAggregator, ResultStore
from src.thermo import (
    Conductances,
    PattersonDensity,
    critical_exponent,
    patterson_shadow_measure,
    shadow_lemma_check,
)

logger = logging.getLogger(__name__)

# 需要主种子的命令
STOCHASTIC_COMMANDS = ("sample", "code", "markov", "mix")

SAMPLE_TASKS = 4
TRAJECTORY_STEPS = 1000
SEGMENT_LENGTH = 50
MAX_SEGMENTS = 1000
DECK_SEGMENTS = 20
TRANSITIVITY_LENGTH = 40
GIBBS_MAX_LENGTH = 10
SYMBOLIC_MAX_LENGTH = 4
FAMILY_SIZE = 10
JACOBIAN_MAX_WORD = 6
EXCURSION_CAP = 8
EXCURSION_MIN_MASS = 1e-9
CONTROL_LETTERS = 5


class RunConfig(BaseModel):
    """单次运行的参数（范围写在字段约束上）"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    lattice: str = "modular_ray"
    """生成器类型，或 explicit 格式的 JSON 配置文件路径"""

    q: int = Field(2, ge=2, le=64)
    depth: int = Field(14, ge=1, le=200)
    children: Tuple[int, ...] = (2,)
    conductance: str = "zero"
    """zero | visual | constant:<κ> | random:<seed> | 每边取值的 JSON 文件路径"""

    epsilon: float = Field(default_factory=lambda: cfg.patterson_offset, gt=0.0, le=1.0)
    radius: int = Field(10, ge=2, le=40)
    seed: Optional[int] = Field(None, ge=0)
    samples: int = Field(100_000, ge=1, le=100_000_000)
    out: Optional[Path] = None
    alpha: float = Field(1.0, gt=0.0, le=1.0)
    nmax: int = Field(20, ge=1, le=500)
    window: Tuple[int, int] = (3, 20)

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.command not in COMMANDS and self.command != "report":
            raise ValueError(f"未知命令 '{self.command}'")
        if self.command in STOCHASTIC_COMMANDS and self.seed is None:
            raise ValueError(f"命令 '{self.command}' 需要主种子 --seed")
        start, end = self.window
        if start < 1 or end <= start:
            raise ValueError(f"拟合窗口不合法: {self.window}")
        return self

    def key_fields(self) -> dict:
        """参与内容哈希的字段（不含输出目录）"""
        return self.model_dump(mode="json", exclude={"out"})


def load_config(**values) -> RunConfig:
    """
    构造 RunConfig

    Raises:
        ValidationError: 参数不合法
    """
    try:
        return RunConfig(**values)
    except ModelValidationError as e:
        details = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise ValidationError(f"参数不合法: {details}") from e


def load_conductances(text: str, gog) -> Conductances:
    """
    解析导通系数说明

    Raises:
        ValidationError: 格式无法识别
    """
    kind, _, arg = text.partition(":")
    try:
        if kind == "zero":
            return Conductances.zero(gog)
        if kind == "visual":
            return Conductances.visual(gog)
        if kind == "constant":
            return Conductances.constant(gog, float(arg))
        if kind == "random":
            return Conductances.random(gog, seed=int(arg))
    except ValueError as e:
        raise ValidationError(f"导通系数参数不合法: {text}") from e

    path = Path(text)
    if not path.is_file():
        raise ValidationError(f"无法识别的导通系数说明: {text}")
    with open(path, "r", encoding="utf-8") as f:
        mapping = json.load(f)
    return Conductances.from_mapping(gog, mapping)


def _seed(sequence: np.random.SeedSequence) -> int:
    return int(sequence.generate_state(1)[0])


class RunContext:
    """按需构造并缓存一次运行用到的对象"""

    def __init__(self, config: RunConfig):
        self.config = config

    @cached_property
    def spec(self) -> GeneratorSpec:
        kind = self.config.lattice
        if GeneratorRegistry.get_optional(kind) is None:
            path = Path(kind)
            if not path.is_file():
                raise ValidationError(f"'{kind}' 既不是已注册的生成器，也不是配置文件")
            return GeneratorSpec(kind="explicit", config_text=path.read_text(encoding="utf-8"))
        return GeneratorSpec(
            kind=kind,
            q=self.config.q,
            depth=self.config.depth,
            children=self.config.children,
        )

    @cached_property
    def gog(self):
        return build(self.spec)

    @cached_property
    def c(self) -> Conductances:
        return load_conductances(self.config.conductance, self.gog)

    @cached_property
    def measure(self) -> GibbsMeasure:
        return GibbsMeasure(self.gog, self.c)

    @cached_property
    def alphabet(self):
        return build_alphabet(self.gog)

    @cached_property
    def cover(self) -> BassSerreCover:
        return BassSerreCover(self.gog)

    @cached_property
    def base_letters(self) -> List[int]:
        graph = self.gog.graph
        return [a for a, x in enumerate(self.alphabet.letters) if graph.t(x.e_minus) == self.gog.base_vertex]


@dataclass
class CommandOutput:
    """命令输出：摘要、CSV 序列（名称 → 表头与行，空名称为主序列）与轨迹行"""

    result: dict
    series: Dict[str, Tuple[List[str], List[list]]] = field(default_factory=dict)
    trajectory: Optional[List[str]] = None


# ==================== 格 ====================

def run_build(ctx: RunContext) -> CommandOutput:
    gog = ctx.gog
    report = validate(gog)
    pruned = core_prune(gog)
    distances = gog.distances
    rows = [[v, gog.vertex_order(v), gog.lift_degree(v), distances.get(v, -1)] for v in gog.vertices]
    result = {
        "lattice": gog.summary(),
        "validation": report.to_dict(),
        "pruned_vertices": len(pruned.vertices),
        "gcd": length_spectrum_gcd(gog, 16),
    }
    return CommandOutput(result, {"": (["vertex", "order", "lift_degree", "distance"], rows)})


def run_volume(ctx: RunContext) -> CommandOutput:
    gog, config = ctx.gog, ctx.config
    result = volume(gog, config.depth).to_dict()
    reach = min(config.depth, gog.depth)
    spheres = sphere_volumes(gog, reach)

    if ctx.spec.kind == "rooted_tree_lattice":
        rows = sphere_bound_certificate(gog, config.q, ctx.spec.max_tree_degree, max(config.children), min(reach, 20))
        result["sphere_bounds"] = [
            {
                "n": row["n"],
                "sphere": float(row["sphere"]),
                "bound_d": float(row["bound_d"]),
                "bound_b": float(row["bound_b"]),
                "ok": row["ok"],
            }
            for row in rows
        ]
    return CommandOutput(result, {"": (["n", "value", "error"], [[n, float(s), 0.0] for n, s in enumerate(spheres)])})


# ==================== 热力学 ====================

def run_delta(ctx: RunContext) -> CommandOutput:
    summary = critical_exponent(ctx.gog, ctx.c, ctx.config.radius)
    result = summary.to_dict()
    if ctx.spec.kind == "modular_ray" and ctx.c.is_zero:
        result["log_q"] = math.log(ctx.config.q)
    rows = [[n, float(a), 0.0] for n, a in enumerate(summary.annulus_sums)]
    logger.info(f"✅ δ̂ = {summary.delta_estimate:.6f} (exact {summary.exact})")
    return CommandOutput(result, {"": (["n", "value", "error"], rows)})


def run_shadows(ctx: RunContext) -> CommandOutput:
    gog, c, radius = ctx.gog, ctx.c, ctx.config.radius
    density = PattersonDensity(gog, c)
    report = shadow_lemma_check(gog, c, radius, density=density)
    result = report.to_dict()

    smaller = radius - 2
    if smaller - 4 > report.r:
        previous = shadow_lemma_check(gog, c, smaller, density=density)
        result["previous"] = {"radius": smaller, "kappa": previous.kappa}
        result["variation"] = abs(report.kappa - previous.kappa) / report.kappa
    else:
        logger.warning(f"⚠️ Radius {radius} too small for a stability comparison")

    rows = [[row["depth"], row["min"], row["max"]] for row in report.ratios]
    return CommandOutput(result, {"": (["depth", "min", "max"], rows)})


def run_cylinders(ctx: RunContext) -> CommandOutput:
    gog, c, cover, config = ctx.gog, ctx.c, ctx.cover, ctx.config
    density = PattersonDensity(gog, c)
    s = density.delta + config.epsilon

    def cone_at(v):
        return Cone(apex=cover.parent(v), target=v, edge=v.last_edge)

    def estimate(v):
        return patterson_shadow_measure(cover, cover.base, cone_at(v), c, config.radius, s=s, exact_shortcut=False)

    rows, max_relative, violations = [], 0.0, 0
    for _, parent in cover.children(cover.base):
        exact = density.cone_mass(cover, cone_at(parent))
        total = estimate(parent)
        kids = [estimate(w) for _, w in cover.children(parent)]
        budget = total.error + sum(k.error for k in kids) + 1e-9
        if abs(total.value - sum(k.value for k in kids)) > budget:
            violations += 1
        if exact > 0:
            max_relative = max(max_relative, abs(total.value - exact) / exact)
        rows.append([str(parent), 1, exact, total.value, total.error])

    measure = ctx.measure
    masses = []
    for path in measure.operator.paths(3, start=gog.base_vertex):
        edges = [measure.edges[i] for i in path]
        masses.append(["/".join(edges), measure.quotient_mass(edges)])

    result = {
        "s": s,
        "radius": config.radius,
        "cones": len(rows),
        "max_relative_error": max_relative,
        "additivity_violations": violations,
        "cylinders": len(masses),
    }
    logger.info(f"✅ Patterson consistency: max relative error {max_relative:.4f}, {violations} additivity violations")
    return CommandOutput(result, {
        "": (["cone", "depth", "exact", "truncated", "error"], rows),
        "gibbs": (["path", "mass"], masses),
    })


# ==================== Gibbs 测度与采样 ====================

def run_sample(ctx: RunContext) -> CommandOutput:
    measure, config = ctx.measure, ctx.config
    edges = sample_tasks(measure, config.samples, config.seed, SAMPLE_TASKS)
    freq = edge_frequencies(edges, measure.edges)
    tv = 0.5 * float(np.abs(freq - measure.edge_law).sum())

    steps = min(config.samples, TRAJECTORY_STEPS)
    lifted = sample_geodesic(measure, steps, config.seed, lift=True)
    seq = encode(ctx.cover, ctx.alphabet, lifted)
    lines = trajectory_lines(lifted, [str(a) for a in seq.letters])

    logger.info(f"✅ Sampled {len(edges)} steps (seed {config.seed}), TV distance {tv:.4f}")
    result = {
        "steps": len(edges),
        "seed": config.seed,
        "tasks": SAMPLE_TASKS,
        "tv_distance": tv,
        "trajectory_steps": steps,
        "measure": measure.to_dict(),
    }
    rows = [[e, float(f), float(p)] for e, f, p in zip(measure.edges, freq, measure.edge_law)]
    return CommandOutput(result, {"": (["edge", "frequency", "stationary"], rows)}, trajectory=lines)


def run_gibbs_check(ctx: RunContext) -> CommandOutput:
    measure = ctx.measure
    check = gibbs_property_check(measure, max_length=GIBBS_MAX_LENGTH)
    result = {
        "delta": measure.delta,
        "gibbs": check.to_dict(),
        "total_mass": total_mass(measure).to_dict(),
    }
    if ctx.base_letters:
        symbolic = symbolic_gibbs_check(measure, ctx.alphabet, ctx.base_letters, max_length=SYMBOLIC_MAX_LENGTH)
        result["symbolic"] = symbolic.to_dict()
    else:
        logger.warning("⚠️ No letters at the base vertex, symbolic Gibbs check skipped")
    return CommandOutput(result)


# ==================== 符号编码 ====================

def _flow_conjugacy(
    measure: GibbsMeasure,
    cover: BassSerreCover,
    alphabet: Alphabet,
    sequence: np.random.SeedSequence,
) -> Optional[int]:
    """在独立采样、多走一步的提升测地线上比较 Θ∘g₁ 与 σ∘Θ；窗口超出元素模式时为 None"""
    sample = sample_geodesic(measure, SEGMENT_LENGTH + 1, _seed(sequence), lift=True)
    try:
        return conjugacy_mismatches(cover, alphabet, sample.vertices, sample.footpoint)
    except ResourceCapError:
        return None


def run_code(ctx: RunContext) -> CommandOutput:
    measure, cover, alphabet, config = ctx.measure, ctx.cover, ctx.alphabet, ctx.config
    segments = min(config.samples, MAX_SEGMENTS)
    roundtrip = conjugacy = deck = incomplete = 0

    for k, sequence in enumerate(spawn_seeds(config.seed, segments)):
        sample = sample_geodesic(measure, SEGMENT_LENGTH, _seed(sequence), lift=True)
        seq = encode(cover, alphabet, sample)
        if not seq.complete:
            incomplete += 1
            continue

        edges, vertices = decode(cover, alphabet, seq)
        if edges != sample.edges or encode_path(cover, alphabet, vertices, sample.footpoint).letters != seq.letters:
            roundtrip += 1
        if _flow_conjugacy(measure, cover, alphabet, sequence.spawn(1)[0]):
            conjugacy += 1

        if k < DECK_SEGMENTS:
            anchor = sample.vertices[0]
            try:
                elements = list(islice(ctx.gog.vertex_groups[anchor.projection].elements(), 1, 3))
            except ResourceCapError:
                continue
            for g in elements:
                translated = [cover.translate(anchor, g, y) for y in sample.vertices]
                if encode_path(cover, alphabet, translated, sample.footpoint).letters != seq.letters:
                    deck += 1

    witness = transitivity_witness(alphabet, max_length=TRANSITIVITY_LENGTH)
    if roundtrip or conjugacy or deck:
        logger.error(f"❌ Coding failures: roundtrip {roundtrip}, conjugacy {conjugacy}, deck {deck}")
    else:
        logger.info(f"✅ Coding verified on {segments - incomplete} segments of length {SEGMENT_LENGTH}")

    result = {
        "seed": config.seed,
        "segments": segments,
        "segment_length": SEGMENT_LENGTH,
        "incomplete": incomplete,
        "roundtrip_failures": roundtrip,
        "conjugacy_failures": conjugacy,
        "deck_failures": deck,
        "letters": len(alphabet),
        "counts_per_vertex": alphabet.counts_per_vertex(),
        "omitted": alphabet.omitted,
        "transitivity": witness,
    }
    rows = [
        [r["id"], r["e_minus"], " ".join(map(str, r["h_rep"])), r["e_plus"], r["class_size"]]
        for r in (a.to_dict(i) for i, a in enumerate(alphabet.letters))
    ]
    return CommandOutput(result, {"": (["id", "e_minus", "h_rep", "e_plus", "class_size"], rows)})


def _markov_control(rng: np.random.Generator, n: int) -> List[int]:
    """随机一阶 Markov 链（CONTROL_LETTERS 个状态）"""
    cumulative = np.cumsum(rng.dirichlet(np.ones(CONTROL_LETTERS), size=CONTROL_LETTERS), axis=1)
    draws = rng.random(n)
    state, out = 0, []
    for u in draws:
        state = min(int(np.searchsorted(cumulative[state], u, side="right")), CONTROL_LETTERS - 1)
        out.append(state)
    return out


def run_markov(ctx: RunContext) -> CommandOutput:
    config = ctx.config
    process_seed, iid_seed, chain_seed = spawn_seeds(config.seed, 3)
    letters = sample_letters(ctx.measure, ctx.alphabet, config.samples, _seed(process_seed))
    iid = np.random.default_rng(iid_seed).integers(0, CONTROL_LETTERS, size=config.samples).tolist()
    chain = _markov_control(np.random.default_rng(chain_seed), config.samples)

    result = {
        "seed": config.seed,
        "samples": config.samples,
        "process": markov_test(letters).to_dict(),
        "iid_control": markov_test(iid).to_dict(),
        "markov_control": markov_test(chain).to_dict(),
    }
    return CommandOutput(result)


def run_gurevich(ctx: RunContext) -> CommandOutput:
    letter = ctx.base_letters[0] if ctx.base_letters else 0
    estimate = gurevich_pressure(ctx.alphabet, ctx.c, letter, ctx.config.nmax)
    result = {**estimate.to_dict(), "delta": ctx.measure.delta}
    rows = [[n, z, 0.0] for n, z in enumerate(estimate.log_counts, start=1)]
    return CommandOutput(result, {"": (["n", "value", "error"], rows)})


# ==================== 混合性 ====================

def run_tails(ctx: RunContext) -> CommandOutput:
    measure, config = ctx.measure, ctx.config
    E = [ctx.gog.base_vertex]
    start, end = config.window
    exact = return_time_tail(measure, E, config.nmax)
    fit = exp_tail_fit(exact.values, start=start, end=end)
    result = {"E": E, "exact": {"fit": fit.to_dict(), "t1": exact.values[0]}}
    series = {"": (["n", "value", "error"], [p.to_row() for p in exact.points])}

    if config.seed is not None:
        edges = sample_geodesic(measure, config.samples, config.seed).edges
        empirical = return_time_tail(measure, E, config.nmax, edges=edges)
        worst = max(
            (abs(a.value - b.value) / b.error for a, b in zip(exact.points, empirical.points) if b.error > 0),
            default=0.0,
        )
        result["monte_carlo"] = {"seed": config.seed, "samples": config.samples, "max_z": worst}
        series["monte_carlo"] = (["n", "value", "error"], [p.to_row() for p in empirical.points])

    logger.info(f"✅ Tail fit on E={E}: κ' = {fit.kappa:.4f}, R² = {fit.r_squared:.4f}")
    return CommandOutput(result, series)


def run_mix(ctx: RunContext) -> CommandOutput:
    measure, alphabet, config = ctx.measure, ctx.alphabet, ctx.config
    gcd = length_spectrum_gcd(ctx.gog, 12)
    gcd_longer = length_spectrum_gcd(ctx.gog, 16)
    if gcd != gcd_longer:
        logger.warning(f"⚠️ Length spectrum gcd changed from {gcd} to {gcd_longer} between lengths 12 and 16")

    seeds = spawn_seeds(config.seed, FAMILY_SIZE + 1)
    letters = sample_letters(measure, alphabet, config.samples, _seed(seeds[0]))
    family = [
        Observable.random(alphabet, k % 2, seed=_seed(seeds[k + 1]), alpha=config.alpha)
        for k in range(FAMILY_SIZE)
    ]

    collected, norms, fits, pairs, series = [], [], [], [], {}
    for k, phi in enumerate(family):
        psi = family[(k + 1) % FAMILY_SIZE]
        cov = monte_carlo_correlations(letters, phi, psi, config.nmax, seed=config.seed)
        fit = decay_rate_fit(cov, phi, psi, start=config.window[0])
        entry = {"phi": phi.name, "psi": psi.name, "depth": max(phi.depth, psi.depth), "fit": fit.to_dict()}
        if not phi.depth and not psi.depth:
            exact = exact_correlations(measure, alphabet, phi, psi, config.nmax)
            entry["max_z_vs_exact"] = max(
                (abs(a.value - b.value) / b.error for a, b in zip(exact.points, cov.points) if b.error > 0),
                default=0.0,
            )
        collected.append(cov)
        norms.append(phi.holder_norm() * psi.holder_norm())
        fits.append(fit)
        pairs.append(entry)
        series[f"pair{k}"] = (["n", "value", "error"], [p.to_row() for p in cov.points])

    envelope = common_envelope(collected, norms, fits)
    usable = [f.r_squared for f in fits if not f.degenerate]

    deviation = 1.0
    for length in range(1, min(JACOBIAN_MAX_WORD, len(letters)) + 1):
        check = jacobian_constancy_check(measure, alphabet, letters[:length])
        deviation = max(deviation, check.deviation)

    excursions = excursion_decomposition(
        measure, alphabet, [ctx.gog.base_vertex], length_cap=EXCURSION_CAP, min_mass=EXCURSION_MIN_MASS
    )
    dilation = dilation_audit(alphabet, excursions.excursions)

    logger.info(f"✅ Correlation envelope over {FAMILY_SIZE} observables: κ = {envelope['kappa']:.4f}")
    result = {
        "seed": config.seed,
        "samples": config.samples,
        "gcd": gcd,
        "gcd_longer": gcd_longer,
        "pairs": pairs,
        "envelope": envelope,
        "min_r_squared": min(usable) if usable else 0.0,
        "jacobian_deviation": deviation,
        "excursions": excursions.to_dict(),
        "dilation_max_error": max((abs(r["factor"] / r["expected"] - 1.0) for r in dilation), default=0.0),
    }
    return CommandOutput(result, series)


COMMANDS: Dict[str, Callable[[RunContext], CommandOutput]] = {
    "build": run_build,
    "volume": run_volume,
    "delta": run_delta,
    "shadows": run_shadows,
    "cylinders": run_cylinders,
    "sample": run_sample,
    "code": run_code,
    "gibbs-check": run_gibbs_check,
    "markov": run_markov,
    "tails": run_tails,
    "mix": run_mix,
    "gurevich": run_gurevich,
}


def run_command(config: RunConfig) -> List[Path]:
    """
    执行一个命令并写出结果

    Returns:
        写出的文件路径

    Raises:
        ArborError: 命令执行失败（退出码见各子类）
    """
    store = ResultStore(config.out)
    if config.command == "report":
        ReportAggregator(store.base_path).generate()
        return [store.base_path / "report.json", store.base_path / "report.md"]

    logger.info(f"Running {config.command} on {config.lattice} (seed {config.seed}, samples {config.samples})")
    output = COMMANDS[config.command](RunContext(config))

    key = config.key_fields()
    paths = [store.save_summary(config.command, key, output.result)]
    for name, (header, rows) in output.series.items():
        paths.append(store.save_series(config.command, key, header, rows, name or None))
    if output.trajectory is not None:
        paths.append(store.save_trajectory(config.command, key, output.trajectory))

    logger.info(f"✅ {config.command} finished: {store.stem(config.command, key)}")
    return paths
