import math

import numpy as np
import pytest

from src.core import ValidationError
from src.cover import BassSerreCover
from src.gibbs import (
    CylinderSpec,
    GibbsMeasure,
    edge_frequencies,
    gibbs_property_check,
    path_stabiliser_order,
    sample_geodesic,
    sample_tasks,
    total_mass,
    trajectory_lines,
)
from src.gibbs.measure import _geometric_tail
from src.lattice import rooted_tree_lattice
from src.thermo import Conductances


@pytest.fixture(scope="module")
def ray_measure(ray2):
    return GibbsMeasure(ray2, Conductances.zero(ray2))


@pytest.fixture(scope="module")
def quad_random(quad2):
    return Conductances.random(quad2, seed=11)


@pytest.fixture(scope="module")
def quad_measure(quad2, quad_random):
    return GibbsMeasure(quad2, quad_random)


def test_path_stabiliser_orders(ray2, quad2):
    assert path_stabiliser_order(ray2, ["u0"]) == 1
    assert path_stabiliser_order(ray2, ["u1", "d1"]) == 2
    assert path_stabiliser_order(ray2, ["u2", "d2"]) == 4
    assert path_stabiliser_order(ray2, ["u1", "u2"]) == 2
    assert path_stabiliser_order(quad2, ["a1a2", "a2b2"]) == 2
    assert path_stabiliser_order(quad2, ["b2a1", "a1a2"]) == 2


def test_stabiliser_through_rank_two_vertex_into_cyclic_one(quad2, quad_measure):
    path = ["a1a2", "a2a1", "a1b2"]
    quad_measure.check_path(path)
    assert path_stabiliser_order(quad2, path) == 2
    mass = quad_measure.quotient_mass(path)
    assert 0 < mass < 1


def test_edge_law_is_stationary_probability(quad_measure):
    law = quad_measure.edge_law
    assert law.sum() == pytest.approx(1.0)
    assert np.all(law >= 0)
    assert quad_measure.transition @ np.ones(len(law)) == pytest.approx(np.ones(len(law)))
    assert quad_measure.transition.T @ law == pytest.approx(law, abs=1e-10)


def test_single_edge_cylinder_masses_sum_to_one(quad_measure):
    total = sum(quad_measure.cylinder_mass(CylinderSpec((e,))).value for e in quad_measure.edges)
    assert total == pytest.approx(1.0)


def test_cylinder_validation(ray_measure):
    with pytest.raises(ValidationError):
        CylinderSpec(())
    with pytest.raises(ValidationError):
        CylinderSpec(("u0", "u1"), footpoint=5)
    with pytest.raises(ValidationError):
        ray_measure.cylinder_mass(CylinderSpec(("u0", "u0")))


def test_mass_does_not_depend_on_footpoint(quad_measure):
    edges = ("xa", "a1a2", "a2b2", "b2a1")
    masses = {quad_measure.cylinder_mass(CylinderSpec(edges, footpoint=k)).value for k in range(5)}
    assert len(masses) == 1


def test_homogeneous_base_edge_mass(ray_measure):
    # K = 9/8, normalised densities 2/3 on both sides, e^{-δ} = 1/2
    assert ray_measure.cylinder_mass(CylinderSpec(("u0",))).value == pytest.approx(0.25, rel=1e-2)
    assert ray_measure.cylinder_mass(CylinderSpec(("d0",))).value == pytest.approx(0.25, rel=1e-2)


def test_one_step_refinements_are_additive(quad2, quad_measure):
    path = ["xl", "l1+", "l2-", "lx"]
    lifted = quad_measure.lifted_mass(path)
    parts = quad_measure.extensions(path)
    assert sum(n * quad_measure.lifted_mass(path + [e]) for e, n in parts) == pytest.approx(lifted)

    stab = path_stabiliser_order(quad2, path)
    refined = sum(
        n * quad_measure.quotient_mass(path + [e]) * path_stabiliser_order(quad2, path + [e]) / stab
        for e, n in parts
    )
    assert refined == pytest.approx(quad_measure.quotient_mass(path))


def test_reversed_cylinder_under_reversed_conductances(quad2, quad_random, quad_measure):
    reversed_measure = GibbsMeasure(quad2, quad_random.reversed())
    path = ["xa", "a1b2", "b2a2", "a2a1"]
    back = [quad2.graph.bar(e) for e in reversed(path)]
    assert reversed_measure.quotient_mass(back) == pytest.approx(quad_measure.quotient_mass(path), rel=1e-9)


def test_gibbs_constant_in_homogeneous_case(ray_measure, ray2):
    check = gibbs_property_check(ray_measure, window=["v0"], max_length=8)
    assert check.spread == pytest.approx(1.0, rel=1e-2)
    assert check.constant == pytest.approx(2.0, rel=1e-2)
    assert check.slope == pytest.approx(-ray_measure.delta, abs=1e-2)


def test_gibbs_constant_is_finite_and_stable(quad_measure):
    short = gibbs_property_check(quad_measure, max_length=5)
    longer = gibbs_property_check(quad_measure, max_length=7)
    assert math.isfinite(short.constant)
    assert longer.constant >= short.constant
    assert longer.constant <= 6 * short.constant


def test_geometric_tail_helper():
    ratio, tail = _geometric_tail([8.0, 4.0, 2.0, 1.0])
    assert ratio == pytest.approx(0.5)
    assert tail == pytest.approx(1.0)

    ratio, tail = _geometric_tail([1.0, 2.0, 4.0, 8.0])
    assert ratio == pytest.approx(2.0)
    assert math.isinf(tail)

    assert _geometric_tail([0.0, 0.0, 3.0]) == (None, 0.0)


def test_total_mass_of_modular_ray(ray_measure):
    result = total_mass(ray_measure)
    assert not result.infinite
    # 尾部来自几何外推，不是证明过的上界
    assert not result.certified
    assert result.estimate.mode == "truncated"
    assert result.ratio == pytest.approx(0.5, abs=0.05)
    assert result.estimate.value >= math.fsum(result.levels)


def test_total_mass_of_finite_lattice_is_certified(theta):
    measure = GibbsMeasure(theta, Conductances.random(theta, seed=3))
    result = total_mass(measure)
    assert result.certified
    assert result.estimate.mode == "exact"
    assert result.estimate.value == pytest.approx(math.fsum(measure.raw_edge_mass))


def test_total_mass_of_binary_tree_lattice(binary8):
    result = total_mass(GibbsMeasure(binary8, Conductances.visual(binary8)))
    assert not result.infinite
    assert not result.certified
    assert result.ratio == pytest.approx(0.25)


def test_visual_potential_gives_volume_measure(binary8):
    measure = GibbsMeasure(binary8, Conductances.visual(binary8))
    assert measure.delta == pytest.approx(0.0, abs=1e-9)
    orders = measure.operator.edge_orders
    expected = (1.0 / orders) / np.sum(1.0 / orders)
    assert measure.edge_law == pytest.approx(expected, rel=1e-6)
    assert measure.frontier_share < 1e-5


def test_zero_potential_on_binary_tree_reaches_the_frontier(binary8):
    # 零势下 Perron 向量由截断决定，质量不随深度衰减
    measure = GibbsMeasure(binary8, Conductances.zero(binary8))
    assert measure.frontier_share > 1e-3


def test_visual_potential_rejects_leaves(triangle_loop):
    flat = Conductances.visual(triangle_loop)
    assert all(v == pytest.approx(0.0) for v in flat.values.values())
    with pytest.raises(ValidationError):
        Conductances.visual(rooted_tree_lattice([1, 2], 8, 3))


def test_sampler_is_deterministic(quad_measure):
    a = sample_geodesic(quad_measure, 200, seed=5)
    b = sample_geodesic(quad_measure, 200, seed=5)
    assert a.edges == b.edges
    assert a.footpoint == 100
    assert sample_geodesic(quad_measure, 200, seed=6).edges != a.edges


def test_sampler_follows_ray_transition_law(ray_measure):
    edges = sample_geodesic(ray_measure, 40000, seed=1).edges
    up = total = 0
    for a, b in zip(edges, edges[1:]):
        if a.startswith("d") and a != "d0":
            assert b == f"d{int(a[1:]) - 1}"
        if a == "d0":
            assert b == "u0"
        if a.startswith("u") and 1 <= int(a[1:]) <= 10:
            total += 1
            up += b.startswith("u")
    assert up / total == pytest.approx(0.5, abs=0.03)


def test_empirical_frequencies_match_edge_law(quad_measure):
    edges = sample_geodesic(quad_measure, 300000, seed=2).edges
    freq = edge_frequencies(edges, quad_measure.edges)
    assert 0.5 * np.abs(freq - quad_measure.edge_law).sum() < 0.02


def test_lifted_samples_are_non_backtracking(ray2_shallow):
    measure = GibbsMeasure(ray2_shallow, Conductances.zero(ray2_shallow))
    sample = sample_geodesic(measure, 40, seed=3, lift=True)
    cover = BassSerreCover(ray2_shallow)
    vertices = sample.vertices
    assert len(vertices) == 41
    for k, e in enumerate(sample.edges):
        assert cover.label(vertices[k], vertices[k + 1])[0] == e
        if k + 2 < len(vertices):
            assert vertices[k + 2] != vertices[k]


def test_tasks_and_trajectory_format(quad_measure):
    merged = sample_tasks(quad_measure, 1000, master_seed=9, tasks=4)
    assert len(merged) == 1000
    assert merged == sample_tasks(quad_measure, 1000, master_seed=9, tasks=4)

    sample = sample_geodesic(quad_measure, 5, seed=1)
    lines = trajectory_lines(sample)
    assert lines[0] == f"-2\t{sample.edges[0]}\t-"
    assert lines[2].startswith("0\t")
    assert trajectory_lines(sample, ["7", "8", "9", "1", "2"])[4].endswith("\t2")
