import math

import pytest

from src.core import TruncationError, ValidationError
from src.cover import BassSerreCover, Cone
from src.lattice import modular_ray
from src.thermo import (
    Conductances,
    PattersonDensity,
    amplitude,
    cocycle_check,
    critical_exponent,
    exponent_bounds_hold,
    gibbs_cocycle,
    patterson_shadow_measure,
    poincare_partial,
    shadow_lemma_check,
    transfer_exponent,
)


@pytest.fixture(scope="module")
def ray_cover(ray2_shallow):
    return BassSerreCover(ray2_shallow)


@pytest.fixture(scope="module")
def quad_cover(quad2):
    return BassSerreCover(quad2)


@pytest.fixture(scope="module")
def quad_random(quad2):
    return Conductances.random(quad2, seed=7)


def _up_down(gog, up=0.3, down=-0.2):
    return Conductances.from_mapping(gog, {e: up if e.startswith("u") else down for e in gog.edges})


def _cone_at(cover, v):
    return Cone(apex=cover.parent(v), target=v, edge=v.last_edge)


def test_conductances_validation(ray2):
    with pytest.raises(ValidationError):
        Conductances.from_mapping(ray2, {"u0": 1.0})
    with pytest.raises(ValidationError):
        Conductances.from_mapping(ray2, {"nope": 1.0}, default=0.0)
    with pytest.raises(ValidationError):
        Conductances.constant(ray2, math.inf)
    assert Conductances.constant(ray2, 0.5).bounds == (0.5, 0.5)


def test_random_conductances_are_seeded(quad2):
    a = Conductances.random(quad2, seed=3)
    b = Conductances.random(quad2, seed=3)
    assert a == b
    low, high = a.bounds
    assert -0.5 <= low <= high < 0.5


def test_reversal_swaps_opposite_edges(ray2):
    c = _up_down(ray2)
    reversed_c = c.reversed()
    assert reversed_c["u3"] == pytest.approx(-0.2)
    assert reversed_c["d3"] == pytest.approx(0.3)
    assert reversed_c.reversed() == c


def test_amplitude_examples(ray_cover, ray2_shallow):
    vertices = ray_cover.ball(5).vertices
    x, y = vertices[0], vertices[-1]
    assert amplitude(ray_cover, x, x, _up_down(ray2_shallow)) == 0.0
    assert amplitude(ray_cover, x, y, Conductances.zero(ray2_shallow)) == 0.0
    assert ray_cover.distance(x, y) == 5
    assert amplitude(ray_cover, x, y, Conductances.constant(ray2_shallow, 1.0)) == pytest.approx(5.0)


def test_cocycle_check(quad2, quad_random):
    assert cocycle_check(quad2, quad_random, quad_random, {})

    f = {v: 0.1 * i for i, v in enumerate(quad2.vertices)}
    assert cocycle_check(quad2, quad_random, quad_random.cohomologous(f), f)

    bumped = dict(quad_random.values)
    bumped["xa"] += 1.0
    assert not cocycle_check(quad2, quad_random, Conductances.from_mapping(quad2, bumped), {})


def test_poincare_series_on_modular_ray(ray2):
    c = Conductances.zero(ray2)
    critical = poincare_partial(ray2, c, math.log(2), 14)
    window = [a for n, a in enumerate(critical.increments) if 6 <= n <= 14 and a > 0]
    assert max(window) / min(window) <= 4
    assert critical.diagnostic == "critical"
    assert critical.partials == sorted(critical.partials)

    assert poincare_partial(ray2, c, 0.5, 14).diagnostic == "divergent"

    fast = poincare_partial(ray2, c, 3.0, 14)
    assert fast.diagnostic == "convergent"
    assert fast.increments[-1] < 1e-6


@pytest.mark.parametrize("q", [2, 3, 5])
def test_critical_exponent_of_regular_covers(q):
    gog = modular_ray(q, 10)
    summary = critical_exponent(gog, Conductances.zero(gog), 14)
    assert summary.delta_estimate == pytest.approx(math.log(q), abs=0.05)
    assert summary.window == [8, 10, 12, 14]
    assert summary.exact == pytest.approx(math.log(q), abs=0.05)


def test_critical_exponent_shifts_with_constant_conductance(ray2):
    base = critical_exponent(ray2, Conductances.zero(ray2), 14).delta_estimate
    shifted = critical_exponent(ray2, Conductances.constant(ray2, 0.4), 14).delta_estimate
    assert shifted == pytest.approx(base + 0.4, abs=1e-9)


def test_critical_exponent_with_up_down_conductances(ray2):
    c = _up_down(ray2)
    summary = critical_exponent(ray2, c, 14)
    assert summary.delta_estimate == pytest.approx(math.log(2) + 0.05, abs=1e-9)
    assert exponent_bounds_hold(math.log(2), c, summary.delta_estimate)


def test_reversal_and_cohomology_preserve_exponent(quad2, quad_random):
    delta = critical_exponent(quad2, quad_random, 12).delta_estimate
    assert critical_exponent(quad2, quad_random.reversed(), 12).delta_estimate == pytest.approx(delta, abs=1e-9)

    f = {v: math.sin(i) for i, v in enumerate(quad2.vertices)}
    assert critical_exponent(quad2, quad_random.cohomologous(f), 12).delta_estimate == pytest.approx(delta, abs=0.1)

    delta_zero = critical_exponent(quad2, Conductances.zero(quad2), 12).delta_estimate
    assert exponent_bounds_hold(delta_zero, quad_random, delta)


def test_transfer_exponent_bounds(quad2, quad_random):
    delta_zero = transfer_exponent(quad2, Conductances.zero(quad2))
    assert delta_zero == pytest.approx(math.log(3), abs=0.05)
    assert exponent_bounds_hold(delta_zero, quad_random, transfer_exponent(quad2, quad_random), tol=1e-9)


def test_critical_exponent_needs_radius(ray2):
    with pytest.raises(ValidationError):
        critical_exponent(ray2, Conductances.zero(ray2), 4)


def test_patterson_full_boundary(ray_cover, ray2_shallow):
    mass = patterson_shadow_measure(ray_cover, ray_cover.base, Cone.full_boundary(), Conductances.zero(ray2_shallow), 10)
    assert mass.value == 1.0


def test_patterson_uniform_cone_mass(ray2):
    cover = BassSerreCover(ray2)
    c = Conductances.zero(ray2)
    cone = _cone_at(cover, cover.canonical_lift("v3"))

    exact = patterson_shadow_measure(cover, cover.base, cone, c, 12)
    assert exact.mode == "exact"
    assert exact.value == pytest.approx(1 / 12)

    truncated = patterson_shadow_measure(cover, cover.base, cone, c, 12, exact_shortcut=False)
    assert truncated.mode == "truncated"
    assert truncated.value == pytest.approx(1 / 12, rel=0.1)

    density = PattersonDensity(ray2, c)
    assert density.cone_mass(cover, cone) == pytest.approx(1 / 12, rel=1e-2)


def test_orbit_estimator_matches_perron_cone_masses(ray2):
    # 顶点群阶 3, 2, 4, 8, … 互不相同，导通系数不对称
    cover = BassSerreCover(ray2)
    c = _up_down(ray2)
    density = PattersonDensity(ray2, c)
    for v in ("v1", "v2", "v3"):
        cone = _cone_at(cover, cover.canonical_lift(v))
        estimate = patterson_shadow_measure(cover, cover.base, cone, c, 14, exact_shortcut=False)
        assert estimate.mode == "truncated"
        assert estimate.value == pytest.approx(density.cone_mass(cover, cone), rel=0.1)


def test_patterson_sibling_cones_are_equal(ray_cover, ray2_shallow):
    c = Conductances.zero(ray2_shallow)
    siblings = [w for _, w in ray_cover.children(ray_cover.base)]
    masses = [
        patterson_shadow_measure(ray_cover, ray_cover.base, _cone_at(ray_cover, w), c, 10, exact_shortcut=False).value
        for w in siblings
    ]
    assert masses == pytest.approx([masses[0]] * 3)
    assert sum(masses) == pytest.approx(1.0)


def test_patterson_refuses_deep_cones(ray2):
    cover = BassSerreCover(ray2)
    cone = _cone_at(cover, cover.canonical_lift("v9"))
    with pytest.raises(TruncationError):
        patterson_shadow_measure(cover, cover.base, cone, Conductances.zero(ray2), 12)


def test_patterson_estimates_are_additive(quad_cover, quad_random):
    parent = quad_cover.ball(2).vertices[5]
    total = patterson_shadow_measure(quad_cover, quad_cover.base, _cone_at(quad_cover, parent), quad_random, 10)
    children = [
        patterson_shadow_measure(quad_cover, quad_cover.base, _cone_at(quad_cover, w), quad_random, 10)
        for _, w in quad_cover.children(parent)
    ]
    budget = total.error + sum(m.error for m in children) + 1e-9
    assert abs(total.value - sum(m.value for m in children)) <= budget


def test_patterson_complement_cone(quad_cover, quad_random):
    child = quad_cover.ball(1).vertices[2]
    forward = patterson_shadow_measure(quad_cover, quad_cover.base, _cone_at(quad_cover, child), quad_random, 10)
    backward = patterson_shadow_measure(
        quad_cover, quad_cover.base, Cone(child, quad_cover.base), quad_random, 10
    )
    assert forward.value + backward.value == pytest.approx(1.0)


def test_exact_density_is_a_probability(quad_cover, quad2, quad_random):
    density = PattersonDensity(quad2, quad_random)
    first = [w for _, w in quad_cover.children(quad_cover.base)]
    assert sum(density.cone_mass(quad_cover, _cone_at(quad_cover, w)) for w in first) == pytest.approx(1.0)

    parent = quad_cover.ball(3).vertices[9]
    children = [_cone_at(quad_cover, w) for _, w in quad_cover.children(parent)]
    assert sum(density.cone_mass(quad_cover, cone) for cone in children) == pytest.approx(
        density.cone_mass(quad_cover, _cone_at(quad_cover, parent))
    )


def test_conformal_transport_in_homogeneous_case(ray_cover, ray2_shallow):
    density = PattersonDensity(ray2_shallow, Conductances.zero(ray2_shallow))
    x = ray_cover.canonical_lift("v1")
    vertices = ray_cover.ball(4).vertices
    target = next(v for v in vertices if v.depth == 4 and v.address[:1] != x.address)
    cone = _cone_at(ray_cover, target)
    m = ray_cover.distance(x, target)
    assert density.mass_from(ray_cover, x, cone) == pytest.approx(1 / (3 * 2 ** (m - 1)), rel=1e-2)
    with pytest.raises(ValidationError):
        density.mass_from(ray_cover, x, Cone(x, ray_cover.base))


def test_gibbs_cocycle_examples(ray_cover, ray2_shallow, quad_cover, quad_random):
    c = Conductances.zero(ray2_shallow)
    xi = [v for v in ray_cover.ball(8).vertices if v.depth == 8][0].address
    base = ray_cover.base
    assert gibbs_cocycle(ray_cover, xi, base, base, c, math.log(2)) == 0.0

    toward = ray_cover.vertex_at(xi[:1])
    assert gibbs_cocycle(ray_cover, xi, base, toward, c, math.log(2)) == pytest.approx(math.log(2))

    with pytest.raises(TruncationError):
        gibbs_cocycle(ray_cover, xi[:1], base, toward, c, math.log(2))


def test_gibbs_cocycle_is_additive_and_stable(quad_cover, quad_random):
    xi = [v for v in quad_cover.ball(7).vertices if v.depth == 7][13].address
    delta = 1.1
    points = quad_cover.ball(3).vertices[::5]
    for x, y, z in zip(points, points[1:], points[2:]):
        xy = gibbs_cocycle(quad_cover, xi, x, y, quad_random, delta)
        yz = gibbs_cocycle(quad_cover, xi, y, z, quad_random, delta)
        xz = gibbs_cocycle(quad_cover, xi, x, z, quad_random, delta)
        assert xz == pytest.approx(xy + yz, abs=1e-12)
        assert gibbs_cocycle(quad_cover, xi[:4], x, y, quad_random, delta) == pytest.approx(xy, abs=1e-12)


def test_shadow_lemma_homogeneous_ratio_is_constant(ray2):
    c = Conductances.zero(ray2)
    report = shadow_lemma_check(ray2, c, 12, r=2)
    for row in report.ratios:
        assert row["min"] == pytest.approx(8 / 3, rel=1e-2)
        assert row["max"] == pytest.approx(8 / 3, rel=1e-2)
    assert report.kappa == pytest.approx(8 / 3, rel=1e-2)
    assert shadow_lemma_check(ray2, c, 10, r=2).kappa == pytest.approx(report.kappa, rel=1e-2)


def test_shadow_lemma_on_quadratic_growth(quad2, quad_random):
    report = shadow_lemma_check(quad2, quad_random, 10)
    assert math.isfinite(report.kappa)
    assert report.kappa >= 1.0
    report_r0 = shadow_lemma_check(quad2, quad_random, 10, r=0)
    assert report_r0.r == 0
