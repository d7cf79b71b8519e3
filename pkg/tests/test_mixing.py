import itertools
import math

import numpy as np
import pytest

from src.coding import build_alphabet, word_mass
from src.core import ValidationError
from src.gibbs import GibbsMeasure, sample_geodesic, sample_letters
from src.mixing import (
    Observable,
    common_envelope,
    decay_rate_fit,
    dilation_audit,
    exact_correlations,
    excursion_decomposition,
    exp_tail_fit,
    jacobian_constancy_check,
    letter_chain,
    monte_carlo_correlations,
    return_time_tail,
)
from src.thermo import Conductances


@pytest.fixture(scope="module")
def ray_setup(ray2):
    return GibbsMeasure(ray2, Conductances.zero(ray2)), build_alphabet(ray2)


@pytest.fixture(scope="module")
def quad_setup(quad2):
    return GibbsMeasure(quad2, Conductances.random(quad2, seed=11)), build_alphabet(quad2)


def test_exp_tail_fit_recovers_geometric_rate():
    values = [2.0 * 0.6**n for n in range(1, 21)]
    fit = exp_tail_fit(values)
    assert fit.kappa == pytest.approx(-math.log(0.6))
    assert fit.constant == pytest.approx(2.0)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.window == (3, 20)
    assert fit.exponential


def test_exp_tail_fit_flags_constant_and_zero_tails():
    flat = exp_tail_fit([0.5] * 12)
    assert flat.kappa == pytest.approx(0.0, abs=1e-12)
    assert not flat.exponential

    zero = exp_tail_fit([0.0] * 12)
    assert zero.degenerate
    assert math.isinf(zero.kappa)

    with pytest.raises(ValidationError):
        exp_tail_fit([1.0, 0.5, 0.25, 0.0, 0.1, 0.0, 0.0])


def test_binary_tree_return_tail(binary8):
    measure = GibbsMeasure(binary8, Conductances.visual(binary8))
    tail = return_time_tail(measure, ["t0"], 20)
    values = tail.values
    assert tail.mode == "exact"
    assert values[0] > 0
    # 从根出发的第一步总是离开根
    assert values[1] == pytest.approx(values[0])
    assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))

    fit = exp_tail_fit(values, start=3, end=20)
    assert 0.4 < fit.kappa < math.log(4)
    assert fit.r_squared >= 0.95


def test_ray_return_tail_monte_carlo_agrees(ray_setup):
    measure, _ = ray_setup
    exact = return_time_tail(measure, ["v0"], 10)
    edges = sample_geodesic(measure, 200_000, seed=1).edges
    empirical = return_time_tail(measure, ["v0"], 10, edges=edges)
    assert empirical.mode == "monte_carlo"
    for a, b in zip(exact.points, empirical.points):
        assert abs(a.value - b.value) <= 4 * b.error + 2e-3


def test_return_tail_validation(ray_setup):
    measure, _ = ray_setup
    with pytest.raises(ValidationError):
        return_time_tail(measure, [], 5)
    with pytest.raises(ValidationError):
        return_time_tail(measure, ["nowhere"], 5)


def test_holder_norms():
    assert Observable(0, {(0,): 1.0, (1,): 0.0}).holder_norm() == pytest.approx(2.0)
    assert Observable(0, {(0,): 3.0, (1,): 3.0}).holder_norm() == pytest.approx(3.0)

    mild = Observable(1, {(0, 1, 2): 1.0, (0, 1, 3): 0.5, (4, 5, 6): -1.0})
    assert mild.holder_norm() == pytest.approx(3.0)
    sharp = Observable(1, {(0, 1, 2): 1.0, (3, 1, 4): -1.0})
    assert sharp.holder_norm() == pytest.approx(1.0 + 2.0 * math.e)
    half = Observable(1, {(0, 1, 2): 1.0, (3, 1, 4): -1.0}, alpha=0.5)
    assert half.holder_norm() == pytest.approx(1.0 + 2.0 * math.exp(0.5))

    with pytest.raises(ValidationError):
        Observable(1, {(0,): 1.0})
    with pytest.raises(ValidationError):
        Observable(0, {}, alpha=1.5)


def test_observable_evaluation_along_letters(quad_setup):
    measure, alphabet = quad_setup
    letters = sample_letters(measure, alphabet, 500, seed=2)
    obs = Observable.random(alphabet, 1, seed=4)
    values = obs.evaluate(letters)
    assert len(values) == 498
    for i in (0, 17, 250, 497):
        assert values[i] == obs(letters[i:i + 3])


def test_observable_from_callable(quad_setup):
    measure, alphabet = quad_setup
    same = Observable.from_callable(alphabet, 1, lambda w: float(w[0] == w[2]), name="same")
    assert same.name == "same"
    assert all(len(w) == 3 for w in same.table)
    for a, b, c in same.table:
        assert alphabet.transitions.admissible(a, b) and alphabet.transitions.admissible(b, c)

    letters = sample_letters(measure, alphabet, 300, seed=6)
    expected = [float(letters[i] == letters[i + 2]) for i in range(len(letters) - 2)]
    assert same.evaluate(letters).tolist() == expected


def test_exact_correlations_basic_properties(quad_setup):
    measure, alphabet = quad_setup
    pi, Q = letter_chain(measure, alphabet)
    assert pi.sum() == pytest.approx(1.0)
    assert np.asarray(Q.sum(axis=1)).ravel() == pytest.approx(np.ones(len(alphabet)))
    assert Q.T @ pi == pytest.approx(pi, abs=1e-10)

    const = Observable.constant(alphabet, 2.5)
    top = int(np.argmax(pi))
    ind = Observable.indicator(alphabet, top)
    assert all(abs(v) < 1e-12 for v in exact_correlations(measure, alphabet, const, ind, 10).values)

    series = exact_correlations(measure, alphabet, ind, ind, 40).values
    assert series[0] == pytest.approx(pi[top] * (1 - pi[top]))
    assert series[0] > 0
    assert max(abs(v) for v in series[30:]) < 0.1 * series[0]


def test_exact_correlations_reject_deep_observables(quad_setup):
    measure, alphabet = quad_setup
    with pytest.raises(ValidationError):
        exact_correlations(measure, alphabet, Observable.random(alphabet, 1, seed=1), Observable.constant(alphabet, 1.0), 5)


def test_decay_fits_share_an_envelope(quad_setup):
    measure, alphabet = quad_setup
    family = [Observable.random(alphabet, 0, seed=s) for s in range(5)]
    series, norms, fits = [], [], []
    for phi, psi in zip(family, family[1:] + family[:1]):
        s = exact_correlations(measure, alphabet, phi, psi, 20)
        fit = decay_rate_fit(s, phi, psi)
        assert fit.kappa > 0
        series.append(s)
        norms.append(phi.holder_norm() * psi.holder_norm())
        fits.append(fit)
    envelope = common_envelope(series, norms, fits)
    assert envelope["kappa"] > 0
    for s, norm in zip(series, norms):
        for p in s.points[1:]:
            assert abs(p.value) / norm <= envelope["constant"] * math.exp(-envelope["kappa"] * p.n) * (1 + 1e-12)


def test_monte_carlo_correlations_match_exact(quad_setup):
    measure, alphabet = quad_setup
    pi, _ = letter_chain(measure, alphabet)
    ind = Observable.indicator(alphabet, int(np.argmax(pi)))
    exact = exact_correlations(measure, alphabet, ind, ind, 3)
    letters = sample_letters(measure, alphabet, 200_000, seed=5)
    mc = monte_carlo_correlations(letters, ind, ind, 3, seed=5)
    assert mc.samples == 200_000
    for a, b in zip(exact.points, mc.points):
        assert abs(a.value - b.value) <= 4 * b.error + 1e-3


def test_iid_control_has_no_correlation_beyond_window():
    rng = np.random.default_rng(7)
    letters = rng.integers(0, 5, size=100_000)
    table = {w: float(v) for w, v in zip(itertools.product(range(5), repeat=3), rng.uniform(-1, 1, 125))}
    obs = Observable(1, table)
    series = monte_carlo_correlations(letters, obs, obs, 6)
    assert series.points[0].value > 0
    for p in series.points[3:]:
        assert abs(p.value) <= 4 * p.error + 1e-3


def test_jacobian_is_constant_for_exact_masses(quad_setup):
    measure, alphabet = quad_setup
    letters = sample_letters(measure, alphabet, 20, seed=9)
    for length in (1, 3, 6):
        check = jacobian_constancy_check(measure, alphabet, letters[:length], depth=2)
        assert check.refinements > 0
        assert check.deviation == pytest.approx(1.0, abs=1e-6)
    assert jacobian_constancy_check(measure, alphabet, letters[:1]).low == pytest.approx(1.0)


def test_jacobian_check_detects_perturbed_masses(quad_setup):
    measure, alphabet = quad_setup
    letters = sample_letters(measure, alphabet, 10, seed=9)

    def noisy(w):
        bump = 0.2 * (sum(w) % 5) if len(w) == 3 else 0.0
        return word_mass(measure, alphabet, w) * (1.0 + bump)

    check = jacobian_constancy_check(measure, alphabet, letters[:4], depth=2, mass=noisy)
    assert check.deviation > 1.01


def test_ray_spike_excursions(ray_setup):
    measure, alphabet = ray_setup
    result = excursion_decomposition(measure, alphabet, ["v0"], length_cap=12)
    assert len(result.letters) == 2
    assert result.partition_defect() < 1e-12
    heights = result.by_height()
    for m in range(1, 5):
        count, mass = heights[m]
        assert count == 4
        assert all(ex.length == 2 * m for ex in result.excursions if ex.height == m)
    assert heights[1][1] > heights[2][1] > heights[3][1]


def test_dilation_factor_is_exponential_in_length(ray_setup):
    measure, alphabet = ray_setup
    result = excursion_decomposition(measure, alphabet, ["v0"], length_cap=8)
    rows = dilation_audit(alphabet, result.excursions)
    assert rows
    for row in rows:
        assert row["factor"] == pytest.approx(row["expected"])
