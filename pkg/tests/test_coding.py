import itertools
import math

import numpy as np
import pytest

from src.core import DegenerateLatticeError, ValidationError, cfg
from src.cover import BassSerreCover
from src.gibbs import GibbsMeasure, sample_geodesic, sample_letters
from src.lattice import GraphBuilder, edge_transitions
from src.coding import (
    SymbolSequence,
    build_alphabet,
    conjugacy_mismatches,
    decode,
    encode,
    encode_path,
    f_symb,
    gurevich_pressure,
    markov_test,
    shift_distance,
    symbolic_gibbs_check,
    trajectory_distance,
    transitivity_witness,
    word_edges,
    word_mass,
    words,
)
from src.coding import codec
from src.thermo import Conductances


@pytest.fixture(scope="module")
def ray_alphabet(ray2):
    return build_alphabet(ray2)


@pytest.fixture(scope="module")
def shallow_setup(ray2_shallow):
    measure = GibbsMeasure(ray2_shallow, Conductances.zero(ray2_shallow))
    return BassSerreCover(ray2_shallow), build_alphabet(ray2_shallow), measure


def brute_force_letters(gog):
    """逐元素枚举双陪集类，只统计阶不超过枚举上限的顶点"""
    graph = gog.graph
    counts = {}
    for v in gog.vertices:
        G = gog.vertex_groups[v]
        if G.order > cfg.enumeration_cap:
            continue
        counts[v] = 0
        for e_minus in graph.in_edges(v):
            H = gog.monos[graph.bar(e_minus)].image
            for e_plus in graph.out_edges(v):
                HK = H.join(gog.monos[e_plus].image).elements()
                seen = set()
                for g in G.elements():
                    if g in seen:
                        continue
                    cls = {G.add(g, x) for x in HK}
                    seen |= cls
                    if e_plus == graph.bar(e_minus) and G.identity in cls:
                        continue
                    counts[v] += 1
    return counts


def test_single_loop_has_two_letters(single_loop):
    alphabet = build_alphabet(single_loop)
    assert len(alphabet) == 2
    assert {(a.e_minus, a.e_plus) for a in alphabet.letters} == {("e", "e"), ("E", "E")}


def test_ray_letter_count(ray2_shallow):
    depth = ray2_shallow.depth
    alphabet = build_alphabet(ray2_shallow)
    assert len(alphabet) == 2 + 3 * (depth - 1) + 1
    oracle = brute_force_letters(ray2_shallow)
    assert len(oracle) == len(ray2_shallow.vertices)
    assert sum(oracle.values()) == len(alphabet)
    counts = alphabet.counts_per_vertex()
    assert counts["v0"] == 2
    assert counts["v5"] == 3
    assert counts[f"v{depth}"] == 1


def test_quadratic_growth_letter_count(quad2):
    counts = build_alphabet(quad2).counts_per_vertex()
    oracle = brute_force_letters(quad2)
    assert len(oracle) >= 5
    assert all(counts[v] == n for v, n in oracle.items())


def test_class_sizes_count_cover_continuations(quad2):
    alphabet = build_alphabet(quad2)
    edges, position, N = edge_transitions(quad2)
    for (e_minus, e_plus), ids in alphabet.by_transition().items():
        total = sum(alphabet.letters[a].class_size for a in ids)
        assert total == N[position[e_minus], position[e_plus]]


def test_class_count_matches_group_orders(quad2):
    alphabet = build_alphabet(quad2)
    for (e_minus, e_plus), dc in alphabet.decompositions.items():
        v = quad2.graph.t(e_minus)
        assert dc.count == quad2.vertex_order(v) // dc.joined.order


def test_letter_ids_are_lexicographic(ray_alphabet):
    keys = [(a.e_minus, a.h, a.e_plus) for a in ray_alphabet.letters]
    assert keys == sorted(keys)
    exported = ray_alphabet.to_dict()
    assert exported["letters"][0]["id"] == 0
    assert set(exported["letters"][0]) >= {"id", "e_minus", "h_rep", "e_plus"}


def test_transition_matrix_rule_and_finiteness(ray_alphabet):
    A = ray_alphabet.transitions
    for a, b in A.edge_list():
        assert ray_alphabet.letters[a].e_plus == ray_alphabet.letters[b].e_minus
    assert np.all(A.row_counts() >= 1)
    assert np.all(A.row_counts() <= len(ray_alphabet))
    assert np.all(A.column_counts() >= 1)


def test_ray_transition_graph_is_transitive(ray_alphabet):
    witness = transitivity_witness(ray_alphabet)
    assert witness["components"] == 1
    assert witness["failures"] == 0


def test_omitted_vertices_under_cap(ray2, monkeypatch):
    from src.core import cfg

    monkeypatch.setattr(cfg, "enumeration_cap", 2)
    alphabet = build_alphabet(ray2)
    assert "v0" in alphabet.omitted
    assert "v3" not in alphabet.omitted


def test_encode_decode_roundtrip(shallow_setup):
    cover, alphabet, measure = shallow_setup
    for seed in range(15):
        sample = sample_geodesic(measure, 30, seed=seed, lift=True)
        seq = encode(cover, alphabet, sample)
        assert seq.complete
        assert len(seq) == 29
        assert seq.origin == sample.footpoint - 1

        edges, vertices = decode(cover, alphabet, seq)
        assert edges == sample.edges
        assert vertices[:2] == sample.vertices[:2]
        assert cover.distance(vertices[0], vertices[-1]) == 30
        assert encode_path(cover, alphabet, vertices, sample.footpoint).letters == seq.letters


def test_encoding_conjugates_flow_to_shift(shallow_setup):
    cover, alphabet, measure = shallow_setup
    for seed in range(10):
        sample = sample_geodesic(measure, 31, seed=100 + seed, lift=True)
        assert conjugacy_mismatches(cover, alphabet, sample.vertices, sample.footpoint) == 0
    with pytest.raises(ValidationError):
        conjugacy_mismatches(cover, alphabet, sample.vertices, len(sample.vertices) - 3)


def test_conjugacy_check_catches_position_dependent_letters(shallow_setup, monkeypatch):
    cover, alphabet, measure = shallow_setup
    sample = sample_geodesic(measure, 31, seed=21, lift=True)
    calls = itertools.count()
    honest = codec.letter_at

    def drifting(*args):
        return (honest(*args) + next(calls)) % len(alphabet)

    monkeypatch.setattr(codec, "letter_at", drifting)
    assert conjugacy_mismatches(cover, alphabet, sample.vertices, sample.footpoint) > 0


def test_encoding_is_invariant_under_deck_transformations(shallow_setup):
    cover, alphabet, measure = shallow_setup
    sample = sample_geodesic(measure, 16, seed=4, lift=True)
    anchor = sample.vertices[0]
    group = cover.gog.vertex_groups[anchor.projection]
    letters = encode(cover, alphabet, sample).letters
    for g in list(group.elements())[1:3]:
        moved = [cover.translate(anchor, g, y) for y in sample.vertices]
        assert encode_path(cover, alphabet, moved, sample.footpoint).letters == letters


def test_encode_requires_lift(shallow_setup):
    cover, alphabet, measure = shallow_setup
    with pytest.raises(ValidationError):
        encode(cover, alphabet, sample_geodesic(measure, 10, seed=1))


def test_shift_distance_examples():
    x = SymbolSequence([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11], origin=5)
    assert shift_distance(x, x) == 0.0

    y = SymbolSequence([1, 2, 3, 4, 5, 0, 7, 8, 9, 10, 11], origin=5)
    assert shift_distance(x, y) == 1.0

    z = SymbolSequence([0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11], origin=5)
    assert shift_distance(x, z) == pytest.approx(math.exp(-4))

    w = SymbolSequence([1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 11], origin=5)
    assert shift_distance(x, w) == pytest.approx(math.exp(-3))


def test_shift_and_trajectory_distances_are_comparable(shallow_setup):
    cover, alphabet, measure = shallow_setup
    groups = alphabet.by_transition()
    checked = 0
    for seed in range(40):
        sample = sample_geodesic(measure, 30, seed=seed, lift=True)
        seq = encode(cover, alphabet, sample)
        _, original = decode(cover, alphabet, seq)
        for k in range(seq.origin, seq.origin + 10):
            letter = alphabet.letters[seq.letters[k]]
            options = [b for b in groups[(letter.e_minus, letter.e_plus)] if b != seq.letters[k]]
            if not options:
                continue
            spliced = SymbolSequence(seq.letters[:k] + [options[0]] + seq.letters[k + 1:], seq.origin, seq.anchor)
            _, other = decode(cover, alphabet, spliced)
            ratio = shift_distance(seq, spliced) / trajectory_distance(original, other, seq.origin + 1)
            assert math.exp(-2) <= ratio <= math.exp(2)
            checked += 1
    assert checked > 0


def test_f_symb_reads_the_followed_edge(shallow_setup, ray2_shallow):
    cover, alphabet, measure = shallow_setup
    assert all(f_symb(alphabet, Conductances.zero(ray2_shallow), a) == 0 for a in range(len(alphabet)))
    kappa = Conductances.constant(ray2_shallow, 0.7)
    assert all(f_symb(alphabet, kappa, a) == 0.7 for a in range(len(alphabet)))

    c = Conductances.random(ray2_shallow, seed=3)
    sample = sample_geodesic(measure, 20, seed=8, lift=True)
    seq = encode(cover, alphabet, sample)
    total = math.fsum(f_symb(alphabet, c, a) for a in seq.letters)
    assert total == pytest.approx(c.along(sample.edges[1:]))


def test_word_masses_form_probability(quad2):
    measure = GibbsMeasure(quad2, Conductances.random(quad2, seed=11))
    alphabet = build_alphabet(quad2)
    for length in (1, 2):
        total = math.fsum(word_mass(measure, alphabet, w) for w in words(alphabet, length) if len(w) == length)
        assert total == pytest.approx(1.0, rel=1e-9)


def test_word_mass_matches_cylinder_mass_for_trivial_groups(theta):
    measure = GibbsMeasure(theta, Conductances.random(theta, seed=2))
    alphabet = build_alphabet(theta)
    assert len(alphabet) == 12
    for w in words(alphabet, 3):
        assert word_mass(measure, alphabet, w) == pytest.approx(measure.quotient_mass(word_edges(alphabet, w)))


def test_symbolic_gibbs_constant_in_homogeneous_case(theta):
    measure = GibbsMeasure(theta, Conductances.zero(theta))
    alphabet = build_alphabet(theta)
    check = symbolic_gibbs_check(measure, alphabet, range(len(alphabet)), max_length=5)
    assert check.spread == pytest.approx(1.0)
    assert math.isfinite(check.constant)
    assert measure.delta == pytest.approx(math.log(2))


def test_symbolic_gibbs_rejects_empty_set(theta):
    measure = GibbsMeasure(theta, Conductances.zero(theta))
    with pytest.raises(ValidationError):
        symbolic_gibbs_check(measure, build_alphabet(theta), [])


def test_gurevich_pressure_single_loop(single_loop):
    alphabet = build_alphabet(single_loop)
    assert gurevich_pressure(alphabet, Conductances.zero(single_loop), 0).pressure == pytest.approx(0.0, abs=1e-12)
    shifted = gurevich_pressure(alphabet, Conductances.constant(single_loop, 0.3), 0)
    assert shifted.pressure == pytest.approx(0.3)


def test_gurevich_pressure_modular_ray(ray2, ray_alphabet):
    estimate = gurevich_pressure(ray_alphabet, Conductances.zero(ray2), 0, n_max=20)
    assert estimate.pressure == pytest.approx(math.log(2), abs=0.1)
    assert estimate.unweighted < estimate.pressure

    shifted = gurevich_pressure(ray_alphabet, Conductances.constant(ray2, 0.25), 0, n_max=20)
    assert shifted.pressure == pytest.approx(estimate.pressure + 0.25, abs=1e-9)


def test_wandering_letter():
    builder = GraphBuilder(name="segment")
    builder.add_vertex("a").add_vertex("b").add_vertex("c")
    builder.add_edge_pair("ab", "ba", "a", "b")
    builder.add_edge_pair("bc", "cb", "b", "c")
    alphabet = build_alphabet(builder.build("a"))
    with pytest.raises(DegenerateLatticeError):
        gurevich_pressure(alphabet, Conductances.zero(alphabet.gog), 0, n_max=10)


def test_markov_controls():
    rng = np.random.default_rng(0)
    iid = rng.integers(0, 4, size=200_000).tolist()
    assert not markov_test(iid).violation

    P = np.array([[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.3, 0.3, 0.4]])
    draws = rng.random(200_000)
    chain = [0]
    for u in draws:
        chain.append(int(np.searchsorted(np.cumsum(P[chain[-1]]), u, side="right")))
    assert not markov_test(chain).violation

    second = [0, 1]
    for u in draws:
        nxt = (second[-1] + second[-2]) % 3 if u < 0.7 else int(u * 30) % 3
        second.append(nxt)
    result = markov_test(second)
    assert result.violation
    assert result.p_value < 1e-6


def test_markov_test_skips_thin_contexts():
    result = markov_test([0, 1, 2, 0, 1, 2, 0, 1])
    assert result.dof == 0
    assert result.p_value == 1.0
    assert result.skipped
    with pytest.raises(ValidationError):
        markov_test([0, 1, 2], order=2)


def test_sampled_letters_are_admissible(quad2):
    measure = GibbsMeasure(quad2, Conductances.zero(quad2))
    alphabet = build_alphabet(quad2)
    letters = sample_letters(measure, alphabet, 5000, seed=3)
    A = alphabet.transitions
    assert all(A.admissible(a, b) for a, b in zip(letters, letters[1:]))
    result = markov_test(letters, min_count=50)
    assert 0.0 <= result.p_value <= 1.0
