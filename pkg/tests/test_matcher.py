"""Visibility graphs and the decomposition-driven matcher."""

import random

import pytest

from permpat import (
    ValidationError,
    VisibilityGraph,
    brute_force_match,
    build_decomposition,
    canonical_grid,
    connected_sets,
    find_pattern,
    match_auto,
    parse_merge_sequence,
    parse_permutation,
    random_permutation,
    random_separable,
    restrict,
    verify_embedding,
    visibility_update,
    width_of_decomposition,
)


def test_initial_graph_is_edgeless():
    g = VisibilityGraph(parse_permutation("3 1 4 2"))
    assert len(g) == 4
    for v in range(1, 5):
        assert g.neighbors(v) == []


def test_merge_of_a_pair_leaves_one_isolated_vertex():
    g = VisibilityGraph(parse_permutation("1 2"))
    visibility_update(g, (1, 2, 3))
    assert len(g) == 1 and 3 in g and g.neighbors(3) == []


def test_viewing_is_interval_overlap():
    g = VisibilityGraph(parse_permutation("2 1 4 3"))
    visibility_update(g, (1, 2, 5))  # box spans x 1..2, y 1..2
    visibility_update(g, (3, 4, 6))  # box spans x 3..4, y 3..4
    # disjoint on both axes: no view either way
    assert g.neighbors(5) == [] and g.neighbors(6) == []
    g2 = VisibilityGraph(parse_permutation("2 1 3"))
    visibility_update(g2, (1, 3, 4))  # spans y 2..3, x 1..3 swallowing x of 2
    assert g2.neighbors(4) == [2] and g2.neighbors(2) == [4]


def test_neighbors_of_dead_rectangle_error():
    g = VisibilityGraph(parse_permutation("1 2"))
    visibility_update(g, (1, 2, 3))
    with pytest.raises(ValidationError):
        g.neighbors(1)


def test_connected_sets_on_a_path():
    # path 1 - 5 - 4: all connected sets through the center, smallest first
    g = VisibilityGraph(parse_permutation("2 1 4 3"))
    visibility_update(g, (2, 3, 5))
    assert g.neighbors(5) == [1, 4] and g.neighbors(1) == [5]
    assert connected_sets(g, 5, 2) == [(5,), (1, 5), (4, 5)]
    assert connected_sets(g, 5, 3) == [(5,), (1, 5), (4, 5), (1, 4, 5)]


def test_connected_sets_enumerates_each_set_once():
    perm = random_separable(40, 2)
    res = build_decomposition(perm, 2)
    g = VisibilityGraph(perm)
    seen_total = 0
    for step in res.seq:
        visibility_update(g, tuple(step))
        sets = connected_sets(g, step.k, 3)
        assert len(sets) == len(set(sets))
        assert all(step.k in s for s in sets)
        assert sets == sorted(sets, key=lambda t: (len(t), t))
        seen_total += len(sets)
    assert seen_total > 0


def test_live_degrees_stay_bounded_during_replay():
    perm = random_separable(800, 4)
    res = build_decomposition(perm, 2)
    w = width_of_decomposition(perm, res.seq)
    g = VisibilityGraph(perm)
    for step in res.seq:
        visibility_update(g, tuple(step))
        assert g.degree(step.k) <= 2 * (w - 1)


def test_find_pattern_worked_example():
    sigma = parse_permutation("1 3 2")
    pi = parse_permutation("3 2 1 5 6 7 4")
    seq = build_decomposition(pi, 2).seq
    emb = find_pattern(sigma, pi, seq)
    assert emb == {1: 3, 2: 6, 3: 7}
    assert find_pattern(parse_permutation("4 3 2 1"), pi, seq) is None


def test_find_pattern_requires_canonical_target_and_complete_sequence():
    pi = parse_permutation("2 1 3")
    seq = build_decomposition(pi, 2).seq
    with pytest.raises(ValidationError):
        find_pattern(parse_permutation("1"), restrict(pi, {1, 3}), seq)
    with pytest.raises(ValidationError):
        find_pattern(parse_permutation("1"), pi, parse_merge_sequence("1 2 4"))


def test_find_pattern_edge_sizes():
    pi = parse_permutation("2 1 3")
    seq = build_decomposition(pi, 2).seq
    emb = find_pattern(parse_permutation("1"), pi, seq)
    assert emb is not None and verify_embedding(parse_permutation("1"), pi, emb)
    assert find_pattern(parse_permutation("1 2 3 4"), pi, seq) is None
    one = parse_permutation("1")
    assert find_pattern(one, one, parse_merge_sequence("")) == {1: 1}


def test_component_split_instance_exercises_multiway_recombination():
    sigma = parse_permutation("3 1 2 4")
    pi = parse_permutation("7 8 1 10 3 4 6 2 9 5")
    seq = build_decomposition(pi, 2).seq
    stats = {}
    emb = find_pattern(sigma, pi, seq, stats=stats)
    assert (emb is None) == (brute_force_match(sigma, pi) is None)
    assert stats["max_components"] >= 3
    assert stats["entries"] > 0


def test_match_auto_agrees_with_brute_force_on_random_instances():
    rng = random.Random(41)
    for _ in range(80):
        n = rng.randint(1, 10)
        ell = rng.randint(1, 4)
        pi = random_permutation(n, rng.randrange(1 << 30))
        sigma = random_permutation(ell, rng.randrange(1 << 30))
        got = match_auto(sigma, pi)
        want = brute_force_match(sigma, pi)
        assert (got is None) == (want is None)
        if got is not None:
            assert verify_embedding(sigma, pi, got)


def test_match_auto_accepts_non_canonical_targets():
    pi = parse_permutation("3 2 1 5 6 7 4")
    sub = restrict(pi, {2, 4, 6, 7})
    emb = match_auto(parse_permutation("1 2"), sub)
    assert emb is not None and verify_embedding(parse_permutation("1 2"), sub, emb)


def test_match_auto_through_the_grid_branch():
    # the canonical 500x500 grid stalls the merge loop immediately, so the
    # answer comes back through the extracted grid witness
    pi = canonical_grid(500, 500)
    sigma = parse_permutation("2 1")
    emb = match_auto(sigma, pi)
    assert emb is not None and verify_embedding(sigma, pi, emb)


def test_match_auto_pattern_longer_than_target():
    assert match_auto(parse_permutation("2 1 3"), parse_permutation("2 1")) is None
    with pytest.raises(OverflowError):
        match_auto(random_permutation(11, 0), random_permutation(12, 1))
