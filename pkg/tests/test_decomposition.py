import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from generators import (
    nx_td,
    partial_2tree,
    random_connected,
    random_family,
    random_parent,
    random_subtree_partition,
    repair_occurrences,
    seeded,
    tree_from_parent,
)
from pcentered.decomposition import (
    DecompositionError,
    HittingBags,
    NormalPair,
    OracleError,
    Packing,
    TreeDecomposition,
    bag_union_closure,
    check_helly_result,
    elimination_order,
    explicit_family_oracle,
    helly_hitting_or_packing,
    identity_witness,
    is_natural,
    lca_closure,
    make_natural,
    normal_pair_violations,
    parts_hit,
    potential,
    refinement_violations,
    tree_components,
    validate_elimination_order,
    validate_td,
)
from pcentered.graph import Graph, connected_components, grid_graph, path_graph
from pcentered.layered import grid_path_decomposition, path_td


def td(bags, edges=()):
    return TreeDecomposition(dict(enumerate(map(frozenset, bags))), tuple(edges))


# ---------------------------------------------------------------- validation


def test_validate_td_examples(c4):
    p3 = path_graph(3)
    assert validate_td(p3, td([{0, 1}, {1, 2}], [(0, 1)])) == []
    problems = validate_td(p3, td([{0, 1}, {2}], [(0, 1)]))
    assert len(problems) == 1 and "(1, 2)" in str(problems[0])
    dec = td([{0, 1, 3}, {1, 2, 3}], [(0, 1)])
    assert validate_td(c4, dec) == [] and dec.width == 2


def test_validate_td_occurrence_subtree():
    g = path_graph(3)
    dec = td([{0, 1}, {1, 2}, {0}], [(0, 1), (1, 2)])
    assert validate_td(g, dec)


def test_td_rejects_non_tree():
    with pytest.raises(DecompositionError):
        td([{0}, {1}], [])
    with pytest.raises(DecompositionError):
        td([{0}, {1}, {2}], [(0, 1), (1, 0)])


def test_elimination_order_examples():
    assert elimination_order(td([{0, 1, 2}])) == [0, 1, 2]
    assert elimination_order(td([{0, 1}, {1, 2}], [(0, 1)]), root=0) == [0, 1, 2]
    star = td([{0, 1}, {0, 2}, {0, 3}], [(0, 1), (0, 2)])
    for root in range(3):
        sigma = elimination_order(star, root)
        assert sigma[0] == 0
        assert validate_elimination_order(star, sigma) is None


def test_reversed_star_order_fails():
    star = td([{0, 1}, {0, 2}, {0, 3}], [(0, 1), (0, 2)])
    assert validate_elimination_order(star, [1, 2, 0, 3]) == 2
    assert validate_elimination_order(td([{0, 1, 2}]), [2, 1, 0]) is None


def test_validate_elimination_order_rejects_non_permutation():
    with pytest.raises(DecompositionError):
        validate_elimination_order(td([{0, 1}]), [0, 0])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 12))
def test_elimination_order_valid(seed, n):
    rng = seeded(seed)
    g, dec = partial_2tree(rng, n)
    root = rng.choice(dec.nodes)
    sigma = elimination_order(dec, root)
    assert validate_elimination_order(dec, sigma) is None
    assert oracles.elimination_ok(dec.bags, sigma)


# ---------------------------------------------------------------------- LCA


def test_lca_examples():
    path = tree_from_parent({0: None, 1: 0, 2: 1, 3: 2, 4: 3})
    assert lca_closure(path, {2, 4}) == {2, 4}
    star = tree_from_parent({0: None, 1: 0, 2: 0, 3: 0})
    assert lca_closure(star, {1, 2}) == {0, 1, 2}
    assert lca_closure(star, {3}) == {3}
    with pytest.raises(DecompositionError):
        lca_closure(star, set())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 25), st.data())
def test_lca_closure_properties(seed, n, data):
    parent = random_parent(seeded(seed), n)
    tree = tree_from_parent(parent)
    y = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    x = lca_closure(tree, y)
    assert x == oracles.lca_closure(parent, y)
    assert len(x) <= 2 * len(y) - 1
    assert lca_closure(tree, x) == x
    rest = set(tree.nodes) - x
    edges = tree.edges()
    for comp in tree_components(rest, edges):
        nbrs = {b for a, b in edges if a in comp and b not in comp} | {a for a, b in edges if b in comp and a not in comp}
        assert len(nbrs) <= 2


def test_bag_union_closure_examples():
    g = Graph.from_edges(1, [])
    z, closed = bag_union_closure(g, td([{0}]), [0])
    assert z == {0} and closed == {0}
    p5 = path_graph(5)
    dec = path_td(range(5))
    z, closed = bag_union_closure(p5, dec, [0, 3])
    assert len(closed) <= 3 and z == dec.union(closed)


def test_bag_union_closure_grid_components():
    g = grid_graph(3, 3)
    dec = grid_path_decomposition(3, 3)
    assert is_natural(g, dec)
    for a in dec.nodes:
        for b in dec.nodes:
            z, closed = bag_union_closure(g, dec, {a, b})
            assert len(closed) <= 3
            for comp in connected_components(g.remove(z)):
                nbrs = g.neighborhood(comp)
                # N(C) lies in the union of two bags ...
                assert any(nbrs <= dec.bags[x] | dec.bags[y] for x in closed for y in closed)
                # ... and meets at most two components of g - C
                touched = [k for k in connected_components(g.remove(comp)) if k & nbrs]
                assert len(touched) <= 2


# ------------------------------------------------------------------- Helly


def test_helly_examples():
    p5 = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    dec = path_td(range(5))
    through_3 = [set(range(a, b + 1)) for a in range(5) for b in range(a, 5) if a <= 2 <= b]
    res = helly_hitting_or_packing(p5, dec, explicit_family_oracle(through_3), 1)
    assert isinstance(res, HittingBags) and len(res.nodes) == 1
    assert 2 in dec.bags[res.nodes[0]]

    edges = [{0, 1}, {1, 2}, {2, 3}, {3, 4}]
    oracle = explicit_family_oracle(edges)
    res = helly_hitting_or_packing(p5, dec, oracle, 1)
    assert isinstance(res, Packing)
    a, b = res.members
    assert not a & b and a in map(frozenset, edges) and b in map(frozenset, edges)
    assert check_helly_result(p5, dec, oracle, 1, res) == []

    res = helly_hitting_or_packing(p5, dec, explicit_family_oracle([]), 0)
    assert res == HittingBags(())


def test_helly_rejects_bad_oracle():
    g = path_graph(3)
    with pytest.raises(OracleError):
        helly_hitting_or_packing(g, path_td(range(3)), lambda s: frozenset({99}), 1)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 12), st.integers(0, 3))
def test_helly_dichotomy(seed, n, d):
    rng = seeded(seed)
    g = random_connected(rng, n, 0.15)
    dec = nx_td(g)
    fam = random_family(rng, g, rng.randint(0, 6))
    oracle = explicit_family_oracle(fam)
    res = helly_hitting_or_packing(g, dec, oracle, d, root=rng.choice(dec.nodes))
    assert isinstance(res, (HittingBags, Packing))
    assert check_helly_result(g, dec, oracle, d, res) == []
    if isinstance(res, HittingBags):
        hit = dec.union(res.nodes)
        assert all(m & hit for m in fam)


# ---------------------------------------------------------- naturality


def test_is_natural_examples():
    g = path_graph(4)
    assert is_natural(g, td([set(range(4))]))
    assert is_natural(path_graph(3), td([{0, 1}, {1, 2}], [(0, 1)]))
    assert not is_natural(g, td([{0, 3}, {0, 1, 2, 3}], [(0, 1)]))


def test_make_natural_examples():
    g = path_graph(4)
    pair = NormalPair(td([{0, 1}, {1, 2}, {2, 3}], [(0, 1), (1, 2)]), (frozenset({0, 1, 2}),))
    out, w = make_natural(g, pair)
    assert out == pair and w == identity_witness(pair)

    bad = NormalPair(td([{0, 3}, {0, 1, 2, 3}], [(0, 1)]), (frozenset({0}), frozenset({1})))
    out, w = make_natural(g, bad)
    assert is_natural(g, out.td) and validate_td(g, out.td) == []
    assert refinement_violations(out, bad, w) == []
    assert potential(out.td, g.n) < potential(bad.td, g.n)


def test_make_natural_needs_connected():
    g = Graph.from_edges(2, [])
    with pytest.raises(DecompositionError):
        make_natural(g, NormalPair(td([{0, 1}]), (frozenset({0}),)))


def test_potential_order():
    assert potential(td([{0, 1, 2}]), 3) == (1, 0, 0, 0)
    assert potential(td([{0, 1}, {1, 2}], [(0, 1)]), 3) < (1, 0, 0, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 10))
def test_make_natural_properties(seed, n):
    rng = seeded(seed)
    g = random_connected(rng, n, 0.2)
    dec = nx_td(g)
    # scramble: extra vertices in bags keep the decomposition valid but unnatural
    bags = {x: b | {v for v in g.vertices if rng.random() < 0.2} for x, b in dec.bags.items()}
    bags = repair_occurrences(bags, dec.edges)
    dec = TreeDecomposition(bags, dec.edges)
    assert validate_td(g, dec) == []
    tree = dec.rooted()
    pair = NormalPair(dec, tuple(random_subtree_partition(rng, tree)))
    assert normal_pair_violations(g, pair) == []
    was = is_natural(g, dec)
    out, w = make_natural(g, pair)
    assert validate_td(g, out.td) == []
    assert oracles.is_natural(g, out.td.bags, out.td.edges)
    assert normal_pair_violations(g, out) == []
    assert refinement_violations(out, pair, w) == []
    if not was:
        assert potential(out.td, g.n) < potential(dec, g.n)


def test_refinement_detects_r1_r2():
    coarse = NormalPair(td([{0, 1}, {1, 2}], [(0, 1)]), (frozenset({0}), frozenset({1})))
    w = identity_witness(coarse)
    assert refinement_violations(coarse, coarse, w) == []
    from pcentered.decomposition import RefinementWitness

    bad_f = RefinementWitness({0: 1, 1: 1}, {0: 0, 1: 1})
    kinds = {v.kind for v in refinement_violations(coarse, coarse, bad_f)}
    assert "r1" in kinds and "r2" in kinds


# ------------------------------------------------------------ parts_hit


def test_parts_hit_examples():
    dec = path_td(range(6))  # nodes 0..4
    pair = NormalPair(dec, (frozenset({0, 1}), frozenset({2}), frozenset({3, 4})))
    assert parts_hit(pair, {1}) == {0}
    assert parts_hit(pair, {1, 2}) == {0, 1}
    assert parts_hit(pair, {0, 4}) == {0, 2}
    assert parts_hit(pair, set()) == set()
    assert parts_hit(pair, dec.nodes) == {0, 1, 2}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20), st.data())
def test_lca_stability(seed, n, data):
    rng = seeded(seed)
    parent = random_parent(rng, n)
    tree = tree_from_parent(parent)
    parts = random_subtree_partition(rng, tree)
    pair = NormalPair(TreeDecomposition({x: frozenset() for x in tree.nodes}, tuple(tree.edges())), tuple(parts))
    x = lca_closure(tree, data.draw(st.sets(st.integers(0, n - 1), min_size=1)))
    hit = parts_hit(pair, x)
    # grow y inside the parts already hit by x
    allowed = sorted(set().union(*(parts[i] for i in hit)))
    y = x | data.draw(st.sets(st.sampled_from(allowed)))
    assert parts_hit(pair, y) == hit
    assert parts_hit(pair, lca_closure(tree, y)) == hit
