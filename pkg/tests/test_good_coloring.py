import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import partial_2tree, random_family, random_lrs_instance, seeded
from pcentered import bounds
from pcentered.decomposition import NormalPair, Packing, explicit_family_oracle
from pcentered.good_coloring import (
    GoodnessWitness,
    check_goodness_witness,
    good_witness,
    pc3_violations,
    phi_from_lrs,
    projection,
)
from pcentered.graph import Graph, connected_components, enumerate_connected_sets, path_graph
from pcentered.layered import (
    LayeredRSDecomposition,
    bfs_layering,
    grid_instance,
    lrs_from_layered_td,
    path_td,
)


def everything(g):
    return explicit_family_oracle([g.vertex_set])


def check(g, lrs, p, oracle, d, wit):
    phi = phi_from_lrs(g, lrs, p)
    return check_goodness_witness(g, wit.Z, wit.psi, phi, p, oracle, d, lrs.c)


def sp_instance(rng, n):
    """Partial 2-tree with its width-2 decomposition and a BFS layering."""
    g, dec = partial_2tree(rng, n)
    return g, lrs_from_layered_td(g, dec, bfs_layering(g), c=3)


# ----------------------------------------------------------------------- phi


def test_phi_grid_rows():
    g, lrs = grid_instance(3, 3)
    phi = phi_from_lrs(g, lrs, 2)
    assert phi == {v: (v // 3) % 3 for v in g.vertices}


def test_phi_column_path():
    g, lrs = grid_instance(7, 1)
    assert [phi_from_lrs(g, lrs, 1)[v] for v in range(7)] == [0, 1, 0, 1, 0, 1, 0]


def test_phi_apex_zero():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (0, 3), (1, 3), (2, 3)])
    lrs = LayeredRSDecomposition(
        2, {0: g.vertex_set}, (), {0: frozenset({3})}, {0: path_td([0, 1, 2])},
        {0: bfs_layering(g.induced({0, 1, 2}), [1])},
    )
    phi = phi_from_lrs(g, lrs, 3)
    assert phi[3] == 0 and phi[1] == 0 and phi[0] == phi[2] == 1


def test_phi_uses_topmost_node():
    # vertex 2 is in both bags; its color comes from the root node's layering
    g = path_graph(4)
    lrs = LayeredRSDecomposition(
        1,
        {0: frozenset({0, 1, 2}), 1: frozenset({2, 3})},
        ((0, 1),),
        {},
        {0: path_td([0, 1, 2]), 1: path_td([2, 3])},
        {0: bfs_layering(path_graph(3), [0]), 1: bfs_layering(g.induced({2, 3}), [3])},
    )
    phi = phi_from_lrs(g, lrs, 5)
    assert phi == {0: 0, 1: 1, 2: 2, 3: 0}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
def test_phi_palette(seed, pieces, p):
    g, lrs = random_lrs_instance(seeded(seed), pieces)
    assert set(phi_from_lrs(g, lrs, p).values()) <= set(range(p + 1))


def test_phi_small_palette_means_few_layers():
    g, lrs = grid_instance(4, 3)
    lay = lrs.layerings[0].layer_of
    for p in (1, 2, 3):
        phi = phi_from_lrs(g, lrs, p)
        for h in enumerate_connected_sets(g):
            if len({phi[v] for v in h}) <= p:
                rows = {lay[v] for v in h}
                assert max(rows) - min(rows) < p


# ----------------------------------------------------------------- projection


def test_projection_examples():
    g = path_graph(5)
    dec = path_td(range(5))
    pair = NormalPair(dec, (frozenset({0, 1}), frozenset({2, 3})))
    tree = dec.rooted(0)
    q = pair.parts[0]
    assert projection(tree, pair, q, 1) == (0, frozenset({1}))
    z, pi = projection(tree, pair, q, 4)
    assert z == 1 and pi == {2}
    # removing Pi cuts the part's vertices off from v
    side = dec.union(q) - pi
    comp = next(c for c in connected_components(g.remove(pi)) if 4 in c)
    assert not comp & side


# -------------------------------------------------------------- good_witness


def test_witness_whole_graph_family():
    g, lrs = grid_instance(3, 3)
    oracle = everything(g)
    wit = good_witness(g, lrs, 1, oracle, 1)
    assert isinstance(wit, GoodnessWitness) and wit.Z
    for p in (1, 2, 3):
        rep = check(g, lrs, p, oracle, 1, wit)
        assert rep.ok and rep.pc2_mode == "exact"


def test_witness_packing_certificate():
    g, lrs = grid_instance(3, 3)
    oracle = explicit_family_oracle([{0, 1}, {7, 8}])
    res = good_witness(g, lrs, 1, oracle, 1)
    assert isinstance(res, Packing) and len(res.members) == 2
    assert not res.members[0] & res.members[1]


def test_witness_empty_family():
    g, lrs = grid_instance(3, 3)
    wit = good_witness(g, lrs, 1, explicit_family_oracle([]), 2)
    assert wit.Z == frozenset() and wit.psi == {}
    assert check(g, lrs, 1, explicit_family_oracle([]), 2, wit).ok


def test_witness_single_vertex():
    g = Graph.from_edges(1, [])
    lrs = lrs_from_layered_td(g, path_td([0]), bfs_layering(g))
    oracle = everything(g)
    wit = good_witness(g, lrs, 1, oracle, 1)
    assert wit.Z == {0}
    assert check(g, lrs, 1, oracle, 1, wit).ok


def test_witness_rejects_bad_d():
    g, lrs = grid_instance(2, 2)
    with pytest.raises(ValueError):
        good_witness(g, lrs, 1, everything(g), 0)


def test_corrupted_psi_caught():
    g, lrs = grid_instance(3, 4)
    wit = good_witness(g, lrs, 1, everything(g), 1)
    phi = phi_from_lrs(g, lrs, 1)
    pair = next((u, v) for u, v in sorted(g.edges) if {u, v} <= wit.Z and phi[u] == phi[v])
    psi = dict(wit.psi)
    psi[pair[1]] = psi[pair[0]]
    rep = check_goodness_witness(g, wit.Z, psi, phi, 1)
    assert not rep.pc2 and "pc2" in rep.counterexample
    h = frozenset(rep.counterexample["pc2"])
    assert g.is_connected_set(h)


def test_pc3_detects_bad_z():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    # removing {1, 2, 3} leaves the centre, whose neighbourhood meets three components
    assert pc3_violations(star, {1, 2, 3}) == [frozenset({0})]
    # each leaf sees only the centre, and the rest stays connected
    assert pc3_violations(star, {0}) == []


def test_pc1_reports_missed_member():
    g, lrs = grid_instance(2, 3)
    oracle = explicit_family_oracle([{5}])
    phi = phi_from_lrs(g, lrs, 1)
    rep = check_goodness_witness(g, {0}, {0: 1}, phi, 1, oracle)
    assert not rep.pc1 and rep.counterexample["pc1"] == [5]


def test_witness_audit_bounds():
    g, lrs = grid_instance(4, 3)
    c = lrs.c
    for d in (1, 2, 3):
        fam = [{v} for v in g.vertices]
        res = good_witness(g, lrs, 1, explicit_family_oracle(fam), d)
        if isinstance(res, Packing):
            assert len(res.members) == d + 1
            continue
        for a in res.audits:
            assert len(a.X0) <= d
            assert len(a.X1) <= 2 * d - 1
            assert len(a.X3) <= (8 * c + 8) * d
            assert len(a.B) <= c * (4 * c + 2) * d
            assert all(len(b) <= c * (8 * c + 8) * d for b in a.blocks)
        assert max(res.psi.values()) <= bounds.c13(c) * d


def test_witness_restricted_vertices():
    g, lrs = grid_instance(3, 3)
    keep = {0, 1, 2, 6, 7, 8}  # two disjoint rows
    sub = g.induced(keep)
    oracle = explicit_family_oracle([{0, 1, 2}, {6, 7, 8}])
    wit = good_witness(g, lrs, 1, oracle, 2, vertices=keep)
    assert len(wit.audits) == 2
    phi = phi_from_lrs(g, lrs, 2)
    assert check_goodness_witness(sub, wit.Z, wit.psi, phi, 2, oracle, 2, lrs.c).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 3), st.integers(1, 3))
def test_witness_random_lrs(seed, pieces, d, p):
    rng = seeded(seed)
    g, lrs = random_lrs_instance(rng, pieces)
    fam = random_family(rng, g, rng.randint(1, 5))
    oracle = explicit_family_oracle(fam)
    res = good_witness(g, lrs, p, oracle, d)
    if isinstance(res, Packing):
        assert len(res.members) == d + 1
        assert all(not a & b for i, a in enumerate(res.members) for b in res.members[:i])
        return
    rep = check(g, lrs, p, oracle, d, res)
    assert rep.ok, rep.counterexample


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 12), st.integers(1, 3))
def test_witness_series_parallel(seed, n, d):
    rng = seeded(seed)
    g, lrs = sp_instance(rng, n)
    fam = random_family(rng, g, rng.randint(1, 6))
    oracle = explicit_family_oracle(fam)
    res = good_witness(g, lrs, 2, oracle, d)
    if not isinstance(res, Packing):
        assert check(g, lrs, 2, oracle, d, res).ok
