"""The layer coloring phi and witnesses (Z, psi) for its goodness.

For a subgraph G0, a family given by a membership oracle and a packing bound
d, ``good_witness`` either finds d + 1 disjoint members or a set Z hitting
every member together with a coloring psi of Z such that

  (pc1) every member meets Z,
  (pc2) every connected H meeting Z has > p phi-colors on V(H) or a
        (phi x psi)-center on V(H) & Z,
  (pc3) for every component C of G0 - Z, N(C) meets at most two components
        of G0 - C.

Intermediate size bounds are checked through ``bounds``.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import bounds
from .centered import center_of, random_connected_set
from .decomposition import (
    FamilyOracle,
    HittingBags,
    NormalPair,
    Packing,
    RootedTree,
    _ask,
    helly_hitting_or_packing,
    lca_closure,
    make_natural,
    parts_hit,
)
from .graph import Graph, connected_components, enumerate_connected_sets
from .layered import LayeredRSDecomposition, LRSError, glue_to_normal_pair

log = logging.getLogger(__name__)


def phi_from_lrs(g: Graph, lrs: LayeredRSDecomposition, p: int, root: int | None = None) -> dict[int, int]:
    """Apices get 0; other vertices get their layer index mod p + 1, read at
    the topmost tree node whose bag contains them."""
    tree = lrs.rooted(root)
    color: dict[int, int] = {}
    for x in sorted(tree.nodes, key=lambda x: (tree.depth[x], x)):
        par = tree.parent[x]
        above = lrs.bags[par] if par is not None else frozenset()
        layer_of = lrs.layerings[x].layer_of
        for v in lrs.bags[x] - above:
            if v in color:
                raise LRSError(f"vertex {v} is new at two tree nodes")
            color[v] = 0 if v in lrs.apex[x] else layer_of[v] % (p + 1)
    missing = g.vertex_set - set(color)
    if missing:
        raise LRSError(f"vertices {sorted(missing)[:5]} matched no case of phi")
    return color


def projection(tree: RootedTree, pair: NormalPair, q: frozenset, v: int) -> tuple[object, frozenset[int]]:
    """(pi(Q, v), Pi(Q, v)) for the part with node set ``q``.

    If Q meets the occurrence subtree of v, pi is the smallest shared node and
    Pi = {v}; otherwise take the shortest tree path from Q to that subtree,
    with z its end in Q and y the next node, and Pi = V_y & V_z.
    """
    td = pair.td
    occ = td.occurrences(v)
    shared = q & occ
    if shared:
        return min(shared), frozenset([v])
    if not occ:
        raise ValueError(f"vertex {v} is in no bag")
    # multi-source BFS from Q, remembering (z, y) of the first step out of Q
    start: dict = {}
    queue: deque = deque()
    for z in sorted(q):
        for y in sorted(td.tree_neighbors(z)):
            if y not in q and y not in start:
                start[y] = (z, y)
                queue.append(y)
    while queue:
        a = queue.popleft()
        if a in occ:
            z, y = start[a]
            return z, td.bags[y] & td.bags[z]
        for b in sorted(td.tree_neighbors(a)):
            if b not in q and b not in start:
                start[b] = start[a]
                queue.append(b)
    raise ValueError(f"occurrences of {v} are unreachable from the part")


@dataclass
class WitnessAudit:
    """Everything built for one component, kept for inspection and dumps."""

    component: frozenset[int]
    pair: NormalPair
    part_x: dict[int, int]
    X0: tuple = ()
    X1: frozenset = frozenset()
    X2: frozenset = frozenset()
    X3: frozenset = frozenset()
    Y: dict[int, frozenset] = field(default_factory=dict)
    BQ: dict[int, frozenset[int]] = field(default_factory=dict)
    B: frozenset[int] = frozenset()
    blocks: list[frozenset[int]] = field(default_factory=list)
    Z: frozenset[int] = frozenset()


@dataclass
class GoodnessWitness:
    Z: frozenset[int]
    psi: dict[int, int]
    audits: list[WitnessAudit]

    @property
    def B(self) -> frozenset[int]:
        return frozenset().union(*(a.B for a in self.audits))

    @property
    def blocks(self) -> list[frozenset[int]]:
        return [b for a in self.audits for b in a.blocks]


def _restricted(oracle: FamilyOracle, vs: frozenset[int]) -> FamilyOracle:
    return lambda s: oracle(frozenset(s) & vs)


def _check_structure(g0: Graph, lrs: LayeredRSDecomposition, audit: WitnessAudit, c: int) -> None:
    """Runtime checks of the small-adhesion, layer, separation and containment facts."""
    td = audit.pair.td
    owner = audit.pair.part_of()
    for a, b in td.edges:
        if owner[a] != owner[b]:
            bounds.check_le("adhesion between parts", len(td.bags[a] & td.bags[b]), c)
    where: dict[int, list[tuple[int, int]]] = {}
    for x in lrs.nodes:
        for v, i in lrs.layerings[x].layer_of.items():
            where.setdefault(v, []).append((x, i))
    for y, bag in td.bags.items():
        counts = Counter(key for v in bag for key in where.get(v, ()))
        if counts:
            bounds.check_le("bag meets layer", max(counts.values()), c)
    B = audit.B
    unions = {qi: td.union(audit.pair.parts[qi]) - B for qi in audit.Y}
    for comp in connected_components(g0.remove(B)):
        hit = [qi for qi, u in unions.items() if u & comp]
        bounds.check_true("parts separated by B", len(hit) <= 1, f"component meets parts {hit}")
    tree = lrs.rooted()
    for qi, u in unions.items():
        x = audit.part_x[qi]
        par = tree.parent[x]
        forbid = lrs.apex[x] | (lrs.bags[x] & lrs.bags[par] if par is not None else frozenset())
        bounds.check_true("part stays in one bag", u <= lrs.bags[x] - forbid, f"part {qi}")


def _component_witness(
    g: Graph, lrs: LayeredRSDecomposition, comp: frozenset[int], oracle: FamilyOracle, d: int
) -> WitnessAudit | Packing:
    c = lrs.c
    g0 = g.induced(comp)
    glued = glue_to_normal_pair(g, lrs, comp)
    pair, witness = make_natural(g0, glued.pair)
    part_x = {qi: glued.part_node[witness.g[qi]] for qi in range(len(pair.parts))}
    audit = WitnessAudit(comp, pair, part_x)
    td = pair.td
    tree = td.rooted(min(td.nodes))
    helly = helly_hitting_or_packing(g0, td, _restricted(oracle, comp), d, tree.root)
    if isinstance(helly, Packing):
        return helly
    assert isinstance(helly, HittingBags)
    audit.X0 = helly.nodes
    if not helly.nodes:
        return audit
    bounds.check_le("|X0| <= d", len(helly.nodes), d)
    X1 = lca_closure(tree, helly.nodes)
    bounds.check_le("|X1| <= 2d - 1", len(X1), 2 * d - 1)
    q_x1 = sorted(parts_hit(pair, X1))
    ltree = lrs.rooted()
    roots = {}
    Y: dict[int, frozenset] = {}
    BQ: dict[int, frozenset[int]] = {}
    for qi in q_x1:
        q = pair.parts[qi]
        roots[qi] = tree.top(q)
        x = part_x[qi]
        par = ltree.parent[x]
        vset = lrs.apex[x] | (lrs.bags[x] & lrs.bags[par] if par is not None else frozenset())
        ys, pis = set(), set()
        for v in sorted(vset & comp):
            z, pi = projection(tree, pair, q, v)
            ys.add(z)
            pis |= pi
        Y[qi], BQ[qi] = frozenset(ys), frozenset(pis)
    X2 = set(X1) | set(roots.values()) | set().union(*Y.values())
    X3 = lca_closure(tree, X2)
    bounds.check_true("parts of X1 = parts of X3", parts_hit(pair, X3) == set(q_x1))
    bounds.check_le("|X3| <= (8c+8)d", len(X3), (8 * c + 8) * d)
    Z = frozenset(td.union(X3))
    B: set[int] = set()
    for qi in q_x1:
        r = roots[qi]
        if tree.root not in pair.parts[qi]:
            B |= td.bags[r] & td.bags[tree.parent[r]]
        B |= BQ[qi]
    B = frozenset(B)
    bounds.check_true("B inside Z", B <= Z)
    bounds.check_le("|B| <= c(4c+2)d", len(B), c * (4 * c + 2) * d)
    blocks = []
    for qi in q_x1:
        u = td.union(pair.parts[qi]) & (Z - B)
        for layer in lrs.layerings[part_x[qi]].layers:
            block = u & layer
            if block:
                bounds.check_le("block <= c(8c+8)d", len(block), c * (8 * c + 8) * d)
                blocks.append(frozenset(block))
    covered = [v for b in blocks for v in b]
    bounds.check_true(
        "blocks partition Z - B", len(covered) == len(set(covered)) and set(covered) == Z - B
    )
    audit.X1, audit.X2, audit.X3 = frozenset(X1), frozenset(X2), frozenset(X3)
    audit.Y, audit.BQ, audit.B, audit.blocks, audit.Z = Y, BQ, B, blocks, Z
    _check_structure(g0, lrs, audit, c)
    return audit


def good_witness(
    g: Graph,
    lrs: LayeredRSDecomposition,
    p: int,
    oracle: FamilyOracle,
    d: int,
    vertices: Iterable[int] | None = None,
) -> GoodnessWitness | Packing:
    """Witness (Z, psi) for G0 = g[vertices], or d + 1 disjoint members.

    Each component of G0 is handled on its own; psi palettes are shared.
    ``p`` only matters through phi, so it is accepted for symmetry with the
    checker and otherwise unused.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    keep = g.vertex_set if vertices is None else frozenset(vertices)
    audits = []
    for comp in connected_components(g.induced(keep)):
        res = _component_witness(g, lrs, comp, oracle, d)
        if isinstance(res, Packing):
            return res
        audits.append(res)
    psi: dict[int, int] = {}
    for a in audits:
        for k, v in enumerate(sorted(a.B), start=1):
            psi[v] = k
        for block in a.blocks:
            for k, v in enumerate(sorted(block), start=len(a.B) + 1):
                psi[v] = k
    Z = frozenset().union(*(a.Z for a in audits))
    if psi:
        bounds.check_le("psi palette <= c(12c+10)d", max(psi.values()), bounds.c13(lrs.c) * d)
    return GoodnessWitness(Z, psi, audits)


@dataclass
class GoodnessReport:
    pc1: bool
    pc2: bool
    pc3: bool
    pc2_mode: str
    pc2_checked: int
    counterexample: dict = field(default_factory=dict)
    palette_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.pc1 and self.pc2 and self.pc3 and self.palette_ok


def pc2_violation(h: Iterable[int], z: frozenset[int], phi: Mapping, psi: Mapping, p: int) -> bool:
    h = frozenset(h)
    core = h & z
    if not core or len({phi[v] for v in h}) > p:
        return False
    return center_of(core, {v: (phi[v], psi[v]) for v in core}) is None


def pc3_violations(g0: Graph, z: Iterable[int]) -> list[frozenset[int]]:
    """Components C of G0 - Z whose neighbourhood meets three or more components of G0 - C."""
    bad = []
    for comp in connected_components(g0.remove(z)):
        nbrs = g0.neighborhood(comp)
        touched = [k for k in connected_components(g0.remove(comp)) if k & nbrs]
        if len(touched) > 2:
            bad.append(comp)
    return bad


def check_goodness_witness(
    g0: Graph,
    Z: Iterable[int],
    psi: Mapping[int, int],
    phi: Mapping[int, int],
    p: int,
    oracle: FamilyOracle | None = None,
    d: int | None = None,
    c: int | None = None,
    exact_limit: int = 16,
    samples: int = 10_000,
    seed: int = 0,
) -> GoodnessReport:
    """Independent re-check of (pc1)-(pc3); the palette is checked when c and d are given."""
    Z = frozenset(Z)
    extra = {}
    pc1 = True
    if oracle is not None:
        member = _ask(oracle, g0.vertex_set - Z)
        if member is not None:
            pc1 = False
            extra["pc1"] = sorted(member)
    bad3 = pc3_violations(g0, Z)
    if bad3:
        extra["pc3"] = sorted(bad3[0])
    pc2 = True
    checked = 0
    if g0.n <= exact_limit:
        mode = "exact"
        candidates = enumerate_connected_sets(g0)
    else:
        mode = "sampled"
        rng = random.Random(seed)
        candidates = (random_connected_set(g0, rng) for _ in range(samples))
    if Z:
        for h in candidates:
            checked += 1
            if pc2_violation(h, Z, phi, psi, p):
                pc2 = False
                extra["pc2"] = sorted(h)
                break
    palette_ok = True
    if c is not None and d is not None and psi:
        palette_ok = max(psi.values()) <= bounds.c13(c) * d and min(psi.values()) >= 1
    if set(psi) != set(Z):
        palette_ok = False
        extra["psi domain"] = sorted(set(psi) ^ Z)
    return GoodnessReport(pc1, pc2, not bad3, mode, checked, extra, palette_ok)
