"""Tree decompositions, elimination orderings, LCA closures, the Helly-type
hitting/packing dichotomy, and refinement of normal pairs to natural ones."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .graph import Graph, connected_components

log = logging.getLogger(__name__)

Node = Hashable
FamilyOracle = Callable[[frozenset[int]], "frozenset[int] | None"]


class DecompositionError(ValueError):
    pass


class OracleError(DecompositionError):
    """The membership oracle answered with something that is not inside the query."""


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: object

    def __str__(self):
        return f"{self.kind}: {self.subject}"


# --------------------------------------------------------------------------- trees


@dataclass(frozen=True)
class RootedTree:
    root: Node
    parent: Mapping[Node, Node | None]
    children: Mapping[Node, tuple]
    depth: Mapping[Node, int]

    @classmethod
    def from_edges(cls, nodes: Iterable[Node], edges: Iterable[tuple[Node, Node]], root: Node) -> "RootedTree":
        nodes = list(nodes)
        adj: dict[Node, list[Node]] = {x: [] for x in nodes}
        n_edges = 0
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
            n_edges += 1
        if root not in adj:
            raise DecompositionError(f"root {root!r} is not a node")
        parent: dict[Node, Node | None] = {root: None}
        depth = {root: 0}
        children: dict[Node, list[Node]] = {x: [] for x in nodes}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x], key=_node_key):
                if y in parent:
                    continue
                parent[y] = x
                depth[y] = depth[x] + 1
                children[x].append(y)
                queue.append(y)
        if len(parent) != len(nodes) or n_edges != len(nodes) - 1:
            raise DecompositionError("edges do not form a tree on the given nodes")
        return cls(root, parent, {x: tuple(c) for x, c in children.items()}, depth)

    @property
    def nodes(self) -> list[Node]:
        return sorted(self.parent, key=_node_key)

    def lca(self, u: Node, v: Node) -> Node:
        du, dv = self.depth[u], self.depth[v]
        while du > dv:
            u = self.parent[u]
            du -= 1
        while dv > du:
            v = self.parent[v]
            dv -= 1
        while u != v:
            u, v = self.parent[u], self.parent[v]
        return u

    def is_ancestor(self, a: Node, x: Node) -> bool:
        """``a`` is an ancestor of ``x`` (every node is its own ancestor)."""
        while x is not None:
            if x == a:
                return True
            x = self.parent[x]
        return False

    def subtree(self, x: Node) -> set[Node]:
        out = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            out.update(self.children[y])
            stack.extend(self.children[y])
        return out

    def top(self, nodes: Iterable[Node]) -> Node:
        """The node of a connected node set closest to the root."""
        return min(nodes, key=lambda x: (self.depth[x], _node_key(x)))

    def edges(self) -> list[tuple[Node, Node]]:
        return [(self.parent[x], x) for x in self.nodes if self.parent[x] is not None]


def _node_key(x):
    # total order on mixed node ids: ints first, then tuples, then anything else by repr
    if isinstance(x, int):
        return (0, x, ())
    if isinstance(x, tuple):
        return (1, 0, tuple(_node_key(y) for y in x))
    return (2, 0, repr(x))


def tree_components(nodes: Iterable[Node], edges: Iterable[tuple[Node, Node]]) -> list[set[Node]]:
    nodes = set(nodes)
    adj: dict[Node, set[Node]] = {x: set() for x in nodes}
    for a, b in edges:
        if a in nodes and b in nodes:
            adj[a].add(b)
            adj[b].add(a)
    comps = []
    seen: set[Node] = set()
    for s in sorted(nodes, key=_node_key):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        comps.append(comp)
    return comps


def lca_closure(tree: RootedTree, y: Iterable[Node]) -> set[Node]:
    """{lca(u, v) : u, v in y}.  At most 2|y| - 1 nodes.

    Computed from consecutive pairs in DFS preorder, which already yields
    every pairwise lca.
    """
    y = set(y)
    if not y:
        raise DecompositionError("LCA closure of an empty set")
    order = _preorder_index(tree)
    ys = sorted(y, key=order.__getitem__)
    out = set(ys)
    for a, b in zip(ys, ys[1:]):
        out.add(tree.lca(a, b))
    return out


def _preorder_index(tree: RootedTree) -> dict[Node, int]:
    order: dict[Node, int] = {}
    stack = [tree.root]
    while stack:
        x = stack.pop()
        order[x] = len(order)
        stack.extend(reversed(tree.children[x]))
    return order


# ------------------------------------------------------------- tree decompositions


@dataclass(frozen=True)
class TreeDecomposition:
    bags: Mapping[Node, frozenset[int]]
    edges: tuple[tuple[Node, Node], ...] = ()
    _adj: Mapping[Node, frozenset] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bags = {x: frozenset(b) for x, b in self.bags.items()}
        if not bags:
            raise DecompositionError("a tree decomposition needs at least one node")
        edges = tuple((a, b) for a, b in self.edges)
        adj: dict[Node, set] = {x: set() for x in bags}
        for a, b in edges:
            if a not in adj or b not in adj:
                raise DecompositionError(f"tree edge {a!r}-{b!r} uses an unknown node")
            adj[a].add(b)
            adj[b].add(a)
        if len(edges) != len(bags) - 1 or len(tree_components(bags, edges)) != 1:
            raise DecompositionError("decomposition tree is not a tree")
        object.__setattr__(self, "bags", bags)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", {x: frozenset(ys) for x, ys in adj.items()})

    @property
    def nodes(self) -> list[Node]:
        return sorted(self.bags, key=_node_key)

    def tree_neighbors(self, x: Node) -> frozenset:
        return self._adj[x]

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def adhesions(self) -> dict[tuple[Node, Node], frozenset[int]]:
        return {(a, b): self.bags[a] & self.bags[b] for a, b in self.edges}

    def occurrences(self, v: int) -> set[Node]:
        return {x for x, b in self.bags.items() if v in b}

    def rooted(self, root: Node | None = None) -> RootedTree:
        if root is None:
            root = self.nodes[0]
        return RootedTree.from_edges(self.bags, self.edges, root)

    def side(self, x: Node, y: Node) -> set[Node]:
        """Nodes of the component of ``x`` after deleting tree edge xy."""
        out = {x}
        stack = [x]
        while stack:
            a = stack.pop()
            for b in self._adj[a]:
                if b not in out and not (a == x and b == y):
                    out.add(b)
                    stack.append(b)
        return out

    def union(self, nodes: Iterable[Node]) -> set[int]:
        out: set[int] = set()
        for x in nodes:
            out |= self.bags[x]
        return out

    def vertices(self) -> set[int]:
        return self.union(self.bags)


def validate_td(g: Graph, td: TreeDecomposition) -> list[Violation]:
    """Empty list iff ``td`` is a tree decomposition of ``g``."""
    problems = []
    stray = td.vertices() - g.vertex_set
    if stray:
        problems.append(Violation("vertices outside graph", sorted(stray)))
    occ: dict[int, set] = {v: set() for v in g.adj}
    for x, b in td.bags.items():
        for v in b:
            if v in occ:
                occ[v].add(x)
    for v in g.vertices:
        if not occ[v]:
            problems.append(Violation("vertex in no bag", v))
        elif len(tree_components(occ[v], td.edges)) != 1:
            problems.append(Violation("vertex occurrence subtree disconnected", v))
    for u, v in sorted(g.edges):
        if not (occ[u] & occ[v]):
            problems.append(Violation("edge uncovered", (u, v)))
    return problems


def elimination_order(td: TreeDecomposition, root: Node | None = None) -> list[int]:
    """Vertices sorted by depth of their topmost bag, ties by vertex id."""
    tree = td.rooted(root)
    top_depth: dict[int, int] = {}
    for x, b in td.bags.items():
        for v in b:
            d = tree.depth[x]
            if v not in top_depth or d < top_depth[v]:
                top_depth[v] = d
    return sorted(top_depth, key=lambda v: (top_depth[v], v))


def validate_elimination_order(td: TreeDecomposition, sigma: Sequence[int]) -> int | None:
    """Index of the first vertex violating the elimination-ordering condition, or None."""
    if sorted(sigma) != sorted(td.vertices()) or len(set(sigma)) != len(sigma):
        raise DecompositionError("ordering is not a permutation of the decomposed vertices")
    earlier: set[int] = set()
    for i, u in enumerate(sigma):
        reach = td.union(td.occurrences(u)) & earlier
        if not any(reach <= b for b in td.bags.values()):
            return i
        earlier.add(u)
    return None


def bag_union_closure(g: Graph, td: TreeDecomposition, x: Iterable[Node], root: Node | None = None):
    """Union of bags over the LCA closure of ``x``; returns (vertex set, closed node set)."""
    tree = td.rooted(root)
    closed = lca_closure(tree, x)
    return td.union(closed), closed


def is_natural(g: Graph, td: TreeDecomposition) -> bool:
    """Every side of every tree edge has a (nonnull) connected bag union."""
    for a, b in td.edges:
        for x, y in ((a, b), (b, a)):
            if not g.is_connected_set(td.union(td.side(x, y))):
                return False
    return True


# ---------------------------------------------------------------- Helly dichotomy


@dataclass(frozen=True)
class HittingBags:
    nodes: tuple


@dataclass(frozen=True)
class Packing:
    members: tuple[frozenset[int], ...]


def explicit_family_oracle(members: Iterable[Iterable[int]]) -> FamilyOracle:
    """Wrap a finite family as a membership oracle (first member inside S wins)."""
    fam = [frozenset(m) for m in members]

    def query(s: frozenset[int]):
        for m in fam:
            if m <= s:
                return m
        return None

    return query


def _ask(oracle: FamilyOracle, s: set[int] | frozenset[int]):
    s = frozenset(s)
    member = oracle(s)
    if member is None:
        return None
    member = frozenset(member)
    if not member or not member <= s:
        raise OracleError(f"oracle returned {sorted(member)} which is not a nonempty subset of the query")
    return member


def helly_hitting_or_packing(
    g: Graph, td: TreeDecomposition, oracle: FamilyOracle, d: int, root: Node | None = None
) -> HittingBags | Packing:
    """Either at most ``d`` bags hitting every member, or ``d + 1`` disjoint members.

    Nodes are scanned deepest first.  Node z is taken when the residue of its
    remaining subtree (bags of z's subtree not yet cut off, minus the bags
    already taken) contains a member; z's bag joins the hitting set, the
    member joins the packing, and z's subtree is cut off.  Children were
    scanned earlier against a larger residue, so by monotonicity none of them
    contains a member, which makes the collected members pairwise disjoint.
    """
    if d < 0:
        raise DecompositionError("d must be nonnegative")
    tree = td.rooted(root)
    order = sorted(tree.nodes, key=lambda x: (-tree.depth[x], _node_key(x)))
    removed: set[Node] = set()
    hit: set[int] = set()
    chosen: list[Node] = []
    members: list[frozenset[int]] = []
    for z in order:
        if z in removed:
            continue
        region = tree.subtree(z) - removed
        residue = td.union(region) - hit
        member = _ask(oracle, residue)
        if member is None:
            continue
        chosen.append(z)
        members.append(member)
        hit |= td.bags[z]
        removed |= region
        if len(members) == d + 1:
            return Packing(tuple(members))
    leftover = _ask(oracle, g.vertex_set - hit)
    if leftover is not None:
        raise DecompositionError("Helly scan finished but a member avoids the chosen bags")
    return HittingBags(tuple(chosen))


def check_helly_result(g: Graph, td: TreeDecomposition, oracle: FamilyOracle, d: int, result) -> list[str]:
    """Re-verify whichever arm was returned."""
    problems = []
    if isinstance(result, HittingBags):
        if len(result.nodes) > d:
            problems.append(f"{len(result.nodes)} bags > d = {d}")
        hit = td.union(result.nodes)
        if _ask(oracle, g.vertex_set - hit) is not None:
            problems.append("a member avoids the hitting bags")
    elif isinstance(result, Packing):
        if len(result.members) != d + 1:
            problems.append(f"packing has {len(result.members)} members, expected {d + 1}")
        for i, a in enumerate(result.members):
            if _ask(oracle, a) is None:
                problems.append(f"packing member {i} is not a family member")
            if not g.is_connected_set(a):
                problems.append(f"packing member {i} is not connected")
            for j in range(i):
                if a & result.members[j]:
                    problems.append(f"packing members {j} and {i} intersect")
    else:
        problems.append(f"unknown result {result!r}")
    return problems


# ------------------------------------------------------------------ normal pairs


@dataclass(frozen=True)
class NormalPair:
    td: TreeDecomposition
    parts: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(frozenset(p) for p in self.parts))

    def part_of(self) -> dict[Node, int]:
        return {x: i for i, p in enumerate(self.parts) for x in p}


@dataclass(frozen=True)
class RefinementWitness:
    f: Mapping[Node, Node]
    g: Mapping[int, int]

    def then(self, coarser: "RefinementWitness") -> "RefinementWitness":
        """Compose with a witness for the next refinement step up."""
        return RefinementWitness(
            {s: coarser.f[x] for s, x in self.f.items()},
            {q: coarser.g[p] for q, p in self.g.items()},
        )


def normal_pair_violations(g: Graph, pair: NormalPair) -> list[Violation]:
    problems = list(validate_td(g, pair.td))
    seen: set = set()
    for i, p in enumerate(pair.parts):
        if not p:
            problems.append(Violation("empty part", i))
            continue
        if p & seen:
            problems.append(Violation("overlapping part", i))
        seen |= p
        if len(tree_components(p, pair.td.edges)) != 1:
            problems.append(Violation("part is not a subtree", i))
    if seen != set(pair.td.bags):
        problems.append(Violation("parts do not cover the tree", sorted(set(pair.td.bags) ^ seen, key=_node_key)))
    return problems


def refinement_violations(fine: NormalPair, coarse: NormalPair, w: RefinementWitness) -> list[Violation]:
    """Check (r1) bag containment and (r2) part images for a claimed refinement."""
    problems = []
    for s, b in fine.td.bags.items():
        x = w.f.get(s)
        if x not in coarse.td.bags:
            problems.append(Violation("f undefined or invalid", s))
        elif not b <= coarse.td.bags[x]:
            problems.append(Violation("r1", s))
    for qi, q in enumerate(fine.parts):
        pi = w.g.get(qi)
        if pi is None or not 0 <= pi < len(coarse.parts):
            problems.append(Violation("g undefined or invalid", qi))
            continue
        if not {w.f.get(s) for s in q} <= coarse.parts[pi]:
            problems.append(Violation("r2", qi))
    return problems


def potential(td: TreeDecomposition, n_vertices: int) -> tuple[int, ...]:
    """(n_N, ..., n_0): bag counts by size, largest size first."""
    counts = [0] * (n_vertices + 1)
    for b in td.bags.values():
        counts[len(b)] += 1
    return tuple(reversed(counts))


def identity_witness(pair: NormalPair) -> RefinementWitness:
    return RefinementWitness({x: x for x in pair.td.bags}, {i: i for i in range(len(pair.parts))})


def _offending_side(g: Graph, td: TreeDecomposition):
    best = None
    for a, b in td.edges:
        for x, y in ((a, b), (b, a)):
            side = td.side(x, y)
            if not g.is_connected_set(td.union(side)):
                key = (len(side), _node_key(x), _node_key(y))
                if best is None or key < best[0]:
                    best = (key, x, y, side)
    return None if best is None else best[1:]


def split_step(g: Graph, pair: NormalPair, x: Node, y: Node, side: set[Node]):
    """One splitting step on tree edge xy whose x-side has a disconnected bag union.

    The x-side is copied once per component C of its bag union, bags of the
    copy are intersected with C, and each copy hangs off y.  Returns the new
    pair (nodes renumbered 0..k-1) and the witness into ``pair``.
    """
    td = pair.td
    comps = connected_components(g.induced(td.union(side)))
    keep = [s for s in td.nodes if s not in side]
    new_id: dict[tuple, int] = {}
    bags: dict[int, frozenset[int]] = {}
    f: dict[int, Node] = {}
    for s in keep:
        new_id[("keep", s)] = len(bags)
        bags[len(bags)] = td.bags[s]
        f[len(f)] = s
    side_nodes = sorted(side, key=_node_key)
    for ci, comp in enumerate(comps):
        for s in side_nodes:
            new_id[("copy", ci, s)] = len(bags)
            bags[len(bags)] = td.bags[s] & comp
            f[len(f)] = s
    edges = []
    for a, b in td.edges:
        if a in side and b in side:
            for ci in range(len(comps)):
                edges.append((new_id[("copy", ci, a)], new_id[("copy", ci, b)]))
        elif a not in side and b not in side:
            edges.append((new_id[("keep", a)], new_id[("keep", b)]))
    for ci in range(len(comps)):
        edges.append((new_id[("copy", ci, x)], new_id[("keep", y)]))
    new_td = TreeDecomposition(bags, tuple(edges))

    parts: list[frozenset[int]] = []
    gmap: dict[int, int] = {}
    for pi, p in enumerate(pair.parts):
        if p - side:
            nodes = {new_id[("keep", s)] for s in p - side}
            for ci in range(len(comps)):
                nodes |= {new_id[("copy", ci, s)] for s in p & side}
            gmap[len(parts)] = pi
            parts.append(frozenset(nodes))
    for pi, p in enumerate(pair.parts):
        if p <= side:
            for ci in range(len(comps)):
                gmap[len(parts)] = pi
                parts.append(frozenset(new_id[("copy", ci, s)] for s in p))
    return NormalPair(new_td, tuple(parts)), RefinementWitness(f, gmap)


def merge_equal_image_parts(pair: NormalPair, witness: RefinementWitness) -> tuple[NormalPair, RefinementWitness]:
    """Greedily merge tree-adjacent parts whose g-images coincide, until none remain."""
    parts = [set(p) for p in pair.parts]
    image = [witness.g[i] for i in range(len(parts))]
    changed = True
    while changed:
        changed = False
        owner = {x: i for i, p in enumerate(parts) for x in p}
        for a, b in pair.td.edges:
            i, j = owner[a], owner[b]
            if i != j and image[i] == image[j]:
                lo, hi = min(i, j), max(i, j)
                parts[lo] |= parts[hi]
                del parts[hi]
                del image[hi]
                changed = True
                break
    new_pair = NormalPair(pair.td, tuple(frozenset(p) for p in parts))
    return new_pair, RefinementWitness(dict(witness.f), dict(enumerate(image)))


def make_natural(g: Graph, pair: NormalPair, minimize_parts: bool = True, check: bool = True):
    """Refine a normal pair of a connected graph until its decomposition is natural.

    Returns (pair, witness into the input pair).  Each split strictly lowers
    the bag-size potential in lexicographic order, which bounds the number of
    steps.
    """
    if not g.is_connected():
        raise DecompositionError("make_natural needs a connected graph")
    if check:
        problems = normal_pair_violations(g, pair)
        if problems:
            raise DecompositionError("input is not a normal pair: " + "; ".join(map(str, problems)))
    current, witness = pair, identity_witness(pair)
    pot = potential(current.td, g.n)
    steps = 0
    while True:
        found = _offending_side(g, current.td)
        if found is None:
            break
        x, y, side = found
        nxt, step = split_step(g, current, x, y, side)
        new_pot = potential(nxt.td, g.n)
        if not new_pot < pot:
            raise DecompositionError(f"potential did not decrease at step {steps}")
        current, witness, pot = nxt, step.then(witness), new_pot
        steps += 1
    log.debug("make_natural: %d split steps, %d nodes", steps, len(current.td.bags))
    if minimize_parts:
        current, witness = merge_equal_image_parts(current, witness)
    return current, witness


def parts_hit(pair: NormalPair, x: Iterable[Node]) -> set[int]:
    """Indices of the parts whose node sets meet ``x``."""
    x = set(x)
    return {i for i, p in enumerate(pair.parts) if p & x}
