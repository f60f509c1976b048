"""Layerings and layered Robertson-Seymour decompositions (LRS).

An LRS of width c is a tree decomposition (T, W) with small adhesions where
every bag W_x carries an apex set A_x and, for torso(W_x) - A_x, both a tree
decomposition D_x and a layering L_x meeting each other in at most c
vertices.  ``glue_to_normal_pair`` stitches the D_x together along T.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .decomposition import (
    NormalPair,
    RootedTree,
    TreeDecomposition,
    Violation,
    _node_key,
    tree_components,
    validate_td,
)
from .graph import Graph, bfs_distances, connected_components, grid_graph, torso


class LayeringError(ValueError):
    pass


class LRSError(ValueError):
    pass


@dataclass(frozen=True)
class Layering:
    layers: tuple[frozenset[int], ...]
    layer_of: Mapping[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        layers = [frozenset(layer) for layer in self.layers]
        while layers and not layers[-1]:
            layers.pop()
        layer_of: dict[int, int] = {}
        for i, layer in enumerate(layers):
            for v in layer:
                if v in layer_of:
                    raise LayeringError(f"vertex {v} in layers {layer_of[v]} and {i}")
                layer_of[v] = i
        object.__setattr__(self, "layers", tuple(layers))
        object.__setattr__(self, "layer_of", layer_of)

    @classmethod
    def from_index(cls, index: Mapping[int, int]) -> "Layering":
        depth = max(index.values(), default=-1) + 1
        layers: list[set[int]] = [set() for _ in range(depth)]
        for v, i in index.items():
            layers[i].add(v)
        return cls(tuple(frozenset(layer) for layer in layers))

    def vertices(self) -> set[int]:
        return set(self.layer_of)

    def __len__(self):
        return len(self.layers)

    def restrict(self, vs: Iterable[int]) -> "Layering":
        vs = set(vs)
        return Layering(tuple(layer & vs for layer in self.layers))


def validate_layering(g: Graph, layering: Layering) -> tuple[int, int] | None:
    """First edge whose ends are not in equal or consecutive layers, or None.

    Raises when the layers do not partition V(g).
    """
    if layering.vertices() != g.vertex_set:
        raise LayeringError("layers do not cover the vertex set exactly")
    lo = layering.layer_of
    for u, v in sorted(g.edges):
        if abs(lo[u] - lo[v]) > 1:
            return (u, v)
    return None


def bfs_layering(g: Graph, roots: Iterable[int] = ()) -> Layering:
    """Layer i = BFS distance i from the roots; components without a root
    start from their smallest vertex."""
    roots = set(roots)
    index: dict[int, int] = {}
    for comp in connected_components(g):
        start = sorted(roots & comp) or [min(comp)]
        index.update(bfs_distances(g.induced(comp), start))
    return Layering.from_index(index)


@dataclass(frozen=True)
class LayeredRSDecomposition:
    """(T, W, A, D, L) plus the declared width c.  T is given by ``tree_edges``
    over the keys of ``bags``."""

    c: int
    bags: Mapping[int, frozenset[int]]
    tree_edges: tuple[tuple[int, int], ...]
    apex: Mapping[int, frozenset[int]]
    tds: Mapping[int, TreeDecomposition]
    layerings: Mapping[int, Layering]
    root: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "bags", {x: frozenset(b) for x, b in self.bags.items()})
        object.__setattr__(self, "apex", {x: frozenset(self.apex.get(x, ())) for x in self.bags})
        object.__setattr__(self, "tree_edges", tuple(tuple(e) for e in self.tree_edges))
        if self.root is None:
            object.__setattr__(self, "root", min(self.bags))

    @property
    def nodes(self) -> list[int]:
        return sorted(self.bags)

    def outer_td(self) -> TreeDecomposition:
        return TreeDecomposition(self.bags, self.tree_edges)

    def rooted(self, root: int | None = None) -> RootedTree:
        return RootedTree.from_edges(self.bags, self.tree_edges, self.root if root is None else root)

    def torso_minus_apex(self, g: Graph, x: int) -> Graph:
        return torso(g, self.bags[x]).remove(self.apex[x])


def validate_lrs(g: Graph, lrs: LayeredRSDecomposition) -> list[Violation]:
    """Violations of (lrs1)-(lrs5), labelled by item."""
    c = lrs.c
    problems: list[Violation] = []
    if c < 1:
        problems.append(Violation("width", f"c = {c} is not positive"))
    try:
        outer = lrs.outer_td()
    except ValueError as exc:
        return problems + [Violation("lrs1", f"outer decomposition is not a tree: {exc}")]
    problems += [Violation("lrs1", f"outer decomposition: {p}") for p in validate_td(g, outer)]
    for (a, b), adh in sorted(outer.adhesions().items()):
        if len(adh) > c:
            problems.append(Violation("lrs1", f"adhesion {a}-{b} has size {len(adh)} > {c}"))
    for x in lrs.nodes:
        ax = lrs.apex[x]
        if not ax <= lrs.bags[x]:
            problems.append(Violation("lrs2", f"apex set of {x} is not inside its bag"))
        if len(ax) > c:
            problems.append(Violation("lrs2", f"apex set of {x} has size {len(ax)} > {c}"))
        tg = lrs.torso_minus_apex(g, x)
        dx = lrs.tds.get(x)
        if dx is None:
            problems.append(Violation("lrs3", f"node {x} has no tree decomposition"))
        else:
            problems += [Violation("lrs3", f"node {x}: {p}") for p in validate_td(tg, dx)]
        lx = lrs.layerings.get(x)
        if lx is None:
            problems.append(Violation("lrs4", f"node {x} has no layering"))
        else:
            try:
                bad = validate_layering(tg, lx)
            except LayeringError as exc:
                problems.append(Violation("lrs4", f"node {x}: {exc}"))
            else:
                if bad is not None:
                    problems.append(Violation("lrs4", f"node {x}: edge {bad} skips a layer"))
        if dx is not None and lx is not None:
            for z, bag in sorted(dx.bags.items(), key=lambda kv: _node_key(kv[0])):
                for i, layer in enumerate(lx.layers):
                    if len(bag & layer) > c:
                        problems.append(
                            Violation("lrs5", f"node {x}, bag {z}, layer {i}: {len(bag & layer)} > {c}")
                        )
    return problems


def layered_width(td: TreeDecomposition, layering: Layering) -> int:
    return max((len(b & layer) for b in td.bags.values() for layer in layering.layers), default=0)


def lrs_from_layered_td(g: Graph, td: TreeDecomposition, layering: Layering, c: int | None = None):
    """Single-node LRS (A = empty) from a layered tree decomposition of g."""
    problems = validate_td(g, td)
    if problems:
        raise LRSError("invalid tree decomposition: " + "; ".join(map(str, problems)))
    if validate_layering(g, layering) is not None:
        raise LRSError("invalid layering")
    width = max(1, layered_width(td, layering))
    if c is None:
        c = width
    elif width > c:
        raise LRSError(f"bag/layer intersections reach {width} > c = {c}")
    return LayeredRSDecomposition(
        c=c,
        bags={0: g.vertex_set},
        tree_edges=(),
        apex={0: frozenset()},
        tds={0: td},
        layerings={0: layering},
        root=0,
    )


def grid_path_decomposition(rows: int, cols: int) -> TreeDecomposition:
    """Staircase path decomposition of the rows x cols grid.

    Between columns j and j+1 the bags move one row at a time, so every bag
    meets every row in at most two vertices.
    """
    if cols == 1 or rows == 0:
        return TreeDecomposition({0: frozenset(range(rows * cols))}, ())
    bags = []
    for j in range(cols - 1):
        for k in range(rows):
            left = {r * cols + j for r in range(k, rows)}
            right = {r * cols + j + 1 for r in range(0, k + 1)}
            bags.append(frozenset(left | right))
    return TreeDecomposition(dict(enumerate(bags)), tuple((i, i + 1) for i in range(len(bags) - 1)))


def grid_instance(rows: int, cols: int) -> tuple[Graph, LayeredRSDecomposition]:
    """Grid graph with a width-2 single-node LRS: layers are rows."""
    g = grid_graph(rows, cols)
    layering = Layering(tuple(frozenset(r * cols + c for c in range(cols)) for r in range(rows)))
    return g, lrs_from_layered_td(g, grid_path_decomposition(rows, cols), layering, c=2)


def path_td(vertices: Sequence[int]) -> TreeDecomposition:
    """Path decomposition with consecutive-pair bags (single bag for < 2 vertices)."""
    vertices = list(vertices)
    if len(vertices) < 2:
        return TreeDecomposition({0: frozenset(vertices)}, ())
    bags = {i: frozenset(vertices[i:i + 2]) for i in range(len(vertices) - 1)}
    return TreeDecomposition(bags, tuple((i, i + 1) for i in range(len(bags) - 1)))


@dataclass(frozen=True)
class GluedPair:
    """Normal pair built from an LRS, with the bookkeeping good colorings need.

    ``origin[node] = (x, z)`` names the LRS node x and node z of D_x behind
    each glued node; part ``i`` collects the nodes coming from ``part_node[i]``.
    """

    pair: NormalPair
    origin: Mapping[int, tuple[int, object]]
    part_node: tuple[int, ...]


def _attach_node(td: TreeDecomposition, need: frozenset[int]):
    for z in td.nodes:
        if need <= td.bags[z]:
            return z
    return None


def glue_to_normal_pair(g: Graph, lrs: LayeredRSDecomposition, vertices: Iterable[int] | None = None) -> GluedPair:
    """Tree decomposition of g[vertices] glued from the D_x, with apices added.

    Bag of (x, z) is (D_{x,z} | A_x) restricted to ``vertices``.  For every
    tree edge xy we attach z_xy in D_x and z_yx in D_y that contain the
    non-apex part of the adhesion W_x & W_y (smallest node ids win).
    """
    keep = g.vertex_set if vertices is None else frozenset(vertices)
    node_of: dict[tuple[int, object], int] = {}
    bags: dict[int, frozenset[int]] = {}
    origin: dict[int, tuple[int, object]] = {}
    part_node = tuple(lrs.nodes)
    parts = []
    for x in part_node:
        dx = lrs.tds[x]
        members = []
        for z in dx.nodes:
            k = len(bags)
            node_of[(x, z)] = k
            origin[k] = (x, z)
            bags[k] = (dx.bags[z] | lrs.apex[x]) & keep
            members.append(k)
        parts.append(frozenset(members))
    edges = []
    for x in part_node:
        for a, b in lrs.tds[x].edges:
            edges.append((node_of[(x, a)], node_of[(x, b)]))
    for x, y in lrs.tree_edges:
        adh = lrs.bags[x] & lrs.bags[y]
        zx = _attach_node(lrs.tds[x], adh - lrs.apex[x])
        zy = _attach_node(lrs.tds[y], adh - lrs.apex[y])
        if zx is None or zy is None:
            raise LRSError(f"adhesion of tree edge {x}-{y} is not inside a single bag of both torso decompositions")
        edges.append((node_of[(x, zx)], node_of[(y, zy)]))
    td = TreeDecomposition(bags, tuple(edges))
    pair = NormalPair(td, tuple(parts))
    for i, p in enumerate(pair.parts):
        if len(tree_components(p, td.edges)) != 1:
            raise LRSError(f"part of LRS node {part_node[i]} is not a subtree")
    return GluedPair(pair, origin, part_node)
