"""Simple undirected graphs and the primitive operations built on them.

Vertices are integers.  Graphs built from scratch use ``0..n-1``; induced
subgraphs keep the identifiers of their parent so that bags, layers and
colorings can be shared between a graph and its subgraphs without remapping.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    adj: Mapping[int, frozenset[int]]
    _edges: frozenset[tuple[int, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj = {int(v): frozenset(ns) for v, ns in self.adj.items()}
        edges = set()
        for v, ns in adj.items():
            if v in ns:
                raise GraphError(f"self-loop at {v}")
            for u in ns:
                if u not in adj or v not in adj[u]:
                    raise GraphError(f"asymmetric adjacency {v}-{u}")
                edges.add((min(u, v), max(u, v)))
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "_edges", frozenset(edges))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        adj: dict[int, set[int]] = {v: set() for v in range(n)}
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                raise GraphError(f"edge {u}-{v} outside 0..{n - 1}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    @classmethod
    def on_vertices(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            if u == v or u not in adj or v not in adj:
                raise GraphError(f"bad edge {u}-{v}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.adj)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def m(self) -> int:
        return len(self._edges)

    def __contains__(self, v) -> bool:
        return v in self.adj

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def neighborhood(self, xs: Iterable[int]) -> set[int]:
        """Open neighbourhood N(X): neighbours of X outside X."""
        xs = set(xs)
        out: set[int] = set()
        for v in xs:
            out |= self.adj[v]
        return out - xs

    def induced(self, vs: Iterable[int]) -> "Graph":
        vs = set(vs)
        missing = vs - self.adj.keys()
        if missing:
            raise GraphError(f"vertices {sorted(missing)} not in graph")
        return Graph({v: self.adj[v] & vs for v in vs})

    def remove(self, vs: Iterable[int]) -> "Graph":
        return self.induced(self.adj.keys() - set(vs))

    def components(self) -> list[frozenset[int]]:
        return connected_components(self)

    def is_connected(self) -> bool:
        """Nonnull and connected."""
        return self.n > 0 and len(connected_components(self)) == 1

    def is_connected_set(self, vs: Iterable[int]) -> bool:
        vs = set(vs)
        if not vs:
            return False
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in self.adj[v]:
                if u in vs and u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(vs)

    def relabel_dense(self) -> tuple["Graph", list[int]]:
        """Copy on ``0..n-1`` plus the list mapping new ids to old ones."""
        old = self.vertices
        new_of = {v: i for i, v in enumerate(old)}
        return Graph.from_edges(len(old), ((new_of[u], new_of[v]) for u, v in self._edges)), old


@dataclass(frozen=True)
class VertexPartition:
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(frozenset(p) for p in self.parts))

    @property
    def part_of(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}

    def validate(self, vertices: Iterable[int]) -> None:
        vertices = set(vertices)
        seen: set[int] = set()
        for i, p in enumerate(self.parts):
            if not p:
                raise GraphError(f"part {i} is empty")
            if p & seen:
                raise GraphError(f"part {i} overlaps earlier parts on {sorted(p & seen)}")
            seen |= p
        if seen != vertices:
            raise GraphError(
                f"partition does not cover the vertex set exactly "
                f"(missing {sorted(vertices - seen)}, extra {sorted(seen - vertices)})"
            )

    def __len__(self) -> int:
        return len(self.parts)


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Components ordered by their smallest vertex."""
    seen: set[int] = set()
    comps = []
    for s in g.vertices:
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in g.adj[v]:
                if u not in comp:
                    comp.add(u)
                    queue.append(u)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def bfs_distances(g: Graph, roots: Iterable[int]) -> dict[int, int]:
    dist = {r: 0 for r in roots}
    queue = deque(sorted(dist))
    while queue:
        v = queue.popleft()
        for u in sorted(g.adj[v]):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def shortest_path(g: Graph, sources: Iterable[int], targets: Iterable[int], allowed=None) -> list[int] | None:
    """Shortest path from any source to any target using only ``allowed`` vertices
    (sources and targets are always allowed)."""
    targets = set(targets)
    sources = sorted(set(sources))
    prev: dict[int, int | None] = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        if v in targets:
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for u in sorted(g.adj[v]):
            if u in prev:
                continue
            if allowed is not None and u not in allowed and u not in targets:
                continue
            prev[u] = v
            queue.append(u)
    return None


def quotient(g: Graph, partition: VertexPartition | Sequence[Iterable[int]]) -> tuple[Graph, dict[int, int]]:
    """G/P with vertex ``i`` standing for part ``i``; also returns vertex -> part index."""
    if not isinstance(partition, VertexPartition):
        partition = VertexPartition(tuple(frozenset(p) for p in partition))
    partition.validate(g.vertices)
    part_of = partition.part_of
    edges = {
        (min(part_of[u], part_of[v]), max(part_of[u], part_of[v]))
        for u, v in g.edges
        if part_of[u] != part_of[v]
    }
    return Graph.from_edges(len(partition), edges), part_of


def torso(g: Graph, w: Iterable[int]) -> Graph:
    """Graph on ``w``; ``uv`` is an edge iff some u-v path has no interior vertex in ``w``."""
    w = set(w)
    adj: dict[int, set[int]] = {v: set(g.adj[v] & w) for v in w}
    outside = g.remove(w) if w else g
    for comp in connected_components(outside) if outside.n else []:
        attach = sorted(g.neighborhood(comp) & w)
        for u, v in itertools.combinations(attach, 2):
            adj[u].add(v)
            adj[v].add(u)
    return Graph(adj)


def contract_parts(
    g: Graph, parts: Sequence[Iterable[int]], base: int | None = None
) -> tuple[Graph, dict[int, frozenset[int]]]:
    """Contract each (connected, disjoint) part to a single fresh vertex.

    Uncontracted vertices keep their identifiers; part ``k`` becomes vertex
    ``base + k`` (default base: ``max(V(g)) + 1``).  Returns the minor and
    the vertex -> origin-set map (uncontracted vertices map to singletons).
    """
    parts = [frozenset(p) for p in parts]
    used: set[int] = set()
    for p in parts:
        if not p:
            raise GraphError("empty part")
        if p & used:
            raise GraphError("parts are not disjoint")
        if not g.is_connected_set(p):
            raise GraphError(f"part {sorted(p)} does not induce a connected subgraph")
        used |= p
    if base is None:
        base = max(g.adj, default=-1) + 1
    elif base <= max(g.adj, default=-1):
        raise GraphError("fresh labels would collide with existing vertices")
    rep = {v: v for v in g.adj if v not in used}
    origin = {v: frozenset([v]) for v in rep}
    for k, p in enumerate(parts):
        for v in p:
            rep[v] = base + k
        origin[base + k] = p
    adj: dict[int, set[int]] = {x: set() for x in origin}
    for u, v in g.edges:
        a, b = rep[u], rep[v]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return Graph(adj), origin


def enumerate_connected_sets(g: Graph, max_size: int | None = None, within=None) -> Iterator[frozenset[int]]:
    """Every connected vertex set (of size <= max_size) exactly once.

    Sets are grown from their smallest vertex; a candidate is either taken or
    banned for the rest of the branch, so no set is produced twice.
    """
    allowed = set(g.adj) if within is None else set(within) & set(g.adj)
    adj = g.adj
    limit = len(allowed) if max_size is None else max_size
    if limit <= 0:
        return

    def grow(current: frozenset[int], frontier: list[int], banned: set[int], low: int):
        yield current
        if len(current) >= limit:
            return
        for i, w in enumerate(frontier):
            new_banned = banned | set(frontier[:i])
            new_set = current | {w}
            rest = frontier[i + 1:]
            extra = sorted(
                u for u in adj[w]
                if u > low and u in allowed and u not in new_set and u not in new_banned and u not in rest
            )
            yield from grow(new_set, rest + extra, new_banned, low)

    for v in sorted(allowed):
        frontier = sorted(u for u in adj[v] if u > v and u in allowed)
        yield from grow(frozenset([v]), frontier, set(), v)


def is_model(g: Graph, branch_sets: Sequence[Iterable[int]], target: Graph | None = None) -> bool:
    """Whether ``branch_sets`` is a model of ``target`` (default: a clique) in ``g``."""
    return not model_violations(g, branch_sets, target)


def model_violations(g: Graph, branch_sets: Sequence[Iterable[int]], target: Graph | None = None) -> list[str]:
    sets = [frozenset(b) for b in branch_sets]
    if target is None:
        target = Graph.from_edges(len(sets), itertools.combinations(range(len(sets)), 2))
    problems = []
    if target.n != len(sets):
        problems.append(f"expected {target.n} branch sets, got {len(sets)}")
        return problems
    seen: set[int] = set()
    for i, b in enumerate(sets):
        if not b <= g.vertex_set:
            problems.append(f"branch set {i} has vertices outside the graph")
        elif not g.is_connected_set(b):
            problems.append(f"branch set {i} is not connected")
        if b & seen:
            problems.append(f"branch set {i} overlaps an earlier one")
        seen |= b
    for x, y in sorted(target.edges):
        if not any(g.adj.get(u, frozenset()) & sets[y] for u in sets[x]):
            problems.append(f"no edge between branch sets {x} and {y}")
    return problems


def has_kt_minor(g: Graph, t: int) -> tuple[bool, list[frozenset[int]] | None]:
    """Exact K_t-minor test by search over connected branch sets (small graphs only).

    Branch sets are chosen in increasing order of their smallest vertex; each
    new set must be disjoint from and adjacent to all earlier ones.
    """
    if t <= 0:
        return True, []
    if g.n < t:
        return False, None
    if t == 1:
        return True, [frozenset([g.vertices[0]])]
    # t branch sets need t(t-1)/2 edges, and t vertices of degree >= t-1 in some minor
    if g.m < t * (t - 1) // 2:
        return False, None
    candidates = sorted(enumerate_connected_sets(g, max_size=g.n - t + 1), key=lambda s: (min(s), len(s), sorted(s)))
    touching = {}
    for s in candidates:
        touching[s] = g.neighborhood(s)

    def search(chosen: list[frozenset[int]], used: frozenset[int], start: int):
        if len(chosen) == t:
            return list(chosen)
        remaining = g.n - len(used)
        if remaining < t - len(chosen):
            return None
        for idx in range(start, len(candidates)):
            s = candidates[idx]
            if s & used:
                continue
            if chosen and min(s) <= min(chosen[-1]):
                continue
            if all(touching[s] & c for c in chosen):
                found = search(chosen + [s], used | s, idx + 1)
                if found:
                    return found
        return None

    found = search([], frozenset(), 0)
    return (True, found) if found else (False, None)


def grid_graph(rows: int, cols: int) -> Graph:
    """rows x cols grid; vertex ``r * cols + c`` sits in row r, column c."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def is_isomorphic(a: Graph, b: Graph) -> bool:
    """Brute-force isomorphism test; fine for the handful of vertices used in tests."""
    if a.n != b.n or a.m != b.m:
        return False
    if sorted(len(a.adj[v]) for v in a.adj) != sorted(len(b.adj[v]) for v in b.adj):
        return False
    av, bv = a.vertices, b.vertices
    target = {frozenset(e) for e in b.edges}
    for perm in itertools.permutations(bv):
        phi = dict(zip(av, perm))
        if all(frozenset((phi[u], phi[v])) in target for u, v in a.edges):
            return True
    return False
