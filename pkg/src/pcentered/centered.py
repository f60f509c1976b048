"""Centered-coloring oracles, exact chi_p on tiny graphs, and ordered backends."""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass
from itertools import product as _iproduct
from typing import Hashable, Iterable, Mapping, Sequence

from . import bounds
from .decomposition import TreeDecomposition, validate_elimination_order, validate_td
from .graph import Graph, connected_components, enumerate_connected_sets

log = logging.getLogger(__name__)

Coloring = Mapping[int, Hashable]


class BackendError(RuntimeError):
    pass


def product(c1: Coloring, c2: Coloring) -> dict[int, tuple]:
    if set(c1) != set(c2):
        raise ValueError("colorings have different domains")
    return {v: (c1[v], c2[v]) for v in c1}


def palette(coloring: Coloring) -> set:
    return set(coloring.values())


def relabel(coloring: Coloring) -> dict[int, int]:
    """Colors renamed 0, 1, ... in order of first appearance by vertex id."""
    names: dict = {}
    out = {}
    for v in sorted(coloring):
        out[v] = names.setdefault(coloring[v], len(names))
    return out


def center_of(vs: Iterable[int], coloring: Coloring) -> int | None:
    """Smallest vertex whose color appears exactly once on ``vs``, if any."""
    vs = sorted(vs)
    counts = Counter(coloring[v] for v in vs)
    for v in vs:
        if counts[coloring[v]] == 1:
            return v
    return None


def is_violation(vs: Iterable[int], coloring: Coloring, p: int) -> bool:
    colors = [coloring[v] for v in vs]
    counts = Counter(colors)
    return len(counts) <= p and 1 not in counts.values()


@dataclass
class CenteredReport:
    ok: bool
    violation: frozenset[int] | None
    checked: int
    mode: str

    def __bool__(self):
        return self.ok


def random_connected_set(g: Graph, rng: random.Random, size: int | None = None) -> frozenset[int]:
    """Grow a connected set from a random vertex by adding random frontier vertices."""
    vs = g.vertices
    start = rng.choice(vs)
    target = size if size is not None else rng.randint(1, len(vs))
    current = {start}
    frontier = set(g.adj[start])
    while len(current) < target and frontier:
        w = rng.choice(sorted(frontier))
        current.add(w)
        frontier |= g.adj[w]
        frontier -= current
    return frozenset(current)


def _candidate_sets(g: Graph, mode: str, samples: int, seed: int):
    if mode == "exact":
        yield from enumerate_connected_sets(g)
    elif mode == "sampled":
        if g.n == 0:
            return
        rng = random.Random(seed)
        for _ in range(samples):
            yield random_connected_set(g, rng)
    else:
        raise ValueError(f"unknown mode {mode!r}")


def verify_p_centered(
    g: Graph, coloring: Coloring, p: int, mode: str = "exact", samples: int = 10_000, seed: int = 0
) -> CenteredReport:
    """Every connected set uses > p colors or has a uniquely colored vertex."""
    missing = g.vertex_set - set(coloring)
    if missing:
        raise ValueError(f"coloring misses vertices {sorted(missing)[:5]}")
    checked = 0
    for h in _candidate_sets(g, mode, samples, seed):
        checked += 1
        if is_violation(h, coloring, p):
            return CenteredReport(False, h, checked, mode)
    return CenteredReport(True, None, checked, mode)


def verify_p_centered_ordered(
    g: Graph, sigma: Sequence[int], coloring: Coloring, p: int, mode: str = "exact",
    samples: int = 10_000, seed: int = 0,
) -> CenteredReport:
    """Like verify_p_centered, but the unique color must sit at min_sigma(H)."""
    pos = {v: i for i, v in enumerate(sigma)}
    if set(pos) != g.vertex_set or len(sigma) != g.n:
        raise ValueError("sigma is not an ordering of the vertex set")
    checked = 0
    for h in _candidate_sets(g, mode, samples, seed):
        checked += 1
        colors = Counter(coloring[v] for v in h)
        if len(colors) > p:
            continue
        low = min(h, key=pos.__getitem__)
        if colors[coloring[low]] != 1:
            return CenteredReport(False, h, checked, mode)
    return CenteredReport(True, None, checked, mode)


def is_proper(g: Graph, coloring: Coloring) -> bool:
    return all(coloring[u] != coloring[v] for u, v in g.edges)


def chromatic_number(g: Graph) -> int:
    """Brute force over all assignments; only for tiny graphs."""
    vs = g.vertices
    if not vs:
        return 0
    for k in range(1, len(vs) + 1):
        for assignment in _iproduct(range(k), repeat=len(vs)):
            if is_proper(g, dict(zip(vs, assignment))):
                return k
    return len(vs)


def _search_order(g: Graph) -> list[int]:
    order: list[int] = []
    for comp in connected_components(g):
        seen = {min(comp)}
        queue = [min(comp)]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(g.adj[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def chi_p_exact(g: Graph, p: int, max_colors: int | None = None) -> tuple[int, dict[int, int]] | None:
    """Least k with a p-centered k-coloring, with a witness; None if above max_colors.

    Backtracking in BFS order; colors are introduced in canonical order and a
    branch dies as soon as a fully colored connected set through the newest
    vertex is a violation (later choices cannot repair it).
    """
    n = g.n
    if n == 0:
        return 0, {}
    order = _search_order(g)
    cap = n if max_colors is None else min(n, max_colors)
    for k in range(1, cap + 1):
        coloring: dict[int, int] = {}

        def extend(i: int, used: int) -> bool:
            if i == n:
                return True
            v = order[i]
            assigned = set(order[:i + 1])
            for c in range(min(used + 1, k)):
                coloring[v] = c
                bad = any(
                    v in h and is_violation(h, coloring, p)
                    for h in enumerate_connected_sets(g, within=assigned)
                )
                if not bad and extend(i + 1, max(used, c + 1)):
                    return True
            del coloring[v]
            return False

        if extend(0, 0):
            return k, dict(coloring)
    return None


# ------------------------------------------------------------- ordered backends


def filled_graph(g: Graph, td: TreeDecomposition) -> Graph:
    """g plus an edge between any two vertices sharing a bag."""
    edges = set(g.edges)
    for bag in td.bags.values():
        b = sorted(bag & g.vertex_set)
        for i, u in enumerate(b):
            for w in b[i + 1:]:
                edges.add((u, w))
    return Graph.on_vertices(g.vertices, edges)


def _treedepth_coloring(g: Graph, td: TreeDecomposition, sigma: Sequence[int], p: int) -> dict[int, int]:
    if td.width > 1:
        raise BackendError(f"treedepth backend needs width <= 1, got {td.width}")
    forest = filled_graph(g, td)
    pos = {v: i for i, v in enumerate(sigma)}
    color: dict[int, int] = {}
    for comp in connected_components(forest):
        root = min(comp, key=pos.__getitem__)
        depth = {root: 0}
        queue = [root]
        while queue:
            v = queue.pop(0)
            for w in sorted(forest.adj[v]):
                if w not in depth:
                    if pos[w] < pos[v]:
                        raise BackendError("sigma does not list every vertex after its parent")
                    depth[w] = depth[v] + 1
                    queue.append(w)
        for v, dv in depth.items():
            color[v] = dv % (p + 1)
    return color


def _greedy_ordered_coloring(g: Graph, td: TreeDecomposition, sigma: Sequence[int], p: int) -> dict[int, int]:
    """Greedy in sigma order on the filled graph.

    v avoids the color of every m reachable from v along a sigma-decreasing
    path whose vertices other than v carry at most p colors.  In the filled
    graph any connected H has such a path from each vertex to min_sigma(H),
    so a repeat of the minimum's color inside H forces more than p colors.
    """
    plus = filled_graph(g, td)
    pos = {v: i for i, v in enumerate(sigma)}
    color: dict[int, int] = {}
    for v in sigma:
        forbidden: set[int] = set()
        seen: set[tuple[int, frozenset]] = set()
        stack = [(v, frozenset())]
        while stack:
            x, cols = stack.pop()
            for y in plus.adj[x]:
                if pos[y] >= pos[x]:
                    continue
                ncols = cols | {color[y]}
                if len(ncols) > p or (y, ncols) in seen:
                    continue
                seen.add((y, ncols))
                forbidden.add(color[y])
                stack.append((y, ncols))
        c = 0
        while c in forbidden:
            c += 1
        color[v] = c
    return color


BACKENDS = ("identity", "treedepth", "ps19")


def tw_backend(
    g: Graph, td: TreeDecomposition, sigma: Sequence[int], p: int, which: str = "ps19", verify: bool = True
) -> dict[int, int]:
    """Ordered p-centered coloring of g w.r.t. sigma, re-verified before returning."""
    problems = validate_td(g, td)
    if problems:
        raise BackendError("invalid tree decomposition: " + "; ".join(map(str, problems)))
    bad = validate_elimination_order(td, sigma)
    if bad is not None:
        raise BackendError(f"sigma is not an elimination ordering (position {bad})")
    if which == "identity":
        coloring = {v: i for i, v in enumerate(sigma)}
    elif which == "treedepth":
        coloring = _treedepth_coloring(g, td, sigma, p)
    elif which == "ps19":
        coloring = _greedy_ordered_coloring(g, td, sigma, p)
    else:
        raise ValueError(f"unknown backend {which!r}; choose from {BACKENDS}")
    if verify:
        mode = "exact" if g.n <= 20 else "sampled"
        report = verify_p_centered_ordered(g, sigma, coloring, p, mode=mode)
        if not report.ok:
            raise bounds.BoundViolation(f"{which} backend", f"ordered violation on {sorted(report.violation)}")
    return coloring
