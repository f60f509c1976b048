"""Recursive partition into parts with local colorings, and the final coloring.

``build_partition`` returns a partition P of V(G), a tree decomposition of
G/P of width <= t - 2, an elimination ordering sigma of the parts and, for
each part that is not a designated R-set, a coloring psi_P such that every
connected H in the union of the parts from P onward (in sigma) meeting P has
> p phi-colors or a (phi x psi_P)-center on V(H) & P.

If the good-witness step finds too many disjoint members, the input cannot
be K_t-minor-free and a concrete K_t model is returned instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import bounds
from .centered import center_of, relabel, tw_backend, verify_p_centered
from .decomposition import (
    Packing,
    TreeDecomposition,
    validate_elimination_order,
    validate_td,
)
from .good_coloring import GoodnessWitness, good_witness, phi_from_lrs
from .graph import Graph, connected_components, contract_parts, enumerate_connected_sets, model_violations, quotient
from .layered import LayeredRSDecomposition, validate_lrs

log = logging.getLogger(__name__)

Part = frozenset


class PartitionError(ValueError):
    pass


def family_member_in(g: Graph, r_sets: Sequence[Iterable[int]], s: Iterable[int]) -> frozenset[int] | None:
    """A component of g[S - R] with a neighbour in every R_i (smallest first), or None."""
    r_sets = [frozenset(r) for r in r_sets]
    rest = (frozenset(s) & g.vertex_set) - frozenset().union(*r_sets)
    if not rest:
        return None
    for comp in connected_components(g.induced(rest)):
        nbrs = g.neighborhood(comp)
        if all(nbrs & r for r in r_sets):
            return comp
    return None


@dataclass
class MinorCertificate:
    """A K_t model in the input graph, found from d + 1 disjoint family members."""

    t: int
    branch_sets: list[frozenset[int]]
    members: list[frozenset[int]]

    def violations(self, g: Graph) -> list[str]:
        return model_violations(g, self.branch_sets)


@dataclass
class PartitionResult:
    parts: tuple[frozenset[int], ...]
    td: TreeDecomposition
    sigma: list[int]
    psi: dict[int, dict[int, int]]
    R: list[int]
    s: int
    stats: dict = field(default_factory=dict)

    def part_of(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}

    def quotient(self, g: Graph) -> Graph:
        return quotient(g, self.parts)[0]


@dataclass
class _Local:
    bags: dict[int, frozenset[Part]]
    edges: list[tuple[int, int]]
    sigma: list[Part]
    psi: dict[Part, dict[int, int]]
    s: int

    def replace(self, old: Part, new: Part) -> "_Local":
        def sub(p):
            return new if p == old else p

        return _Local(
            {x: frozenset(sub(p) for p in b) for x, b in self.bags.items()},
            self.edges,
            [sub(p) for p in self.sigma],
            {sub(p): c for p, c in self.psi.items()},
            self.s,
        )


class _Certificate(Exception):
    def __init__(self, cert: MinorCertificate):
        super().__init__("K_t model found")
        self.cert = cert


class _Builder:
    def __init__(self, g: Graph, t: int, p: int, lrs: LayeredRSDecomposition, phi: Mapping[int, int]):
        self.g0 = g
        self.t = t
        self.p = p
        self.lrs = lrs
        self.phi = phi
        self.d = bounds.packing_d(t)
        self.next_node = 0
        self.next_label = max(g.adj, default=-1) + 1
        self.origin: dict[int, frozenset[int]] = {}
        self.stats = {"calls": 0, "main": 0, "witnesses": []}

    def node(self) -> int:
        self.next_node += 1
        return self.next_node - 1

    def expand(self, vs: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        stack = list(vs)
        while stack:
            v = stack.pop()
            if v in self.origin:
                stack.extend(self.origin[v])
            else:
                out.add(v)
        return frozenset(out)

    def run(self, g: Graph, r_sets: list[Part], measure: tuple[int, int] | None) -> _Local:
        self.stats["calls"] += 1
        rest = g.vertex_set - frozenset().union(*r_sets)
        new_measure = (len(rest), len(r_sets))
        if measure is not None:
            # the padding step raises r with |V(G-R)| falling, so compare lexicographically
            bounds.check_true("recursion measure decreases", new_measure < measure, f"{new_measure} vs {measure}")
        t = self.t
        if not rest:
            s = self.node()
            return _Local({s: frozenset(r_sets)}, [], list(r_sets), {}, s)
        if len(r_sets) < t - 2:
            v = min(rest)
            single = Part([v])
            sub = self.run(g, r_sets + [single], new_measure)
            sub.psi[single] = {v: 1}
            return sub
        comps = connected_components(g.induced(rest))
        if len(comps) > 1:
            s = self.node()
            bags = {s: frozenset(r_sets)}
            edges: list[tuple[int, int]] = []
            sigma = list(r_sets)
            psi: dict[Part, dict[int, int]] = {}
            for comp in comps:
                sub = self.run(g.induced(comp | frozenset().union(*r_sets)), r_sets, new_measure)
                bags.update(sub.bags)
                edges += sub.edges + [(s, sub.s)]
                sigma += sub.sigma[len(r_sets):]
                psi.update(sub.psi)
            return _Local(bags, edges, sigma, psi, s)
        for i, r in enumerate(r_sets):
            if not (g.neighborhood(r) & rest):
                sub = self.run(g.remove(r), r_sets[:i] + r_sets[i + 1:], new_measure)
                s = self.node()
                sub.bags[s] = frozenset(r_sets)
                sub.edges.append((s, sub.s))
                sub.sigma.insert(i, r)
                return _Local(sub.bags, sub.edges, sub.sigma, sub.psi, s)
        return self.main_case(g, r_sets, rest, new_measure)

    def main_case(self, g: Graph, r_sets: list[Part], rest: frozenset[int], measure) -> _Local:
        self.stats["main"] += 1

        def oracle(s):
            return family_member_in(g, r_sets, s)

        wit = good_witness(self.g0, self.lrs, self.p, oracle, self.d, vertices=rest)
        if isinstance(wit, Packing):
            raise _Certificate(self.certificate(g, r_sets, rest, wit))
        assert isinstance(wit, GoodnessWitness)
        self.stats["witnesses"].append(len(wit.Z))
        z = Part(wit.Z)
        bounds.check_true("Z nonempty", bool(z))
        s = self.node()
        bags = {s: frozenset(r_sets) | {z}}
        edges: list[tuple[int, int]] = []
        sigma = list(r_sets) + [z]
        psi = {z: dict(wit.psi)}
        rest_g = g.induced(rest)
        for comp in connected_components(rest_g.remove(z)):
            nbr_ok = [bool(g.neighborhood(comp) & r) for r in r_sets]
            if all(nbr_ok):
                raise bounds.BoundViolation("hitting set", f"component {sorted(comp)} avoids Z but is a member")
            i = nbr_ok.index(False)
            others = connected_components(rest_g.remove(comp))
            bounds.check_true("1 <= |Z_C| <= 2", 1 <= len(others) <= 2, f"{len(others)} contracted vertices")
            gc, origin = contract_parts(g.remove(r_sets[i]), others, base=self.next_label)
            zc = Part(range(self.next_label, self.next_label + len(others)))
            for k in zc:
                self.origin[k] = origin[k]
            self.next_label += len(others)
            rc = sorted([r for j, r in enumerate(r_sets) if j != i] + [zc], key=min)
            sub = self.run(gc, rc, measure).replace(zc, z)
            bags.update(sub.bags)
            edges += sub.edges + [(s, sub.s)]
            sigma += sub.sigma[len(rc):]
            psi.update(sub.psi)
        return _Local(bags, edges, sigma, psi, s)

    def certificate(self, g: Graph, r_sets: list[Part], rest: frozenset[int], pack: Packing) -> MinorCertificate:
        t = self.t
        groups: dict[tuple, list[frozenset[int]]] = {}
        for h in pack.members:
            nbrs = g.neighborhood(h)
            key = tuple(min(r & nbrs) for r in r_sets)
            groups.setdefault(key, []).append(h)
        key, members = max(groups.items(), key=lambda kv: (len(kv[1]), [-x for x in kv[0]]))
        if len(members) < t:
            raise PartitionError("pigeonhole failed: too few members share neighbours")
        members = members[:t]
        used = frozenset().union(*members)
        a_idx, b_idx, path = self._link(g.induced(rest), members, used)
        order = [j for j in range(t) if j not in (a_idx, b_idx)] + [a_idx, b_idx]
        branch = []
        for pos, j in enumerate(order):
            bset = set(members[j])
            if pos < t - 2:
                bset.add(key[pos])
            if j == b_idx:
                bset |= path
            branch.append(self.expand(bset))
        cert = MinorCertificate(t, branch, [self.expand(m) for m in members])
        problems = cert.violations(self.g0)
        if problems:
            raise PartitionError("assembled K_t model is invalid: " + "; ".join(problems))
        return cert

    @staticmethod
    def _link(rest_g: Graph, members: list[frozenset[int]], used: frozenset[int]):
        """Two members joined by a path whose interior avoids every member."""
        owner = {v: j for j, m in enumerate(members) for v in m}
        for u, v in sorted(rest_g.edges):
            if u in owner and v in owner and owner[u] != owner[v]:
                return owner[u], owner[v], set()
        free = rest_g.remove(used)
        for comp in connected_components(free):
            touched = sorted({owner[w] for w in rest_g.neighborhood(comp) if w in owner})
            if len(touched) >= 2:
                a, b = touched[:2]
                start = {v for v in comp if rest_g.adj[v] & members[a]}
                goal = {v for v in comp if rest_g.adj[v] & members[b]}
                dist = {v: None for v in start}
                frontier = sorted(start)
                while frontier:
                    nxt = []
                    for v in frontier:
                        if v in goal:
                            path = {v}
                            while dist[v] is not None:
                                v = dist[v]
                                path.add(v)
                            return a, b, path
                        for w in sorted(rest_g.adj[v] & comp):
                            if w not in dist:
                                dist[w] = v
                                nxt.append(w)
                    frontier = nxt
        raise PartitionError("members are not linked in G - R")


def build_partition(
    g: Graph,
    t: int,
    p: int,
    lrs: LayeredRSDecomposition,
    r_sets: Sequence[Iterable[int]] = (),
    phi: Mapping[int, int] | None = None,
) -> PartitionResult | MinorCertificate:
    if t < 2:
        raise PartitionError("t must be at least 2")
    if p < 1:
        raise PartitionError("p must be positive")
    r_sets = [Part(r) for r in r_sets]
    if len(r_sets) > t - 2:
        raise PartitionError(f"at most t - 2 = {t - 2} R-sets allowed")
    seen: set[int] = set()
    for r in r_sets:
        if not 1 <= len(r) <= 2 or not r <= g.vertex_set or r & seen:
            raise PartitionError(f"invalid R-set {sorted(r)}")
        seen |= r
    problems = validate_lrs(g, lrs)
    if problems:
        raise PartitionError("invalid LRS: " + "; ".join(map(str, problems[:5])))
    if phi is None:
        phi = phi_from_lrs(g, lrs, p)
    builder = _Builder(g, t, p, lrs, phi)
    try:
        local = builder.run(g, r_sets, None)
    except _Certificate as exc:
        return exc.cert
    index = {part: i for i, part in enumerate(local.sigma)}
    if sorted(v for part in index for v in part) != g.vertices:
        raise PartitionError("parts do not partition the vertex set")
    td = TreeDecomposition(
        {x: frozenset(index[part] for part in b) for x, b in local.bags.items()}, tuple(local.edges)
    )
    psi = {index[part]: col for part, col in local.psi.items()}
    stats = {k: v for k, v in builder.stats.items()}
    return PartitionResult(tuple(local.sigma), td, list(range(len(local.sigma))), psi, list(range(len(r_sets))), local.s, stats)


# ---------------------------------------------------------------- verification


def item_c_violation(g: Graph, res: PartitionResult, phi: Mapping[int, int], p: int) -> tuple[int, frozenset[int]] | None:
    """Exhaustive check of the part-local centre property; returns (part, H) on failure.

    A connected H lies in the suffix of P and meets P exactly when P is the
    sigma-first part meeting H, so one pass over the connected sets suffices.
    """
    part_of = res.part_of()
    pos = {part: k for k, part in enumerate(res.sigma)}
    r_parts = set(res.R)
    for h in enumerate_connected_sets(g):
        first = min((part_of[v] for v in h), key=pos.__getitem__)
        if first in r_parts:
            continue
        if len({phi[v] for v in h}) > p:
            continue
        core = h & res.parts[first]
        psi = res.psi[first]
        if center_of(core, {v: (phi[v], psi[v]) for v in core}) is None:
            return first, h
    return None


def partition_violations(
    g: Graph, t: int, p: int, res: PartitionResult, phi: Mapping[int, int] | None = None,
    c: int | None = None, exhaustive: bool = True,
) -> list[str]:
    problems = []
    seen: set[int] = set()
    for i, part in enumerate(res.parts):
        if not part:
            problems.append(f"part {i} is empty")
        if part & seen:
            problems.append(f"part {i} overlaps another part")
        seen |= part
    if seen != g.vertex_set:
        problems.append("parts do not cover the vertex set")
        return problems
    qg = res.quotient(g)
    problems += [f"quotient decomposition: {v}" for v in validate_td(qg, res.td)]
    if res.td.width > t - 2:
        problems.append(f"width {res.td.width} > t - 2")
    if sorted(res.sigma) != list(range(len(res.parts))):
        problems.append("sigma is not an ordering of the parts")
    elif not problems:
        bad = validate_elimination_order(res.td, res.sigma)
        if bad is not None:
            problems.append(f"sigma breaks the elimination condition at position {bad}")
    if res.sigma[: len(res.R)] != res.R:
        problems.append("R-sets are not the first parts of sigma")
    if not any(set(res.R) <= b for b in res.td.bags.values()):
        problems.append("no bag holds every R-set")
    limit = None if c is None else bounds.c22(t, c)
    for i in range(len(res.parts)):
        if i in res.R:
            continue
        psi = res.psi.get(i)
        if psi is None or set(psi) != res.parts[i]:
            problems.append(f"part {i} has no coloring on exactly its vertices")
        elif limit is not None and not all(1 <= x <= limit for x in psi.values()):
            problems.append(f"part {i} coloring leaves [1, {limit}]")
    if exhaustive and phi is not None and not problems:
        bad_c = item_c_violation(g, res, phi, p)
        if bad_c is not None:
            problems.append(f"part {bad_c[0]} has no centre on {sorted(bad_c[1])}")
    return problems


# -------------------------------------------------------------- final coloring


def good_to_rho(g: Graph, t: int, p: int, res: PartitionResult, phi: Mapping[int, int], c: int) -> dict[int, tuple]:
    """rho(u) = (phi(u), psi_P(u)) for the part P holding u."""
    if res.R:
        raise PartitionError("rho needs a partition built without R-sets")
    part_of = res.part_of()
    rho = {v: (phi[v], res.psi[part_of[v]][v]) for v in g.vertices}
    bounds.check_le("rho palette <= c22 (p+1)", len(set(rho.values())), bounds.c22(t, c) * (p + 1))
    return rho


@dataclass
class ColoringResult:
    zeta: dict[int, int]
    xi: dict[int, int]
    rho: dict[int, tuple]
    phi: dict[int, int]
    partition: PartitionResult

    @property
    def palette(self) -> int:
        return len(set(self.zeta.values()))


def theorem1_coloring(
    g: Graph,
    t: int,
    p: int,
    lrs: LayeredRSDecomposition,
    backend: str = "ps19",
    verify: str | None = "auto",
) -> ColoringResult | MinorCertificate:
    """zeta(u) = (xi(P), rho(u)) with xi an ordered p-centered coloring of G/P.

    ``verify``: "exact", "sampled", "auto" (exact up to 16 vertices) or None.
    """
    phi = phi_from_lrs(g, lrs, p)
    res = build_partition(g, t, p, lrs, (), phi)
    if isinstance(res, MinorCertificate):
        return res
    rho = good_to_rho(g, t, p, res, phi, lrs.c)
    qg = res.quotient(g)
    xi = tw_backend(qg, res.td, res.sigma, p, backend)
    part_of = res.part_of()
    zeta = relabel({v: (xi[part_of[v]], rho[v]) for v in g.vertices})
    result = ColoringResult(zeta, xi, rho, dict(phi), res)
    bounds.check_le("palette <= c22 (p+1)^(t-1)", result.palette, bounds.palette_bound(t, lrs.c, p))
    if verify:
        mode = verify if verify != "auto" else ("exact" if g.n <= 16 else "sampled")
        report = verify_p_centered(g, zeta, p, mode=mode)
        if not report.ok:
            raise bounds.BoundViolation("zeta is p-centered", f"violation on {sorted(report.violation)}")
    return result
