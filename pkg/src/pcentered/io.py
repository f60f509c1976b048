"""Text formats.  Vertices are 1-indexed on disk and 0-indexed in memory.

.gr        ``p gr n m`` (``p tw`` also accepted), then one ``u v`` line per edge
.td        ``s td bags width+1 n``, ``b id v1 v2 ...`` lines, then ``a b`` tree edges
.lrs.json  {c, tree: {nodes, edges, root}, nodes: [{id, bag, apex, td: {bags, edges}, layering}]}
coloring   ``vertex color`` lines
"""

from __future__ import annotations

import json
from pathlib import Path

from .decomposition import TreeDecomposition
from .graph import Graph
from .layered import LayeredRSDecomposition, Layering


class FormatError(ValueError):
    pass


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("c"):
            yield no, line.split()


def _ints(tokens, no):
    try:
        return [int(x) for x in tokens]
    except ValueError:
        raise FormatError(f"line {no}: expected integers, got {' '.join(tokens)!r}") from None


def parse_gr(text: str) -> Graph:
    n = m = None
    edges = []
    for no, tok in _lines(text):
        if tok[0] == "p":
            if n is not None:
                raise FormatError(f"line {no}: second header")
            if len(tok) != 4 or tok[1] not in ("gr", "tw"):
                raise FormatError(f"line {no}: malformed header")
            n, m = _ints(tok[2:], no)
            continue
        if n is None:
            raise FormatError(f"line {no}: edge before header")
        u, v = _ints(tok, no) if len(tok) == 2 else (None, None)
        if u is None:
            raise FormatError(f"line {no}: an edge line needs two vertices")
        if not (1 <= u <= n and 1 <= v <= n) or u == v:
            raise FormatError(f"line {no}: bad edge {u} {v}")
        edges.append((u - 1, v - 1))
    if n is None:
        raise FormatError("missing 'p gr' header")
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise FormatError(f"header declares {m} edges, found {g.m} distinct")
    return g


def format_gr(g: Graph) -> str:
    if g.vertices != list(range(g.n)):
        raise FormatError("graph vertices must be 0..n-1 to be written")
    out = [f"p gr {g.n} {g.m}"]
    out += [f"{u + 1} {v + 1}" for u, v in sorted(g.edges)]
    return "\n".join(out) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for no, tok in _lines(text):
        if tok[0] == "s":
            if len(tok) != 5 or tok[1] != "td":
                raise FormatError(f"line {no}: malformed 's td' header")
            header = _ints(tok[2:], no)
        elif tok[0] == "b":
            if header is None:
                raise FormatError(f"line {no}: bag before header")
            ids = _ints(tok[1:], no)
            if not ids:
                raise FormatError(f"line {no}: bag line without id")
            if ids[0] - 1 in bags:
                raise FormatError(f"line {no}: bag {ids[0]} repeated")
            bags[ids[0] - 1] = frozenset(v - 1 for v in ids[1:])
        else:
            if header is None:
                raise FormatError(f"line {no}: edge before header")
            a, b = _ints(tok, no) if len(tok) == 2 else (None, None)
            if a is None:
                raise FormatError(f"line {no}: a tree edge needs two bag ids")
            edges.append((a - 1, b - 1))
    if header is None:
        raise FormatError("missing 's td' header")
    if header[0] != len(bags):
        raise FormatError(f"header declares {header[0]} bags, found {len(bags)}")
    try:
        td = TreeDecomposition(bags, tuple(edges))
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if max((len(b) for b in bags.values()), default=0) > header[1]:
        raise FormatError("a bag exceeds the declared maximum size")
    return td


def format_td(td: TreeDecomposition, n: int) -> str:
    nodes = td.nodes
    index = {x: i + 1 for i, x in enumerate(nodes)}
    out = [f"s td {len(nodes)} {max((len(b) for b in td.bags.values()), default=0)} {n}"]
    for x in nodes:
        out.append(" ".join(["b", str(index[x])] + [str(v + 1) for v in sorted(td.bags[x])]))
    out += [f"{a} {b}" for a, b in sorted((index[a], index[b]) for a, b in td.edges)]
    return "\n".join(out) + "\n"


def _shift(vs, k):
    return sorted(v + k for v in vs)


def td_to_obj(td: TreeDecomposition) -> dict:
    return {
        "bags": {str(x): _shift(td.bags[x], 1) for x in td.nodes},
        "edges": [list(e) for e in td.edges],
    }


def td_from_obj(obj: dict) -> TreeDecomposition:
    bags = {int(k): frozenset(v - 1 for v in vs) for k, vs in obj["bags"].items()}
    return TreeDecomposition(bags, tuple(tuple(e) for e in obj.get("edges", [])))


def lrs_to_obj(lrs: LayeredRSDecomposition) -> dict:
    return {
        "c": lrs.c,
        "tree": {"nodes": lrs.nodes, "edges": [list(e) for e in lrs.tree_edges], "root": lrs.root},
        "nodes": [
            {
                "id": x,
                "bag": _shift(lrs.bags[x], 1),
                "apex": _shift(lrs.apex[x], 1),
                "td": td_to_obj(lrs.tds[x]),
                "layering": [_shift(layer, 1) for layer in lrs.layerings[x].layers],
            }
            for x in lrs.nodes
        ],
    }


def lrs_from_obj(obj: dict) -> LayeredRSDecomposition:
    try:
        nodes = {int(rec["id"]): rec for rec in obj["nodes"]}
        tree = obj.get("tree", {})
        if "nodes" in tree and sorted(int(x) for x in tree["nodes"]) != sorted(nodes):
            raise FormatError("tree.nodes does not match the node records")
        return LayeredRSDecomposition(
            c=int(obj["c"]),
            bags={x: frozenset(v - 1 for v in rec["bag"]) for x, rec in nodes.items()},
            tree_edges=tuple((int(a), int(b)) for a, b in tree.get("edges", [])),
            apex={x: frozenset(v - 1 for v in rec.get("apex", [])) for x, rec in nodes.items()},
            tds={x: td_from_obj(rec["td"]) for x, rec in nodes.items()},
            layerings={
                x: Layering(tuple(frozenset(v - 1 for v in layer) for layer in rec["layering"]))
                for x, rec in nodes.items()
            },
            root=tree.get("root"),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed LRS document: missing or bad field {exc}") from None


def parse_coloring(text: str) -> dict[int, int]:
    coloring = {}
    for no, tok in _lines(text):
        if len(tok) != 2:
            raise FormatError(f"line {no}: expected '<vertex> <color>'")
        v, c = _ints(tok, no)
        if v - 1 in coloring:
            raise FormatError(f"line {no}: vertex {v} colored twice")
        coloring[v - 1] = c
    return coloring


def format_coloring(coloring) -> str:
    return "".join(f"{v + 1} {coloring[v]}\n" for v in sorted(coloring))


def witness_to_obj(wit) -> dict:
    """Audit dump of a good-coloring witness; node sets are listed per component."""
    return {
        "Z": _shift(wit.Z, 1),
        "B": _shift(wit.B, 1),
        "psi": {str(v + 1): wit.psi[v] for v in sorted(wit.psi)},
        "blocks": [_shift(b, 1) for b in wit.blocks],
        "X0": [sorted(a.X0) for a in wit.audits],
        "X1": [sorted(a.X1) for a in wit.audits],
        "X2": [sorted(a.X2) for a in wit.audits],
        "X3": [sorted(a.X3) for a in wit.audits],
    }


def partition_to_obj(res) -> dict:
    return {
        "parts": [_shift(p, 1) for p in res.parts],
        "quotient_td": {
            "bags": {str(x): sorted(res.td.bags[x]) for x in res.td.nodes},
            "edges": [list(e) for e in res.td.edges],
        },
        "sigma": list(res.sigma),
        "psi": {str(i): {str(v + 1): c for v, c in sorted(col.items())} for i, col in sorted(res.psi.items())},
        "R": list(res.R),
    }


def partition_from_obj(obj: dict):
    from .partition import PartitionResult

    parts = tuple(frozenset(v - 1 for v in p) for p in obj["parts"])
    td = TreeDecomposition(
        {int(k): frozenset(vs) for k, vs in obj["quotient_td"]["bags"].items()},
        tuple(tuple(e) for e in obj["quotient_td"]["edges"]),
    )
    psi = {int(i): {int(v) - 1: c for v, c in col.items()} for i, col in obj["psi"].items()}
    s = next(x for x in td.nodes if set(obj["R"]) <= td.bags[x])
    return PartitionResult(parts, td, list(obj["sigma"]), psi, list(obj["R"]), s)


def parse_family(text: str) -> list[frozenset[int]]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise FormatError("family file must be a JSON list of vertex lists")
    return [frozenset(v - 1 for v in member) for member in data]


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def read_gr(path) -> Graph:
    return parse_gr(read_text(path))


def read_td(path) -> TreeDecomposition:
    return parse_td(read_text(path))


def read_lrs(path) -> LayeredRSDecomposition:
    try:
        return lrs_from_obj(json.loads(read_text(path)))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg})") from None


def read_coloring(path) -> dict[int, int]:
    return parse_coloring(read_text(path))


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
