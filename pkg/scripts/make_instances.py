"""Write grid and apex-over-path instances as .gr / .lrs.json pairs."""

import argparse
from pathlib import Path

from pcentered import io
from pcentered.graph import Graph
from pcentered.layered import LayeredRSDecomposition, bfs_layering, grid_instance, layered_width, path_td


def hubs_instance(h, n):
    """h pairwise non-adjacent hubs joined to every vertex of an n-vertex path."""
    path = range(h, h + n)
    edges = [(a, v) for a in range(h) for v in path] + [(v, v + 1) for v in range(h, h + n - 1)]
    g = Graph.from_edges(h + n, edges)
    td = path_td(list(path))
    lay = bfs_layering(g.remove(set(range(h))))
    c = max(1, h, layered_width(td, lay))
    return g, LayeredRSDecomposition(c, {0: g.vertex_set}, (), {0: frozenset(range(h))}, {0: td}, {0: lay})


def write(out: Path, name, g, lrs):
    (out / f"{name}.gr").write_text(io.format_gr(g))
    (out / f"{name}.lrs.json").write_text(io.dumps(io.lrs_to_obj(lrs)))
    print(f"{name}\tn={g.n}\tm={g.m}\tc={lrs.c}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path)
    ap.add_argument("--max-side", type=int, default=4)
    ap.add_argument("--hubs", type=int, nargs="*", default=[2, 3, 4])
    ap.add_argument("--path-len", type=int, default=20)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for r in range(1, args.max_side + 1):
        for c in range(r, args.max_side + 1):
            write(args.out, f"grid{r}x{c}", *grid_instance(r, c))
    for h in args.hubs:
        write(args.out, f"hubs{h}_{args.path_len}", *hubs_instance(h, args.path_len))


if __name__ == "__main__":
    main()
