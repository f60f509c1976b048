"""How close does the ps19 backend get to binom(p+w, w) on random 2-trees?"""

import argparse
import random
from collections import defaultdict
from math import comb

from pcentered.centered import palette, tw_backend, verify_p_centered_ordered
from pcentered.decomposition import TreeDecomposition, elimination_order
from pcentered.graph import Graph


def random_partial_2tree(rng, n, keep):
    """2-tree grown by stacking on random edges; each non-tree edge kept with prob keep."""
    edges = {(0, 1)}
    tree_edges = set(edges)
    bags = {0: frozenset({0, 1})}
    home = {(0, 1): 0}
    links = []
    for v in range(2, n):
        a, b = rng.choice(sorted(edges))
        x = len(bags)
        bags[x] = frozenset({a, b, v})
        links.append((home[(a, b)], x))
        for u in (a, b):
            e = (u, v)
            edges.add(e)
            home[e] = x
        tree_edges.add((rng.choice((a, b)), v))
    kept = [e for e in sorted(edges) if e in tree_edges or rng.random() < keep]
    return Graph.from_edges(n, kept), TreeDecomposition(bags, tuple(links))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--max-n", type=int, default=20)
    ap.add_argument("--ps", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    worst = defaultdict(int)
    for _ in range(args.runs):
        g, td = random_partial_2tree(rng, rng.randint(3, args.max_n), rng.random())
        sigma = elimination_order(td, rng.choice(td.nodes))
        for p in args.ps:
            col = tw_backend(g, td, sigma, p, "ps19")
            assert verify_p_centered_ordered(g, sigma, col, p, mode="sampled", samples=500).ok
            worst[p] = max(worst[p], len(palette(col)))
    print("p\tmax_palette\tbinom(p+2,2)")
    for p in args.ps:
        print(f"{p}\t{worst[p]}\t{comb(p + 2, 2)}")


if __name__ == "__main__":
    main()
