"""Command line: color, verify, chi-p, make-natural, helly, bench.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 bound violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds, io
from .centered import BACKENDS, BackendError, chi_p_exact, verify_p_centered
from .decomposition import (
    DecompositionError,
    NormalPair,
    Packing,
    check_helly_result,
    explicit_family_oracle,
    helly_hitting_or_packing,
    is_natural,
    make_natural,
    validate_td,
)
from .good_coloring import check_goodness_witness, phi_from_lrs
from .graph import GraphError
from .layered import LayeringError, LRSError, grid_instance
from .partition import MinorCertificate, PartitionError, partition_violations, theorem1_coloring

log = logging.getLogger("pcentered")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BOUND = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    td: str | None = None
    lrs: str | None = None
    coloring: str | None = None
    family: str | None = None
    witness: str | None = None
    partition: str | None = None
    t: int = 5
    p: int = 1
    d: int | None = None
    backend: str = "ps19"
    mode: str = "auto"
    seed: int = 0
    samples: int = 10_000
    out: str | None = None
    partition_out: str | None = None
    max_colors: int | None = None
    grids: list[int] = field(default_factory=list)
    ps: list[int] = field(default_factory=list)
    strict: bool = False

    def __post_init__(self):
        if self.t < 2:
            raise InputError("t must be at least 2")
        if self.p < 1:
            raise InputError("p must be at least 1")
        for name in ("graph", "td", "lrs", "coloring", "family", "witness", "partition"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise InputError(f"--{name}: no such file {path}")

    def need(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise InputError(f"{self.command} needs " + ", ".join("--" + n for n in missing))

    def verify_mode(self, n: int) -> str:
        if self.mode == "auto":
            return "exact" if n <= 16 else "sampled"
        return self.mode


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        io.write_text(cfg.out, text)
    else:
        sys.stdout.write(text)


def _vs(vs) -> str:
    return " ".join(str(v + 1) for v in sorted(vs))


def cmd_color(cfg: RunConfig) -> int:
    cfg.need("graph", "lrs")
    g = io.read_gr(cfg.graph)
    lrs = io.read_lrs(cfg.lrs)
    start = time.perf_counter()
    mode = None if cfg.mode == "none" else cfg.verify_mode(g.n)
    out = theorem1_coloring(g, cfg.t, cfg.p, lrs, cfg.backend, verify=mode)
    elapsed = time.perf_counter() - start
    if isinstance(out, MinorCertificate):
        print(f"K_{cfg.t} model found; the instance is not K_{cfg.t}-minor-free")
        for i, b in enumerate(out.branch_sets):
            print(f"branch {i + 1}: {_vs(b)}")
        return EXIT_FAIL
    _emit(cfg, io.format_coloring(out.zeta))
    if cfg.partition_out:
        io.write_text(cfg.partition_out, io.dumps(io.partition_to_obj(out.partition)))
    bound = bounds.headline_bound(cfg.t, lrs.c, cfg.p)
    print(
        f"palette {out.palette}  parts {len(out.partition.parts)}  bound {bound}  "
        f"verified {mode or 'no'}  time {elapsed:.3f}s",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    cfg.need("graph")
    g = io.read_gr(cfg.graph)
    if cfg.witness:
        cfg.need("lrs")
        lrs = io.read_lrs(cfg.lrs)
        data = json.loads(io.read_text(cfg.witness))
        z = frozenset(v - 1 for v in data["Z"])
        psi = {int(v) - 1: c for v, c in data["psi"].items()}
        oracle = explicit_family_oracle(io.parse_family(io.read_text(cfg.family))) if cfg.family else None
        rep = check_goodness_witness(
            g, z, psi, phi_from_lrs(g, lrs, cfg.p), cfg.p, oracle, cfg.d, lrs.c,
            samples=cfg.samples, seed=cfg.seed,
        )
        print(f"pc1 {rep.pc1}  pc2 {rep.pc2} ({rep.pc2_mode}, {rep.pc2_checked} sets)  pc3 {rep.pc3}  palette {rep.palette_ok}")
        for key, vs in rep.counterexample.items():
            print(f"{key} counterexample: {' '.join(str(v + 1) for v in vs)}")
        return EXIT_OK if rep.ok else EXIT_FAIL
    if cfg.partition:
        cfg.need("lrs")
        lrs = io.read_lrs(cfg.lrs)
        res = io.partition_from_obj(json.loads(io.read_text(cfg.partition)))
        problems = partition_violations(g, cfg.t, cfg.p, res, phi_from_lrs(g, lrs, cfg.p), lrs.c, exhaustive=g.n <= 16)
        for p in problems:
            print(p)
        print("partition ok" if not problems else f"{len(problems)} problems")
        return EXIT_OK if not problems else EXIT_FAIL
    cfg.need("coloring")
    coloring = io.read_coloring(cfg.coloring)
    missing = g.vertex_set - set(coloring)
    if missing:
        raise InputError(f"coloring misses vertices {_vs(missing)}")
    rep = verify_p_centered(g, coloring, cfg.p, cfg.verify_mode(g.n), cfg.samples, cfg.seed)
    if rep.ok:
        print(f"ok: {cfg.p}-centered ({rep.mode}, {rep.checked} connected sets)")
        return EXIT_OK
    print(f"violation: {_vs(rep.violation)}")
    return EXIT_FAIL


def cmd_chi_p(cfg: RunConfig) -> int:
    cfg.need("graph")
    g = io.read_gr(cfg.graph)
    if g.n > 10:
        raise InputError("chi-p is exhaustive; use graphs with at most 10 vertices")
    found = chi_p_exact(g, cfg.p, cfg.max_colors)
    if found is None:
        print(f"chi_{cfg.p} > {cfg.max_colors}")
        return EXIT_FAIL
    k, witness = found
    print(f"chi_{cfg.p} = {k}")
    if cfg.out:
        io.write_text(cfg.out, io.format_coloring(witness))
    return EXIT_OK


def cmd_make_natural(cfg: RunConfig) -> int:
    cfg.need("graph", "td")
    g = io.read_gr(cfg.graph)
    td = io.read_td(cfg.td)
    problems = validate_td(g, td)
    if problems:
        raise InputError("invalid tree decomposition: " + "; ".join(map(str, problems[:5])))
    was = is_natural(g, td)
    pair, _ = make_natural(g, NormalPair(td, (frozenset(td.nodes),)))
    _emit(cfg, io.format_td(pair.td, g.n))
    print(f"input natural {was}  bags {len(td.bags)} -> {len(pair.td.bags)}  width {pair.td.width}", file=sys.stderr)
    return EXIT_OK


def cmd_helly(cfg: RunConfig) -> int:
    cfg.need("graph", "td", "family", "d")
    g = io.read_gr(cfg.graph)
    td = io.read_td(cfg.td)
    problems = validate_td(g, td)
    if problems:
        raise InputError("invalid tree decomposition: " + "; ".join(map(str, problems[:5])))
    oracle = explicit_family_oracle(io.parse_family(io.read_text(cfg.family)))
    res = helly_hitting_or_packing(g, td, oracle, cfg.d)
    check = check_helly_result(g, td, oracle, cfg.d, res)
    if isinstance(res, Packing):
        obj = {"packing": [sorted(v + 1 for v in m) for m in res.members]}
    else:
        obj = {"hitting_bags": [x + 1 for x in res.nodes], "hit": sorted(v + 1 for v in td.union(res.nodes))}
    _emit(cfg, io.dumps(obj))
    for p in check:
        print(p, file=sys.stderr)
    return EXIT_OK if not check else EXIT_FAIL


BENCH_HEADER = "p\tt\tn\tpalette\tbound\ttime"


def cmd_bench(cfg: RunConfig) -> int:
    rows = [BENCH_HEADER]
    for k in cfg.grids:
        g, lrs = grid_instance(k, k)
        for p in cfg.ps or [cfg.p]:
            start = time.perf_counter()
            out = theorem1_coloring(g, cfg.t, p, lrs, cfg.backend, verify=None if cfg.mode == "none" else cfg.verify_mode(g.n))
            elapsed = time.perf_counter() - start
            rows.append(f"{p}\t{cfg.t}\t{g.n}\t{out.palette}\t{bounds.headline_bound(cfg.t, lrs.c, p)}\t{elapsed:.3f}")
    _emit(cfg, "\n".join(rows) + "\n")
    return EXIT_OK


COMMANDS = {
    "color": cmd_color,
    "verify": cmd_verify,
    "chi-p": cmd_chi_p,
    "make-natural": cmd_make_natural,
    "helly": cmd_helly,
    "bench": cmd_bench,
}


def _int_list(text: str) -> list[int]:
    """'2..6' or '1,2,3' (empty string gives [])."""
    text = text.strip()
    if not text:
        return []
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph in .gr format")
    common.add_argument("--td", help="tree decomposition in .td format")
    common.add_argument("--lrs", help="layered decomposition (.lrs.json)")
    common.add_argument("-t", type=int, default=5, help="excluded clique size (default 5)")
    common.add_argument("-p", type=int, default=1, help="centering depth (default 1)")
    common.add_argument("--backend", choices=BACKENDS, default="ps19")
    common.add_argument("--mode", choices=("auto", "exact", "sampled", "none"), default="auto")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--strict", action="store_true", help="fail on any runtime bound violation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pcentered", description="p-centered colorings of K_t-minor-free graphs")
    sub = parser.add_subparsers(dest="command", required=True)
    color = sub.add_parser("color", parents=[common], help="color a graph given its layered decomposition")
    color.add_argument("--partition-out", help="write the partition as JSON")
    verify = sub.add_parser("verify", parents=[common], help="check a coloring, witness or partition")
    verify.add_argument("--coloring")
    verify.add_argument("--witness", help="good-coloring witness JSON")
    verify.add_argument("--partition", help="partition JSON from color --partition-out")
    verify.add_argument("--family", help="JSON list of member vertex lists")
    verify.add_argument("-d", type=int)
    chi = sub.add_parser("chi-p", parents=[common], help="exact chi_p by exhaustive search")
    chi.add_argument("--max-colors", type=int)
    sub.add_parser("make-natural", parents=[common], help="refine a tree decomposition to a natural one")
    helly = sub.add_parser("helly", parents=[common], help="hitting bags or a packing for a family")
    helly.add_argument("--family", required=True)
    helly.add_argument("-d", type=int, required=True)
    bench = sub.add_parser("bench", parents=[common], help="palette sizes on square grids (TSV)")
    bench.add_argument("--grids", type=_int_list, default=[2, 3, 4], help="side lengths, e.g. 2..6")
    bench.add_argument("--ps", type=_int_list, default=[1, 2, 3], help="values of p, e.g. 1,2,3")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        graph=args.graph,
        td=args.td,
        lrs=args.lrs,
        coloring=getattr(args, "coloring", None),
        family=getattr(args, "family", None),
        witness=getattr(args, "witness", None),
        partition=getattr(args, "partition", None),
        t=args.t,
        p=args.p,
        d=getattr(args, "d", None),
        backend=args.backend,
        mode=args.mode,
        seed=args.seed,
        samples=args.samples,
        out=args.out,
        partition_out=getattr(args, "partition_out", None),
        max_colors=getattr(args, "max_colors", None),
        grids=getattr(args, "grids", []),
        ps=getattr(args, "ps", []),
        strict=args.strict,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))
    try:
        cfg = config_from_args(args)
        if cfg.strict:
            bounds.set_strict(True)
        return COMMANDS[cfg.command](cfg)
    except bounds.BoundViolation as exc:
        print(f"internal bound violated: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (InputError, io.FormatError, GraphError, LayeringError, LRSError, PartitionError,
            DecompositionError, BackendError, json.JSONDecodeError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
