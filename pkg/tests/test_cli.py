import json

import pytest

from generators import random_connected, seeded
from pcentered import bounds, io
from pcentered.cli import BENCH_HEADER, InputError, RunConfig, main
from pcentered.decomposition import explicit_family_oracle
from pcentered.good_coloring import good_witness
from pcentered.graph import Graph, grid_graph, path_graph
from pcentered.layered import bfs_layering, grid_instance, lrs_from_layered_td, path_td


def write_instance(tmp_path, g, lrs=None, name="g"):
    gr = tmp_path / f"{name}.gr"
    gr.write_text(io.format_gr(g))
    if lrs is None:
        return str(gr)
    js = tmp_path / f"{name}.lrs.json"
    js.write_text(io.dumps(io.lrs_to_obj(lrs)))
    return str(gr), str(js)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_color_grid(tmp_path, capsys):
    gr, lrs = write_instance(tmp_path, *grid_instance(3, 3))
    out = tmp_path / "col.txt"
    code, _, err = run(capsys, "color", "--graph", gr, "--lrs", lrs, "-t", "5", "-p", "1", "--out", str(out))
    assert code == 0
    col = io.read_coloring(out)
    g = grid_graph(3, 3)
    assert all(col[u] != col[v] for u, v in g.edges)
    assert "palette" in err and f"bound {bounds.headline_bound(5, 2, 1)}" in err


def test_color_k1(tmp_path, capsys):
    k1 = Graph.from_edges(1, [])
    gr, lrs = write_instance(tmp_path, k1, lrs_from_layered_td(k1, path_td([0]), bfs_layering(k1)))
    code, out, _ = run(capsys, "color", "--graph", gr, "--lrs", lrs)
    assert code == 0 and len(set(io.parse_coloring(out).values())) == 1


def test_color_missing_lrs(tmp_path, capsys):
    gr = write_instance(tmp_path, grid_graph(2, 2))
    code, _, err = run(capsys, "color", "--graph", gr)
    assert code == 2 and "--lrs" in err
    code, _, err = run(capsys, "color", "--graph", gr, "--lrs", str(tmp_path / "nope.json"))
    assert code == 2


def test_color_partition_out_verifies(tmp_path, capsys):
    gr, lrs = write_instance(tmp_path, *grid_instance(3, 3))
    part = tmp_path / "part.json"
    code, _, _ = run(capsys, "color", "--graph", gr, "--lrs", lrs, "-p", "2", "--partition-out", str(part))
    assert code == 0
    code, out, _ = run(capsys, "verify", "--graph", gr, "--lrs", lrs, "-p", "2", "--partition", str(part))
    assert code == 0 and "partition ok" in out


def test_color_certificate_exit(tmp_path, capsys):
    edges = [(0, i) for i in range(1, 9)] + [(i, i % 8 + 1) for i in range(1, 9)]
    g = Graph.from_edges(9, edges)
    from pcentered.decomposition import TreeDecomposition
    from pcentered.layered import LayeredRSDecomposition

    td = TreeDecomposition({i: frozenset({1, i + 2, i + 3}) for i in range(6)}, tuple((i, i + 1) for i in range(5)))
    lrs = LayeredRSDecomposition(2, {0: g.vertex_set}, (), {0: frozenset({0})}, {0: td}, {0: bfs_layering(g.remove({0}))})
    gr, js = write_instance(tmp_path, g, lrs)
    code, out, _ = run(capsys, "color", "--graph", gr, "--lrs", js, "-t", "3")
    assert code == 1 and "K_3 model" in out and out.count("branch") == 3


@pytest.mark.parametrize(
    "colors,p,expected",
    [("a b a b", 2, 1), ("a b a b", 1, 0), ("0 1 2 3", 3, 0)],
)
def test_verify_examples(tmp_path, capsys, colors, p, expected):
    gr = write_instance(tmp_path, path_graph(4))
    names = {}
    lines = "".join(f"{v + 1} {names.setdefault(c, len(names))}\n" for v, c in enumerate(colors.split()))
    colf = tmp_path / "c.txt"
    colf.write_text(lines)
    code, out, _ = run(capsys, "verify", "--graph", gr, "--coloring", str(colf), "-p", str(p))
    assert code == expected
    if expected:
        assert out.strip() == "violation: 1 2 3 4"


def test_verify_incomplete_coloring(tmp_path, capsys):
    gr = write_instance(tmp_path, path_graph(4))
    colf = tmp_path / "c.txt"
    colf.write_text("1 0\n2 1\n")
    code, _, err = run(capsys, "verify", "--graph", gr, "--coloring", str(colf))
    assert code == 2 and "misses" in err


def test_verify_witness(tmp_path, capsys):
    g, lrs = grid_instance(3, 3)
    gr, js = write_instance(tmp_path, g, lrs)
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps([list(range(1, 10))]))
    wit = good_witness(g, lrs, 1, explicit_family_oracle([g.vertex_set]), 1)
    wf = tmp_path / "w.json"
    wf.write_text(io.dumps(io.witness_to_obj(wit)))
    args = ["verify", "--graph", gr, "--lrs", js, "--witness", str(wf), "--family", str(fam), "-d", "1", "-p", "2"]
    code, out, _ = run(capsys, *args)
    assert code == 0 and "pc1 True" in out
    obj = json.loads(wf.read_text())
    obj["psi"] = {k: 1 for k in obj["psi"]}
    wf.write_text(json.dumps(obj))
    code, out, _ = run(capsys, *args)
    assert code == 1 and "pc2 counterexample" in out


def test_chi_p(tmp_path, capsys):
    gr = write_instance(tmp_path, path_graph(4))
    code, out, _ = run(capsys, "chi-p", "--graph", gr, "-p", "2")
    assert code == 0 and out.strip() == "chi_2 = 3"
    code, out, _ = run(capsys, "chi-p", "--graph", gr, "-p", "2", "--max-colors", "2")
    assert code == 1
    k1 = write_instance(tmp_path, Graph.from_edges(1, []), name="k1")
    assert run(capsys, "chi-p", "--graph", k1)[1].strip() == "chi_1 = 1"


def test_chi_1_cross_check(tmp_path, capsys):
    import oracles

    for seed in range(6):
        rng = seeded(seed)
        g = random_connected(rng, rng.randint(2, 6), 0.4)
        gr = write_instance(tmp_path, g, name=f"r{seed}")
        out = run(capsys, "chi-p", "--graph", gr, "-p", "1")[1]
        assert out.strip() == f"chi_1 = {oracles.chromatic_number(g)}"


def test_chi_p_too_big(tmp_path, capsys):
    gr = write_instance(tmp_path, grid_graph(3, 4))
    assert run(capsys, "chi-p", "--graph", gr)[0] == 2


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--grids", "2..6", "--ps", "1,2,3", "--mode", "none")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == BENCH_HEADER
    rows = [line.split("\t") for line in lines[1:]]
    assert len(rows) == 15
    table = {(int(r[2]), int(r[0])): int(r[3]) for r in rows}
    for n in (4, 9, 16, 25, 36):
        assert table[n, 1] <= table[n, 2] <= table[n, 3]
    for p in (1, 2, 3):
        col = [table[n, p] for n in (4, 9, 16, 25, 36)]
        assert col == sorted(col)
    for r in rows:
        assert int(r[4]) == bounds.headline_bound(5, 2, int(r[0]))
        assert int(r[3]) <= int(r[4])


def test_bench_empty(capsys):
    code, out, _ = run(capsys, "bench", "--grids", "")
    assert code == 0 and out == BENCH_HEADER + "\n"


def test_make_natural(tmp_path, capsys):
    g = path_graph(4)
    gr = write_instance(tmp_path, g)
    tdf = tmp_path / "x.td"
    tdf.write_text("s td 2 4 4\nb 1 1 4\nb 2 1 2 3 4\n1 2\n")
    out = tmp_path / "nat.td"
    code, _, err = run(capsys, "make-natural", "--graph", gr, "--td", str(tdf), "--out", str(out))
    assert code == 0 and "input natural False" in err
    from pcentered.decomposition import is_natural, validate_td

    td = io.read_td(out)
    assert validate_td(g, td) == [] and is_natural(g, td)


def test_helly(tmp_path, capsys):
    gr = write_instance(tmp_path, path_graph(5))
    tdf = tmp_path / "p.td"
    tdf.write_text(io.format_td(path_td(range(5)), 5))
    fam = tmp_path / "f.json"
    fam.write_text("[[1, 2], [2, 3], [3, 4], [4, 5]]")
    code, out, _ = run(capsys, "helly", "--graph", gr, "--td", str(tdf), "--family", str(fam), "-d", "1")
    assert code == 0 and len(json.loads(out)["packing"]) == 2
    code, out, _ = run(capsys, "helly", "--graph", gr, "--td", str(tdf), "--family", str(fam), "-d", "2")
    assert code == 0 and "hitting_bags" in json.loads(out)


def test_bad_graph_file(tmp_path, capsys):
    bad = tmp_path / "bad.gr"
    bad.write_text("p gr 2 5\n1 2\n")
    assert run(capsys, "chi-p", "--graph", str(bad))[0] == 2


def test_run_config_validation(tmp_path):
    with pytest.raises(InputError):
        RunConfig("color", t=1)
    with pytest.raises(InputError):
        RunConfig("color", p=0)
    with pytest.raises(InputError):
        RunConfig("color", graph=str(tmp_path / "none.gr"))
    cfg = RunConfig("color", mode="auto")
    assert cfg.verify_mode(16) == "exact" and cfg.verify_mode(17) == "sampled"


def test_deterministic_output(tmp_path, capsys):
    gr, lrs = write_instance(tmp_path, *grid_instance(4, 4))
    outs = []
    for k in range(2):
        target = tmp_path / f"o{k}.txt"
        assert run(capsys, "color", "--graph", gr, "--lrs", lrs, "-p", "2", "--mode", "sampled", "--seed", "7", "--out", str(target))[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
