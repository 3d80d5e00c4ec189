import csv
import json

import pytest

from kpathnet.cli import main

TRIANGLES = "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n"


@pytest.fixture
def tri(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text(TRIANGLES)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_weight_writes_output_and_manifest(tmp_path, tri, capsys):
    out = tmp_path / "gw.txt"
    code, stdout, _ = run(capsys, "weight", tri, "--kappa", 20, "--seed", 7, "-o", out)
    assert code == 0 and "rho=6" in stdout
    lines = out.read_text().splitlines()
    assert len(lines) == 6 and all(len(l.split()) == 3 for l in lines)
    man = json.loads((tmp_path / "gw.txt.manifest.json").read_text())
    assert man["subcommand"] == "weight"
    assert man["params"]["walk"]["kappa"] == 20 and man["params"]["walk"]["seed"] == 7
    assert len(man["outputs"]["weighted_graph"]["sha256"]) == 64
    assert man["argv"][0] == "weight"


def test_weight_is_byte_identical(tmp_path, tri, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "weight", tri, "--seed", 7, "-o", a)
    run(capsys, "weight", tri, "--seed", 7, "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_bad_kappa_exit_code(tmp_path, tri, capsys):
    code, _, err = run(capsys, "weight", tri, "--kappa", 0, "-o", tmp_path / "x")
    assert code == 2 and "kappa" in err


def test_exit_codes_per_error_class(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3 4\n")
    assert run(capsys, "weight", bad, "-o", tmp_path / "x")[0] == 3
    assert run(capsys, "weight", tmp_path / "missing.txt", "-o", tmp_path / "x")[0] == 6
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    assert run(capsys, "weight", empty, "-o", tmp_path / "x")[0] == 4
    assert run(capsys, "gen", "--n", 100, "--avg-degree", 12, "--max-degree", 10,
               "-o", tmp_path / "g")[0] == 5


def test_unknown_algo_is_usage_error(tmp_path, tri):
    with pytest.raises(SystemExit) as info:
        main(["detect", str(tri), "--algo", "nope", "-o", str(tmp_path / "p")])
    assert info.value.code == 2


def test_detect_louvain_two_triangles(tmp_path, tri, capsys):
    out = tmp_path / "p.txt"
    code, stdout, _ = run(capsys, "detect", tri, "--algo", "louvain", "-o", out)
    assert code == 0 and "Q=0.500000" in stdout and "communities=2" in stdout
    man = json.loads((tmp_path / "p.txt.manifest.json").read_text())
    assert man["modularity"] == pytest.approx(0.5)


def test_detect_copra_two_triangles(tmp_path, tri, capsys):
    out = tmp_path / "c.txt"
    code, stdout, _ = run(capsys, "detect", tri, "--algo", "copra", "--vmax", 1, "-o", out)
    assert code == 0 and "communities=2" in stdout
    assert all(":" in line for line in out.read_text().splitlines())


def test_detect_accepts_weighted_input(tmp_path, capsys):
    g = tmp_path / "w.txt"
    g.write_text("0 1 5\n1 2 5\n0 2 5\n2 3 0.1\n3 4 5\n4 5 5\n3 5 5\n")
    code, stdout, _ = run(capsys, "detect", g, "-o", tmp_path / "p.txt")
    assert code == 0 and "communities=2" in stdout


def test_eval_report(tmp_path, tri, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n")
    b.write_text("".join(f"{v} 0\n" for v in range(6)))
    code, stdout, _ = run(capsys, "eval", tri, a, a, "--truth", a)
    rep = json.loads(stdout)
    assert code == 0 and rep["nmi"]["a_vs_b"] == 1.0 and rep["nmi"]["a_vs_truth"] == 1.0
    code, stdout, _ = run(capsys, "eval", tri, b, "--truth", a)
    rep = json.loads(stdout)
    assert rep["nmi"]["a_vs_truth"] == 0.0
    assert rep["q"]["a"] == 0.0 and rep["q"]["truth"] == 0.5
    assert rep["schema_version"] == 1


def test_eval_cover_input_and_mismatch(tmp_path, tri, capsys):
    cov = tmp_path / "c.txt"
    cov.write_text("0 7:1.0\n1 7:1.0\n2 7:1.0\n3 9:0.6 7:0.4\n4 9:1.0\n5 9:1.0\n")
    truth = tmp_path / "t.txt"
    truth.write_text("0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n")
    code, stdout, _ = run(capsys, "eval", tri, cov, "--truth", truth)
    assert code == 0 and json.loads(stdout)["nmi"]["a_vs_truth"] == 1.0
    short = tmp_path / "s.txt"
    short.write_text("0 0\n1 0\n")
    assert run(capsys, "eval", tri, short, "--truth", truth)[0] == 4


def test_eval_gain_formatting(tmp_path):
    from kpathnet.cli import build_eval_report
    from kpathnet.community import Partition
    from kpathnet.graph import load_edge_list
    g = load_edge_list(TRIANGLES.encode())
    one = Partition.from_labels([0, 0, 0, 0, 0, 1])
    two = Partition.from_labels([0, 0, 0, 1, 1, 1])
    rep = build_eval_report(g, one, two, None)
    qa = rep["q"]["a"]
    assert qa < 0  # gain is measured against |baseline|
    assert rep["q_gain_percent"] == pytest.approx((0.5 - qa) / -qa * 100)
    assert rep["q_gain"] == f"0.500 [+{rep['q_gain_percent']:.1f}%]"


def test_eval_needs_reference(tmp_path, tri, capsys):
    a = tmp_path / "a.txt"
    a.write_text("".join(f"{v} 0\n" for v in range(6)))
    assert run(capsys, "eval", tri, a)[0] == 2


def test_gen_and_determinism(tmp_path, capsys):
    for name in ("a", "b"):
        code, *_ = run(capsys, "gen", "--n", 150, "--avg-degree", 8, "--mu", 0.2,
                       "--seed", 3, "-o", tmp_path / name / "bench")
        assert code == 0
    for ext in (".edges", ".truth", ".json"):
        assert (tmp_path / "a" / f"bench{ext}").read_bytes() == \
               (tmp_path / "b" / f"bench{ext}").read_bytes()


def test_gen_bad_mu(tmp_path, capsys):
    assert run(capsys, "gen", "--mu", 1.5, "-o", tmp_path / "x")[0] == 2


@pytest.mark.slow
def test_grid_writes_72_triples(tmp_path, capsys):
    code, *_ = run(capsys, "grid", tmp_path, "--n", 200)
    assert code == 0
    for ext in ("edges", "truth", "json"):
        assert len(list(tmp_path.glob(f"*.{ext}"))) == 72 + (ext == "json")  # + manifest


def test_experiment_rows_and_determinism(tmp_path, capsys):
    grid = tmp_path / "grid"
    run(capsys, "gen", "--n", 200, "--avg-degree", 10, "--mu", 0.2, "-o", grid / "one")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "experiment", "--grid-dir", grid, "--algos", "louvain",
               "--runs", 10, "-o", a)[0] == 0
    run(capsys, "experiment", "--grid-dir", grid, "--algos", "louvain", "--runs", 10, "-o", b)
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 2
    assert [r["weighted"] for r in rows] == ["0", "1"]
    for r in rows:
        assert r["runs"] == "10" and r["schema_version"] == "1" and not r["error"]
        assert 0.0 <= float(r["mean_nmi"]) <= 1.0


def test_experiment_records_failures_per_row(tmp_path, capsys):
    grid = tmp_path / "grid"
    grid.mkdir()
    (grid / "broken.edges").write_text("0 1\n")  # no truth file
    out = tmp_path / "e.csv"
    assert run(capsys, "experiment", "--grid-dir", grid, "--algos", "louvain",
               "--runs", 2, "-o", out)[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 and all(r["error"] for r in rows)


def test_experiment_thread_env(tmp_path, capsys, monkeypatch):
    grid = tmp_path / "grid"
    run(capsys, "gen", "--n", 120, "--avg-degree", 8, "-o", grid / "g")
    one, two = tmp_path / "1.csv", tmp_path / "2.csv"
    run(capsys, "experiment", "--grid-dir", grid, "--runs", 2, "-o", one)
    monkeypatch.setenv("KPATHNET_THREADS", "2")
    run(capsys, "experiment", "--grid-dir", grid, "--runs", 2, "-o", two)
    assert one.read_bytes() == two.read_bytes()
    man = json.loads((tmp_path / "2.csv.manifest.json").read_text())
    assert man["threads"] == 2


def test_oracle_subcommand(tmp_path, tri, capsys):
    code, stdout, _ = run(capsys, "oracle", "modularity", tri)
    assert code == 0 and json.loads(stdout)["q"] == pytest.approx(0.5)
    p3 = tmp_path / "p3.txt"
    p3.write_text("0 1\n1 2\n")
    out = json.loads(run(capsys, "oracle", "walk", p3, "--kappa", 1,
                         "--source-policy", "uniform")[1])
    assert out["probability"] == [0.5, 0.5]
    out = json.loads(run(capsys, "oracle", "betweenness", p3)[1])
    assert out["betweenness"] == [4.0, 4.0]
