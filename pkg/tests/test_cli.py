import json
import os

from cayleycount.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_and_count(tmp_path, capsys):
    gpath = str(tmp_path / "g.json")
    code, _, _ = run_cli(["build", "--group", "Z16", "--gens", "1,3,13,15", "-o", gpath], capsys)
    assert code == 0
    data = json.load(open(gpath))
    assert data["group"] == {"factors": [16]}
    assert data["report"]["tool"] == "cayleycount"

    code, out, _ = run_cli(["count", gpath], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["i"] == "767"
    assert rep["crosscheck"] is True


def test_build_construction_and_excess(tmp_path, capsys):
    rpath = str(tmp_path / "ring.json")
    code, _, _ = run_cli(["build", "gadget-ring", "--d", "3", "--t", "2",
                          "--seed", "7", "-o", rpath], capsys)
    assert code == 0
    data = json.load(open(rpath))
    assert data["provenance"]["d"] == 3
    code, out, _ = run_cli(["count", rpath, "--no-crosscheck"], capsys)
    rep = json.loads(out)
    assert int(rep["i"]) >= 2 ** 21
    assert "excess_log2" in rep


def test_build_reproducible(tmp_path, capsys):
    p1, p2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    for p in (p1, p2):
        code, _, _ = run_cli(["build", "gadget-ring", "--d", "3", "--t", "2",
                              "--seed", "9", "-o", p], capsys)
        assert code == 0
    d1, d2 = json.load(open(p1)), json.load(open(p2))
    d1.pop("report"); d2.pop("report")  # header carries wall time
    assert d1 == d2


def test_table_csv(tmp_path, capsys):
    gpath = str(tmp_path / "g.json")
    run_cli(["build", "odd-circulant", "--n", "8", "--d", "3", "-o", gpath], capsys)
    code, out, _ = run_cli(["table", gpath], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "a,g,t,count"
    rows = [tuple(int(x) for x in line.split(",")) for line in lines[1:]]
    assert all(t == 3 for _, _, t, _ in rows)


def test_non_generating_warning(tmp_path, capsys):
    gpath = str(tmp_path / "g.json")
    code, _, err = run_cli(["build", "--group", "Z6", "--gens", "2,4", "-o", gpath], capsys)
    assert code == 0
    assert "warning" in err
    assert os.path.exists(gpath)


def test_usage_errors(tmp_path, capsys):
    code, _, err = run_cli(["build", "--group", "Z6", "--gens", "2"], capsys)
    assert code == 3  # not symmetric without --symmetrize
    code, _, _ = run_cli(["build", "--group", "Z6"], capsys)
    assert code == 3


def test_symmetrize_flag(tmp_path, capsys):
    gpath = str(tmp_path / "g.json")
    code, _, _ = run_cli(["build", "--group", "Z8", "--gens", "1", "--symmetrize",
                          "-o", gpath], capsys)
    assert code == 0
    assert json.load(open(gpath))["generators"] == [[1], [7]]


def test_budget_exit_code(tmp_path, capsys):
    rpath = str(tmp_path / "ring.json")
    run_cli(["build", "gadget-ring", "--d", "3", "--t", "4", "-o", rpath], capsys)
    code, _, err = run_cli(["count", rpath, "--budget", "10"], capsys)
    assert code == 2
    assert "budget" in err


def test_verify_subcommand(tmp_path, capsys):
    out_path = str(tmp_path / "rep.json")
    code, _, err = run_cli(["verify", "kdd", "-o", out_path], capsys)
    assert code == 0
    rep = json.load(open(out_path))
    assert rep["passed"] is True
    assert rep["suite"] == "kdd"
    assert "PASS" in err


def test_containers_dump(tmp_path, capsys):
    gpath = str(tmp_path / "g.json")
    run_cli(["build", "odd-circulant", "--n", "8", "--d", "3", "-o", gpath], capsys)
    code, out, _ = run_cli(["containers", gpath], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("record,a,g,t,c_size")
    assert len(lines) == 33  # 32 records + header
    assert all(",true," in line for line in lines[1:])


def test_dump_edges(tmp_path, capsys):
    gpath = str(tmp_path / "g.json")
    run_cli(["build", "--group", "Z4", "--gens", "1,3", "-o", gpath], capsys)
    code, out, _ = run_cli(["dump-edges", gpath], capsys)
    assert code == 0
    assert set(out.strip().splitlines()) == {"0 1", "0 3", "1 2", "2 3"}


def test_env_seed(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CAYLEYCOUNT_SEED", "123")
    gpath = str(tmp_path / "g.json")
    code, _, _ = run_cli(["build", "gadget-ring", "--d", "3", "--t", "2", "-o", gpath], capsys)
    assert code == 0
    assert json.load(open(gpath))["provenance"]["seed"] == 123
