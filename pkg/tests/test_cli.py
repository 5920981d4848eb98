import json
import subprocess
import sys

from fragile.cli import main


def test_run_writes_default_report(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FRAGILE_OUTPUT_DIR", str(tmp_path))
    assert main(["run", "--algorithm", "tournament", "--sizes", "8,16,32", "--trials", "2"]) == 0
    d = json.loads((tmp_path / "report-tournament.json").read_text())
    assert [r["n"] for r in d["per_size"]] == [8, 16, 32]
    assert "fit f_target: log n" in capsys.readouterr().out


def test_run_from_config_file_with_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"algorithm": "heapify", "sizes": [15, 31], "trials": 2, "fmt": "csv"}))
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(cfg), "--trials", "3", "--output", str(out)]) == 0
    assert out.read_text().splitlines()[1].endswith(",3")


def test_invalid_config_exit_code(tmp_path, capsys):
    assert main(["run", "--algorithm", "det-select", "--sizes", "8"]) == 2
    assert "rank" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run", "--algorithm", "tournament", "--sizes", "8", "--workers", "0"]) == 2


def test_argparse_errors_use_config_exit_code():
    try:
        main(["run", "--algorithm", "quicksort"])
    except SystemExit as e:
        assert e.code == 2
    else:
        raise AssertionError("expected exit")


def test_check_mode_passes_on_sound_runs(tmp_path):
    assert main(["run", "--algorithm", "heapify", "--sizes", "1000", "--trials", "3", "--check",
                 "--output", str(tmp_path / "h.json")]) == 0


def test_run_check_mode_reports_violations(tmp_path, monkeypatch, capsys):
    from fragile import harness
    monkeypatch.setattr(harness, "bound_checks", lambda *a: ["forced"])
    assert main(["run", "--algorithm", "heapify", "--sizes", "16", "--check",
                 "--output", str(tmp_path / "h.json")]) == 3
    assert "VIOLATION n=16 trial 0: forced" in capsys.readouterr().err


def test_network_verify_check_mode(tmp_path, capsys):
    # one round of random matching does not sort
    net = tmp_path / "n.txt"
    assert main(["network", "build", "--width", "8", "--kind", "halver", "--rounds", "1", "--output", str(net)]) == 0
    assert main(["network", "verify", str(net)]) == 0
    assert main(["network", "verify", str(net), "--check"]) == 3
    assert "does not sort" in capsys.readouterr().out


def test_network_commands(tmp_path, capsys):
    p = tmp_path / "b.json"
    assert main(["network", "build", "--width", "8", "--kind", "batcher", "--format", "json", "--output", str(p)]) == 0
    assert main(["network", "stats", str(p)]) == 0
    out = capsys.readouterr().out
    assert "depth 6 size 19" in out and "halver epsilon 0" in out
    assert main(["network", "verify", str(p), "--check"]) == 0
    assert main(["network", "build", "--width", "6", "--kind", "batcher"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("width 2 layers 1\n0 0 0\n")
    assert main(["network", "stats", str(bad)]) == 2


def test_adversary_commands(capsys):
    for target in ("min", "merge", "mergesort"):
        assert main(["adversary", "--target", target, "--n", "32", "--check"]) == 0
    out = capsys.readouterr().out
    assert "compared 5 times (lower bound 5)" in out
    assert main(["adversary", "--target", "mergesort", "--n", "1"]) == 2


def test_report_merge(tmp_path):
    a, b, m = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "m.json"
    main(["run", "--algorithm", "sample-min", "--sizes", "64", "--trials", "2", "--output", str(a)])
    main(["run", "--algorithm", "sample-min", "--sizes", "64", "--trials", "3", "--seed", "1", "--output", str(b)])
    assert main(["report", "merge", str(a), str(b), "--output", str(m)]) == 0
    assert json.loads(m.read_text())["per_size"][0]["trials"] == 5
    c = tmp_path / "c.json"
    main(["run", "--algorithm", "heapify", "--sizes", "64", "--output", str(c)])
    assert main(["report", "merge", str(a), str(c), "--output", str(m)]) == 2
    assert main(["report", "merge", str(tmp_path / "missing.json"), "--output", str(m)]) == 1


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "fragile.cli", "adversary", "--target", "min", "--n", "8"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "compared 3 times" in r.stdout


def test_alternative_flag_spellings(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--alg", "det-select", "--n", "64,128", "-t", "3", "--input", "random",
                 "--halver", "random:2", "--output", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["config"]["distribution"] == "uniform-permutation" and d["config"]["rank"] == 3
    net = tmp_path / "h.txt"
    assert main(["network", "build", "--kind", "halver", "--n", "8", "--rounds", "2", "--seed", "1",
                 "--output", str(net)]) == 0
    assert main(["network", "stats", "--file", str(net)]) == 0
    assert main(["network", "verify"]) == 2
    assert main(["adversary", "--target", "min", "--alg", "sample-min", "--n", "16", "--check"]) == 0
    assert main(["adversary", "--target", "merge", "--alg", "tournament", "--n", "16"]) == 2
    assert "sample-min" in capsys.readouterr().out
