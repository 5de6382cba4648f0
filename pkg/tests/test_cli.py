"""End-to-end CLI: verbs, reports, verify round trips, errors, config,
backends, and the table cache."""
from __future__ import annotations

import json
import os

import pytest

from medianlab._backend import HAS_NUMBA

from conftest import run_cli


def _report(cli, argv):
    code, out = cli(argv)
    assert code == 0, out
    return json.loads(out)


def _verify_ok(cli, path):
    code, out = cli(["verify", "--report", path])
    assert code == 0, out
    lines = out.strip().splitlines()
    assert all(l.startswith("ok ") for l in lines[:-1])
    assert lines[-1].startswith("verified ")
    n = lines[-1].split()[1]
    assert n.split("/")[0] == n.split("/")[1]
    return out


# -- gen --------------------------------------------------------------------


def test_gen_writes_a_loadable_graph_file(cli, tmp_path):
    p = str(tmp_path / "g.graph")
    code, out = cli(["gen", "--spec", "random:12,seed=4", "--out", p])
    assert code == 0 and "wrote 12 vertices, 11 edges" in out
    code, stdout_text = cli(["gen", "--spec", "random:12,seed=4"])
    assert code == 0 and stdout_text == open(p).read()
    # the written file round-trips as a first-class space spec
    rep = _report(cli, ["certify", "--space", f"file:{p}", "--op", "tree",
                        "--no-timestamp"])
    assert rep["results"]["C"] == 1.0


def test_gen_convenience_flags(cli, tmp_path):
    a = str(tmp_path / "a.graph")
    b = str(tmp_path / "b.graph")
    assert cli(["gen", "--tree", "regular", "--branching", "3", "--depth", "2",
                "--out", a])[0] == 0
    assert cli(["gen", "--spec", "regular:3,2", "--out", b])[0] == 0
    assert open(a).read() == open(b).read()
    code, out = cli(["gen"])
    assert code == 3 and json.loads(out)["error"] == "ParseError"


# -- certify / verify round trips ------------------------------------------------


def test_certify_report_verifies(cli, tmp_path):
    p = str(tmp_path / "cert.json")
    code, out = cli(["certify", "--space", "relhyp:3,rays=4;4;4", "--op", "tc",
                     "--out", p, "--no-timestamp"])
    assert code == 0
    rep = json.load(open(p))
    assert rep["results"]["m0"] is True and rep["results"]["C"] >= 1.0
    assert {c["claim"] for c in rep["claims"]} == {"cm1_at", "cm2_at"}
    _verify_ok(cli, p)


def test_verify_fails_on_a_corrupted_report(cli, tmp_path):
    p = str(tmp_path / "cert.json")
    cli(["certify", "--space", "relhyp:3,rays=4;4;4", "--op", "tc", "--out", p,
         "--no-timestamp"])
    rep = json.load(open(p))
    rep["claims"][0]["value"] += 1
    json.dump(rep, open(p, "w"))
    code, out = cli(["verify", "--report", p])
    assert code == 2
    assert "FAIL" in out and json.loads(out.strip().splitlines()[-1])["code"] == 2


def test_every_report_verb_verifies(cli, tmp_path):
    runs = {
        "closeness.json": ["closeness", "--space", "bushy:trivalent_tree,3",
                           "--op", "tree", "--op2", "tc"],
        "lemma22.json": ["lemma22", "--space", "random:12,seed=5", "--op",
                         "tree", "--radii", "0,1"],
        "quasigeo.json": ["quasigeo", "--space", "relhyp:3,rays=4;4;4",
                          "--op", "tc", "--x", "0", "--y", "20"],
        "through.json": ["quasigeo", "--space", "relhyp:3,rays=4;4;4",
                         "--op", "tc", "--x", "0", "--y", "20", "--p", "9"],
        "qc.json": ["quasiconvexity", "--space", "random:14,seed=6",
                    "--op", "tree", "--interval", "0,13"],
        "rank.json": ["rank", "--space", "product:path:3|path:3",
                      "--op", "product"],
        "bary3.json": ["barycentre", "--space", "relhyp:4,rays=8;8;8",
                       "--triple", "23,31,39"],
        "bary.json": ["barycentre", "--space", "relhyp:4,rays=8;8;8"],
    }
    for fname, argv in runs.items():
        p = str(tmp_path / fname)
        code, out = cli(argv + ["--out", p, "--no-timestamp"])
        assert code == 0, (fname, out)
        _verify_ok(cli, p)


def test_experiments_verify(cli, tmp_path):
    runs = {
        "uniq.json": ["experiment", "uniqueness", "--space",
                      "bushy:trivalent_tree,3", "--radii", "2,4"],
        "shear.json": ["experiment", "shear", "--n", "4"],
        "bary.json": ["experiment", "barycentre", "--flat-sizes", "3,4"],
        "morse.json": ["experiment", "morse", "--space", "relhyp:3,rays=6;6;6",
                       "--geodesics", "2"],
    }
    for fname, argv in runs.items():
        p = str(tmp_path / fname)
        code, out = cli(argv + ["--out", p, "--no-timestamp"])
        assert code == 0, (fname, out)
        _verify_ok(cli, p)


def test_uniqueness_experiment_has_a_csv_form(cli, tmp_path):
    p = str(tmp_path / "curve.csv")
    code, _ = cli(["experiment", "uniqueness", "--space",
                   "bushy:trivalent_tree,3", "--radii", "2,4",
                   "--format", "csv", "--out", p])
    assert code == 0
    lines = open(p).read().splitlines()
    assert lines[0] == "radius,pair,center,sup_distance,witness"
    assert len(lines) >= 3


# -- errors ----------------------------------------------------------------------


def test_errors_are_json_with_documented_exit_codes(cli):
    code, out = cli(["certify", "--space", "nonsense:9", "--op", "tree"])
    err = json.loads(out)
    assert code == 3 and err["error"] == "ParseError" and err["code"] == 3
    code, out = cli(["quasiconvexity", "--space", "path:5", "--op", "tree"])
    err = json.loads(out)
    assert code == 17 and err["error"] == "InvalidParams"
    code, out = cli(["certify", "--space", "path:5", "--op", "tree",
                     "--format", "csv"])
    err = json.loads(out)
    assert code == 17 and "no CSV form" in err["message"]
    code, out = cli(["certify", "--space", "cycle:5", "--op", "tree"])
    assert code == 3  # spec grammar has no cycles
    code, out = cli(["certify", "--space", "path:5", "--op", "graph",
                     "--backend", "numpy"])
    assert code == 0  # trees are median graphs
    code, out = cli(["certify", "--space", "path:70", "--op", "tree"])
    assert code == 0  # lazy rule operator for spaces above the table cap


# -- config files, backends, cache -------------------------------------------------


def test_config_file_supplies_defaults_but_argv_wins(cli, tmp_path):
    cfg = tmp_path / "lab.cfg"
    cfg.write_text("space=path:9\nop=tree\nno-timestamp=\n# comment\n")
    code, out = cli(["certify", "--config", str(cfg)])
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["space"] == "path:9" and "timestamp" not in rep
    code, out = cli(["certify", "--config", str(cfg), "--space", "path:4"])
    assert json.loads(out)["config"]["space"] == "path:4"


@pytest.mark.skipif(not HAS_NUMBA, reason="numba backend unavailable")
def test_backends_produce_byte_identical_reports(cli):
    argv = ["lemma22", "--space", "relhyp:3,rays=4;4;4", "--op", "tc",
            "--radii", "0,1", "--no-timestamp"]
    a = run_cli(argv + ["--backend", "numpy"])
    b = run_cli(argv + ["--backend", "numba"])
    assert a[0] == b[0] == 0
    ja, jb = json.loads(a[1]), json.loads(b[1])
    assert ja["config"].pop("backend") == "numpy"
    assert jb["config"].pop("backend") == "numba"
    assert json.dumps(ja, sort_keys=True) == json.dumps(jb, sort_keys=True)


def test_table_cache_is_created_and_reused(cli, tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("MEDIANLAB_CACHE", str(cache))
    argv = ["certify", "--space", "random:15,seed=7", "--op", "tree",
            "--no-timestamp"]
    code, first = cli(argv)
    assert code == 0
    files = [f for f in os.listdir(cache) if f.startswith("table_")
             and f.endswith(".npy")]
    assert len(files) == 1
    stamp = os.stat(cache / files[0]).st_mtime_ns
    code, second = cli(argv)
    assert code == 0 and second == first
    assert os.stat(cache / files[0]).st_mtime_ns == stamp  # reused, not rewritten


def test_deterministic_reports_across_runs(cli):
    argv = ["experiment", "shear", "--n", "4", "--no-timestamp"]
    assert run_cli(argv) == run_cli(argv)
