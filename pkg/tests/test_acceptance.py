"""Acceptance gate: ten criteria, one printed verdict line each.

Each criterion prints ``criterion NN <name>: PASS`` (or FAIL) so the suite
output doubles as the checklist.  Reports written along the way accumulate
in a registry; the final criterion replays every witness in every one of
them through the CLI verifier and regenerates each byte-identically.
"""
from __future__ import annotations

import functools
import itertools
import json
import os
import tempfile
import time

import numpy as np

from conftest import SUITE, SUITE_GRAPHS, SUITE_TREES, run_cli
from oracles import FROZEN, oracle_median_table

from medianlab.coarse import (
    certify,
    extract_quasigeodesic,
    lemma22_suite,
    quasiconvexity,
    through_point_quasigeodesic,
)
from medianlab.exact import check_median_axioms, tree_median
from medianlab.generators import encode_coords, gen_bushy
from medianlab.specs import operator_from_spec, space_from_spec

REPORT_DIR = tempfile.mkdtemp(prefix="medianlab-acceptance-")
REPORTS: list[tuple[str, list[str]]] = []


def criterion(num: int, name: str):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*a, **kw):
            try:
                fn(*a, **kw)
            except BaseException:
                print(f"criterion {num:02d} {name}: FAIL")
                raise
            print(f"criterion {num:02d} {name}: PASS")

        return wrapper

    return deco


@functools.lru_cache(maxsize=None)
def _space(spec: str):
    return space_from_spec(spec)


def _suite_op(spec: str):
    kind = "tree" if spec in SUITE_TREES else "product"
    return operator_from_spec(_space(spec), kind, spec)


def _run_report(fname: str, argv: list[str]) -> dict:
    path = os.path.join(REPORT_DIR, fname)
    full = list(argv) + ["--out", path, "--no-timestamp"]
    code, out = run_cli(full)
    assert code == 0, (argv, out)
    REPORTS.append((path, full))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@criterion(1, "exact medians match the brute-force interval oracle")
def test_criterion_01():
    t0 = time.monotonic()
    assert len(SUITE_TREES) == 10 and len(SUITE_GRAPHS) == 5
    for spec in SUITE:
        space = _space(spec)
        assert space.n <= 60, spec
        op = _suite_op(spec)
        assert check_median_axioms(op).passed, spec
        assert np.array_equal(op.table(), oracle_median_table(space.dist)), spec
    assert time.monotonic() - t0 < 60.0


@criterion(2, "exact medians certify cm1=0 and cm2<=1 exhaustively")
def test_criterion_02():
    for i, spec in enumerate(SUITE):
        kind = "tree" if spec in SUITE_TREES else "product"
        rep = _run_report(f"c2_certify_{i:02d}.json",
                          ["certify", "--space", spec, "--op", kind])
        res = rep["results"]
        assert res["m0"] is True, spec
        assert res["cm1_error"] == 0, spec
        assert res["cm2_constant"] <= 1, spec
        assert res["scope"]["mode"] == "exhaustive", spec


@criterion(3, "six-part constants: finite everywhere, zero for exact, stable under shear")
def test_criterion_03():
    for spec in SUITE:
        op = _suite_op(spec)
        suite = lemma22_suite(op, certify(op), R_values=(0, 1, 2),
                              sample=20000, seed=0)
        for part in range(1, 7):
            assert np.isfinite(suite[part].K), (spec, part)
        assert suite[1].K == 0 and suite[2].K == 0, spec
        assert suite[3].detail["per_R"][0]["value"] == 0, spec
    rep = _run_report("c3_lemma_tc.json",
                      ["lemma22", "--space", "relhyp:3,rays=6;6;6", "--op", "tc",
                       "--radii", "0,1,2", "--sample", "20000", "--seed", "0"])
    for part in range(1, 7):
        assert np.isfinite(rep["results"][str(part)]["K"])
    Ks = {}
    for n in (8, 16):
        rep = _run_report(
            f"c3_lemma_shear{n}.json",
            ["lemma22", "--space", f"product:path:{n + 1}|path:{3 * n + 1}",
             "--op", "sheared", "--radii", "0,1,2",
             "--sample", "20000", "--seed", "0"])
        Ks[n] = tuple(rep["results"][str(p)]["K"] for p in range(1, 7))
        assert Ks[n] == FROZEN["shear_lemma_K"][n], Ks[n]
    for k8, k16 in zip(Ks[8], Ks[16]):
        assert k16 <= 2 * k8 + 1e-9, (Ks[8], Ks[16])


@criterion(4, "interval chains are contained, short-stepped, tightly parametrised")
def test_criterion_04():
    for spec in SUITE:
        space = _space(spec)
        op = _suite_op(spec)
        cert = certify(op)
        for x in range(space.n):
            for y in range(x + 1, space.n):
                v = extract_quasigeodesic(op, cert, x, y).verified
                assert v["contained"], (spec, x, y)
                assert v["max_step"] <= 2 * cert.C, (spec, x, y)
                assert v["chain_gap"] <= 3, (spec, x, y)
        rng = np.random.Generator(np.random.Philox(0))
        for _ in range(20):
            x, y, p = (int(v) for v in rng.integers(0, space.n, size=3))
            if x == y:
                continue
            _, detail = through_point_quasigeodesic(op, cert, x, y, p)
            assert detail["through_distance"] <= cert.C + 2, (spec, x, y, p)
    _run_report("c4_quasigeo.json",
                ["quasigeo", "--space", "random:60,seed=3", "--op", "tree",
                 "--x", "0", "--y", "59"])
    _run_report("c4_through.json",
                ["quasigeo", "--space", "relhyp:3,rays=6;6;6", "--op", "tc",
                 "--x", "0", "--y", "20", "--p", "9"])


@criterion(5, "tree-vs-triangle-center curves stay bounded on bushy spaces")
def test_criterion_05():
    for tag, spec in (("trivalent5", "bushy:trivalent_tree,5"),
                      ("tripod", "bushy:tripod_thickened,4")):
        vals = {}
        for r in (4, 8, 16):
            rep = _run_report(
                f"c5_{tag}_r{r}.json",
                ["closeness", "--space", spec, "--op", "tree", "--op2", "tc",
                 "--scope", "ball", "--center", "0", "--radius", str(r)])
            vals[r] = rep["results"]["sup_distance"]
        assert vals[16] <= vals[4] + 2, (spec, vals)
        assert vals == {4: 0, 8: 0, 16: 0}, (spec, vals)  # trees: identically 0


@criterion(6, "product operators agree and boxes are quasiconvex")
def test_criterion_06():
    spec = "product:bushy:trivalent_tree,3|bushy:trivalent_tree,3"
    rep = _run_report("c6_closeness.json",
                      ["closeness", "--space", spec,
                       "--op", "product", "--op2", "tcproduct"])
    assert rep["results"]["sampled"] is False
    assert rep["results"]["sup_distance"] == FROZEN["product_tc_closeness"]
    assert rep["results"]["sup_distance"] <= 2
    # A box is a product of two factor segments and the standard median acts
    # coordinatewise, so a box's escape constant is the worst factor-segment
    # escape.  Check every factor segment exhaustively...
    factor, _ = gen_bushy("trivalent_tree", depth=3)
    fop = tree_median(factor)
    for a, b in itertools.combinations(range(factor.n), 2):
        seg = [int(v) for v in fop.interval(a, b)]
        assert quasiconvexity(fop, seg).constant == 0, (a, b)
    # ... and spot-check seeded boxes directly on the product operator.
    op = _suite_op(spec) if spec in SUITE else operator_from_spec(
        _space(spec), "product", spec)
    sizes = (factor.n, factor.n)
    rng = np.random.Generator(np.random.Philox(0))
    for _ in range(40):
        a, b, c, d = (int(v) for v in rng.integers(0, factor.n, size=4))
        seg1 = [int(v) for v in fop.interval(a, b)]
        seg2 = [int(v) for v in fop.interval(c, d)]
        box = [int(v) for v in encode_coords(
            [np.repeat(seg1, len(seg2)), np.tile(seg2, len(seg1))], sizes)]
        assert quasiconvexity(op, box).constant <= 2, (a, b, c, d)


@criterion(7, "shearing separates operators linearly with stable certificates")
def test_criterion_07():
    Cs = {}
    for n in (8, 16, 32):
        rep = _run_report(f"c7_shear{n}.json",
                          ["experiment", "shear", "--n", str(n)])
        rows = {r["radius"]: r["sup_distance"] for r in rep["results"]["rows"]}
        assert rows[n] >= n / 2, (n, rows)
        assert rows[n] == FROZEN["shear_window_closeness"][n], (n, rows)
        Cs[n] = rep["results"]["certificate"]["C"]
        assert abs(Cs[n] - FROZEN["shear_C"][n]) < 1e-9, (n, Cs[n])
    assert max(Cs.values()) <= 2 * min(Cs.values()), Cs


@criterion(8, "barycentre trichotomy classifies every triple")
def test_criterion_08():
    rep = _run_report("c8_barycentre.json",
                      ["experiment", "barycentre", "--flat-sizes", "4,8,16"])
    assert rep["results"]["all_ok"]
    per = rep["results"]["per_size"]
    for F in (4, 8, 16):
        row = per[str(F)]
        assert row["all_ok"], F
        assert row["delta_used"] == FROZEN["barycentre_default_delta"][F], F
        assert row["max_min_delta"] == FROZEN["barycentre_max_min_delta"][F], F
        assert tuple(row["ray_endpoints"]) == FROZEN["barycentre_ray_endpoints"][F]
        assert row["ray_endpoint_kind"] == "peripheral", F
    assert per["16"]["max_min_delta"] <= per["4"]["max_min_delta"] + 2


@criterion(9, "quasiconvexity is bounded by the empirical Morse gauge")
def test_criterion_09():
    runs = (("c9_morse_relhyp.json", "relhyp:4,rays=8;8;8", "tc", True),
            ("c9_morse_tripod.json", "bushy:tripod_thickened,4", "tree", False))
    for fname, spec, opname, has_flat in runs:
        rep = _run_report(fname, ["experiment", "morse", "--space", spec,
                                  "--op", opname])
        assert rep["results"]["all_ok"], spec
        subsets = rep["results"]["subsets"]
        assert ("peripheral0" in subsets) == has_flat, spec
        assert any(k.startswith("geodesic") for k in subsets), spec
        for name, row in subsets.items():
            assert row["ok"] and row["Q"] <= row["bound"] == row["gauge"] + 2
            assert row["corpus_size"] == 200, (spec, name)


@criterion(10, "every report verifies and regenerates byte-identically")
def test_criterion_10():
    assert len(REPORTS) >= 30, (
        "report registry is empty; the acceptance file must run as a whole")
    for path, _ in REPORTS:
        code, out = run_cli(["verify", "--report", path])
        assert code == 0, (path, out)
        assert "FAIL" not in out, (path, out)
        last = out.strip().splitlines()[-1]
        assert last.startswith("verified "), (path, out)
    for path, argv in REPORTS:
        dup = path + ".again"
        argv2 = [dup if a == path else a for a in argv]
        code, _ = run_cli(argv2)
        assert code == 0, argv2
        with open(path, "rb") as f1, open(dup, "rb") as f2:
            assert f1.read() == f2.read(), path
