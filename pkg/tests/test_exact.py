"""Exact medians: tree/graph/product constructions against the brute-force
triple-interval oracle, operator plumbing, rank search, table I/O."""
from __future__ import annotations

import numpy as np
import pytest

from medianlab.errors import (
    ArityMismatch,
    InvalidParams,
    M0Violated,
    NotATree,
    NotMedianGraph,
    ParseError,
    SizeCapExceeded,
)
from medianlab.exact import (
    TernaryOperator,
    algebra_interval,
    check_median_axioms,
    is_convex,
    load_operator_csv,
    median_graph_median,
    product_median,
    rank_estimate,
    save_operator_csv,
    tree_median,
)
from medianlab.generators import decode_coords, gen_product, gen_tree
from medianlab.space import build_space

from oracles import oracle_median_table


def cycle(n):
    return build_space([(i, (i + 1) % n, 1) for i in range(n)])


# -- constructions against the oracle -----------------------------------------


@pytest.mark.parametrize(
    "make",
    [
        lambda: gen_tree("path", n=9),
        lambda: gen_tree("star", n=8),
        lambda: gen_tree("random", n=18, seed=6),
        lambda: gen_tree("regular", branching=3, depth=2),
    ],
)
def test_tree_median_matches_oracle(make):
    space = make()
    op = tree_median(space)
    assert np.array_equal(op.table().astype(np.int64), oracle_median_table(space.dist))
    assert check_median_axioms(op).passed


def test_tree_median_rejects_non_trees():
    with pytest.raises(NotATree):
        tree_median(cycle(5))


def test_lazy_tree_median_equals_table_version():
    space = gen_tree("random", n=12, seed=1)
    eager = tree_median(space)
    lazy = tree_median(space, cap=4)  # force the rule-backed path
    assert not lazy.has_table
    idx = np.arange(space.n, dtype=np.int64)
    X, Y, Z = np.meshgrid(idx, idx, idx, indexing="ij")
    assert np.array_equal(lazy.eval_triples(X, Y, Z), eager.table().astype(np.int64))
    assert lazy.eval(3, 7, 11) == eager.eval(3, 7, 11)


def test_graph_median_matches_oracle_and_rejects_cycles():
    grid = gen_product([gen_tree("path", n=3), gen_tree("path", n=4)])
    op = median_graph_median(grid)
    assert np.array_equal(op.table().astype(np.int64), oracle_median_table(grid.dist))
    assert check_median_axioms(op).passed
    with pytest.raises(NotMedianGraph):
        median_graph_median(cycle(5))
    with pytest.raises(SizeCapExceeded):
        median_graph_median(grid, cap=4)


def test_product_median_is_coordinatewise():
    f1, f2 = gen_tree("path", n=3), gen_tree("star", n=4)
    space = gen_product([f1, f2])
    op = product_median([tree_median(f1), tree_median(f2)], product_space=space)
    t1, t2 = tree_median(f1).table(), tree_median(f2).table()
    for x in range(space.n):
        for y in range(space.n):
            for z in range(space.n):
                cx, cy, cz = (decode_coords([v], [3, 4]) for v in (x, y, z))
                want = int(t1[cx[0][0], cy[0][0], cz[0][0]]) * 4 + int(
                    t2[cx[1][0], cy[1][0], cz[1][0]]
                )
                assert op.eval(x, y, z) == want
    assert np.array_equal(op.table().astype(np.int64), oracle_median_table(space.dist))


def test_product_median_validation():
    f = gen_tree("path", n=3)
    with pytest.raises(ArityMismatch):
        product_median([])
    wrong = gen_tree("path", n=7)
    with pytest.raises(ArityMismatch):
        product_median([tree_median(f), tree_median(f)], product_space=wrong)


def test_check_median_axioms_reports_witnesses():
    space = gen_tree("path", n=5)
    M = tree_median(space).table().copy()
    M[0, 1, 2] = 4  # break symmetry (M0)
    rep = check_median_axioms(TernaryOperator(space, "broken", table=M))
    assert not rep.passed and not rep.m0_ok and rep.m0_witness is not None
    # break (M1) while keeping (M0): constant-on-sorted-triples operator
    N = np.zeros((5, 5, 5), dtype=np.int32)
    for i in range(5):
        N[i, i, :] = i
        N[i, :, i] = i
        N[:, i, i] = i
    N[0, 1, 2] = N[0, 2, 1] = N[1, 0, 2] = N[1, 2, 0] = N[2, 0, 1] = N[2, 1, 0] = 4
    rep = check_median_axioms(TernaryOperator(space, "broken", table=N))
    assert not rep.passed and rep.m0_ok and rep.m1_witness is not None
    w = rep.m1_witness
    for key in ("p", "x", "y", "z", "lhs", "rhs"):
        assert key in w
    assert w["lhs"] != w["rhs"]


# -- operator plumbing ---------------------------------------------------------


def test_operator_needs_exactly_one_backing():
    space = gen_tree("path", n=3)
    with pytest.raises(InvalidParams):
        TernaryOperator(space, "bad")
    with pytest.raises(InvalidParams):
        TernaryOperator(
            space, "bad", table=np.zeros((3, 3, 3), dtype=np.int32), rule=lambda *t: 0
        )


def test_rule_memo_eviction_and_vector_fallback():
    space = gen_tree("path", n=4)
    calls = []

    def rule(x, y, z):
        calls.append((x, y, z))
        return sorted((x, y, z))[1]

    op = TernaryOperator(space, "mid", rule=rule, memo_cap=2)
    assert op.eval(0, 1, 2) == 1
    assert op.eval(0, 1, 2) == 1  # memo hit
    assert len(calls) == 1
    op.eval(0, 1, 3)
    op.eval(0, 2, 3)  # evicts the first entry
    assert op.eval(0, 1, 2) == 1
    assert len(calls) == 4
    # vectorized fallback loops through eval
    vals = op.eval_triples([0, 1], [1, 2], [2, 3])
    assert list(vals) == [1, 2]


def test_table_materialization_and_cap():
    space = gen_tree("path", n=6)
    op = tree_median(space, cap=3)
    with pytest.raises(SizeCapExceeded):
        op.table(cap=3)
    T = op.table()  # default cap admits n=6
    assert T.shape == (6, 6, 6) and op.has_table


def test_preload_table_validation():
    space = gen_tree("path", n=4)
    op = tree_median(space, cap=2)
    with pytest.raises(InvalidParams):
        op.preload_table(np.zeros((3, 3, 3), dtype=np.int32))
    op.preload_table(tree_median(space).table())
    assert op.eval(0, 1, 3) == 1


def test_interval_and_convexity():
    space = gen_tree("path", n=7)
    op = tree_median(space)
    iv = algebra_interval(op, 1, 5)
    assert iv.members == (1, 2, 3, 4, 5)
    assert iv.project(0) == 1 and iv.project(6) == 5 and 3 in iv
    ok, wit = is_convex(op, [1, 2, 3, 4, 5])
    assert ok and wit is None
    ok, wit = is_convex(op, [1, 5])  # misses the interior
    assert not ok and wit is not None and wit[2] in (2, 3, 4)


# -- rank ------------------------------------------------------------------------


def test_rank_estimates():
    line = gen_tree("path", n=6)
    assert rank_estimate(tree_median(line)).rank == 1
    f = gen_tree("path", n=3)
    sq = gen_product([f, f])
    op2 = product_median([tree_median(f)] * 2, product_space=sq)
    est2 = rank_estimate(op2)
    assert est2.rank == 2 and len(est2.cube_witness) == 4
    e = gen_tree("path", n=2)
    cu = gen_product([e, e, e])
    op3 = product_median([tree_median(e)] * 3, product_space=cu)
    est3 = rank_estimate(op3)
    assert est3.rank == 3 and len(est3.cube_witness) == 8
    corners = est3.cube_witness
    for i in range(8):
        for j in range(8):
            for k in range(8):
                want = corners[(i & j) | (i & k) | (j & k)]
                assert op3.eval(corners[i], corners[j], corners[k]) == want
    assert rank_estimate(op3, max_rank=2).rank == 2
    with pytest.raises(SizeCapExceeded):
        rank_estimate(op3, max_rank=4)


# -- table I/O ---------------------------------------------------------------------


def test_operator_csv_round_trip(tmp_path):
    space = gen_tree("random", n=8, seed=2)
    op = tree_median(space)
    p = tmp_path / "op.csv"
    save_operator_csv(op, p)
    back = load_operator_csv(space, p)
    assert np.array_equal(back.table(), op.table())


def test_load_operator_csv_errors(tmp_path):
    space = gen_tree("path", n=3)
    p = tmp_path / "bad.csv"
    p.write_text("0,0,0,0\n")  # not total
    with pytest.raises(ParseError):
        load_operator_csv(space, p)
    p.write_text("0,0,zero,0\n")
    with pytest.raises(ParseError):
        load_operator_csv(space, p)
    p.write_text("1,0,0,0\n")  # unsorted triple
    with pytest.raises(ParseError):
        load_operator_csv(space, p)
    # total but (M0)-violating: triple (0,1,2) maps to 0, but m(0,0,1) = 1
    rows = []
    for i in range(3):
        for j in range(i, 3):
            for k in range(j, 3):
                m = 1 if (i, j, k) == (0, 0, 1) else 0
                rows.append(f"{i},{j},{k},{m}")
    p.write_text("\n".join(rows) + "\n")
    with pytest.raises(M0Violated):
        load_operator_csv(space, p)
