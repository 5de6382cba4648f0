"""Backend parity: the numba kernels must reproduce the numpy kernels
exactly — same values AND same witnesses — on every kernel, because report
bytes must not depend on which backend happened to run."""
from __future__ import annotations

import numpy as np
import pytest

from medianlab._backend import HAS_NUMBA
from medianlab import _kernels_numpy as KN
from medianlab.coarse import _as_line_product
from medianlab.exact import product_median, tree_median
from medianlab.generators import (
    default_shear,
    gen_product,
    gen_relhyp_toy,
    gen_tree,
    sheared_median,
)
from medianlab.hyperbolic import triangle_center_median
from medianlab.space import build_space

if HAS_NUMBA:
    from medianlab import _kernels_numba as KB
else:  # pragma: no cover - environment without numba
    KB = None

pytestmark = pytest.mark.skipif(not HAS_NUMBA, reason="numba not importable")


def both(fn_name, *args):
    a = getattr(KN, fn_name)(*args)
    b = getattr(KB, fn_name)(*args)
    return a, b


def assert_same(fn_name, *args):
    a, b = both(fn_name, *args)
    if isinstance(a, tuple):
        assert len(a) == len(b), fn_name
        for i, (x, y) in enumerate(zip(a, b)):
            if isinstance(x, np.ndarray):
                assert np.array_equal(x, np.asarray(y)), f"{fn_name}[{i}]"
            elif isinstance(x, float):
                assert x == pytest.approx(y, abs=0), f"{fn_name}[{i}]"
            else:
                assert int(x) == int(y), f"{fn_name}[{i}]: {x} != {y}"
    elif isinstance(a, np.ndarray):
        assert np.array_equal(a, np.asarray(b)), fn_name
    else:
        assert a == b, fn_name
    return a


@pytest.fixture(scope="module")
def tree14():
    space = gen_tree("random", n=14, seed=9)
    return space, tree_median(space).table()


@pytest.fixture(scope="module")
def grid34():
    space = gen_product([gen_tree("path", n=3), gen_tree("path", n=4)])
    op = product_median([tree_median(f) for f in
                         (gen_tree("path", n=3), gen_tree("path", n=4))],
                        product_space=space)
    return space, op.table()


@pytest.fixture(scope="module")
def toy3():
    toy = gen_relhyp_toy(3, (3, 3, 3))
    return toy, triangle_center_median(toy.space).table()


def test_m0_scan_parity(tree14, toy3):
    for sp, M in (tree14, (toy3[0].space, toy3[1])):
        assert_same("m0_scan", M)
    bad = tree14[1].copy()
    bad[2, 5, 7] = (bad[2, 5, 7] + 1) % tree14[0].n  # break symmetry
    assert_same("m0_scan", bad)
    bad2 = tree14[1].copy()
    bad2[3, 3, 6] = (bad2[3, 3, 6] + 1) % tree14[0].n  # break localisation
    assert_same("m0_scan", bad2)


def test_cm1_cm2_parity(tree14, toy3):
    for sp, M in (tree14, (toy3[0].space, toy3[1])):
        cm1 = assert_same("cm1_scan", M, sp.dist)
        cm2 = assert_same("cm2_scan", M, sp.dist)
        assert cm1[0] >= 0 and cm2[0] >= 0


def test_four_point_parity(tree14, toy3):
    assert_same("four_point_scan", tree14[0].dist)
    assert_same("four_point_scan", toy3[0].space.dist)
    tiny = gen_tree("path", n=3)
    assert_same("four_point_scan", tiny.dist)


def test_median_table_scan_parity(grid34):
    M = assert_same("median_table_scan", grid34[0].dist)
    assert M[1]
    # on failure the partial table is unspecified — compare the verdict,
    # failure triple and count, which is all the callers consume
    cycle5 = build_space([(i, (i + 1) % 5, 1) for i in range(5)])
    a, b = both("median_table_scan", cycle5.dist)
    assert a[1:] == b[1:]
    assert not a[1]


def test_interval_tables_parity(tree14, grid34):
    for sp, M in (tree14, grid34):
        assert_same("interval_members_table", M)
        assert_same("min_dist_to_interval_table", M, sp.dist)


def test_closeness_scan_parity(tree14):
    sp, M1 = tree14
    M2 = triangle_center_median(sp).table()
    full = np.arange(sp.n, dtype=np.int64)
    part = np.asarray([0, 2, 3, 7, 11], dtype=np.int64)
    assert_same("closeness_scan", M1, M2, sp.dist, full)
    assert_same("closeness_scan", M1, M2, sp.dist, part)


def test_product_closeness_scan_parity():
    base, line = gen_tree("path", n=4), gen_tree("path", n=10)
    space = gen_product([base, line])
    std = product_median([tree_median(base), tree_median(line)], product_space=space)
    sh = sheared_median(std, default_shear(base, line.n - 1), product_space=space)
    Ta1, Tb1, f1, n2, D1, D2 = _as_line_product(std)
    Ta2, Tb2, f2, _, _, _ = _as_line_product(sh)
    sub = np.intersect1d(std.domain_vertices(), sh.domain_vertices())
    assert_same(
        "product_closeness_scan", D1, D2, Ta1, Tb1, f1, Ta2, Tb2, f2, n2, sub
    )


def test_lemma_kernels_parity(toy3):
    toy, M = toy3
    sp = toy.space
    small = gen_tree("random", n=10, seed=5)
    Ms = tree_median(small).table()
    for spc, table in ((small, Ms), (sp, M)):
        assert_same("lemma_p1_scan", table, spc.dist)
        assert_same("lemma_p2_scan", table, spc.dist)
        IM = KN.interval_members_table(table)
        MD = KN.min_dist_to_interval_table(table, spc.dist)
        for R in (0, 1, 2):
            assert_same("lemma_p3_scan", table, spc.dist, MD, R)
            assert_same("lemma_p4_scan", table, spc.dist, MD, IM, R)
            assert_same("lemma_p5_scan", table, spc.dist, MD, R)


def test_quasiconvexity_scan_parity(tree14, grid34):
    rng = np.random.Generator(np.random.Philox(3))
    for sp, M in (tree14, grid34):
        sub = np.unique(rng.integers(0, sp.n, size=5)).astype(np.int64)
        assert_same("quasiconvexity_scan", M, sp.dist, sub)


def test_pair_row_parity():
    n = 9
    for u in range(n):
        for v in range(u, n):
            assert KN.pair_row(u, v, n) == KB.pair_row(u, v, n)


def test_side_dist_table_parity(tree14, toy3):
    for sp in (tree14[0], toy3[0].space):
        assert_same("side_dist_table", sp.parents, sp.dist)


def test_classify_triples_scan_parity(toy3):
    toy = toy3[0]
    sp = toy.space
    sd = KN.side_dist_table(sp.parents, sp.dist)
    pm = np.zeros((1, sp.n), dtype=bool)
    pm[0, np.asarray(toy.flat, dtype=np.int64)] = True
    for delta in (0.0, 2.0):
        assert_same("classify_triples_scan", sd, pm, sp.n, delta)
    # no peripherals at all
    assert_same(
        "classify_triples_scan", sd, np.zeros((0, sp.n), dtype=bool), sp.n, 2.0
    )


def test_triangle_center_table_parity(tree14, toy3):
    for sp in (tree14[0], toy3[0].space):
        sd = KN.side_dist_table(sp.parents, sp.dist)
        assert_same("triangle_center_table", sd, sp.dist)


def test_rank_scans_parity(tree14, grid34):
    assert_same("rank2_scan", tree14[1])   # trees: no square
    assert_same("rank2_scan", grid34[1])   # grid: first square
    assert_same("rank3_scan", grid34[1])   # grid: no 3-cube
    cube = gen_product([gen_tree("path", n=2)] * 3)
    op = product_median([tree_median(gen_tree("path", n=2))] * 3, product_space=cube)
    assert_same("rank3_scan", op.table())  # cube: first 3-cube
