"""Generators: trees, bushy graphs, products, shears, peripheral toys."""
from __future__ import annotations

import numpy as np
import pytest

from medianlab.errors import InvalidParams, SizeCapExceeded, WindowOverflow
from medianlab.exact import product_median, tree_median
from medianlab.generators import (
    PRODUCT_CAP,
    ShearMap,
    bushiness_report,
    decode_coords,
    default_shear,
    encode_coords,
    gen_bushy,
    gen_product,
    gen_relhyp_toy,
    gen_tree,
    sheared_median,
)


# -- trees ---------------------------------------------------------------------


def test_tree_shapes():
    assert gen_tree("path", n=9).diameter == 8
    star = gen_tree("star", n=7)
    assert star.diameter == 2 and len(star.edges) == 6
    reg = gen_tree("regular", branching=3, depth=3)
    assert reg.n == 1 + 3 + 6 + 12 == 22
    deeper = gen_tree("regular", branching=3, depth=5)
    assert deeper.n == 1 + 3 + 6 + 12 + 24 + 48 == 94


def test_random_tree_is_seed_deterministic():
    a = gen_tree("random", n=30, seed=5)
    b = gen_tree("random", n=30, seed=5)
    c = gen_tree("random", n=30, seed=6)
    assert a.edges == b.edges
    assert a.edges != c.edges
    assert a.is_tree() and c.is_tree()


def test_tree_param_validation():
    with pytest.raises(InvalidParams):
        gen_tree("path", n=0)
    with pytest.raises(InvalidParams):
        gen_tree("regular", branching=1, depth=2)
    with pytest.raises(InvalidParams):
        gen_tree("banana", n=3)
    with pytest.raises(InvalidParams):
        gen_tree("path", n=3, extra=1)


# -- bushy graphs ------------------------------------------------------------------


def test_bushiness_needs_three_leaf_directions():
    rep = bushiness_report(gen_tree("path", n=6))
    assert not rep.ok and "leaves" in rep.reason


def test_trivalent_tree_is_uniformly_bushy():
    space, rep = gen_bushy("trivalent_tree", depth=3)
    assert space.n == 22 and rep.ok
    v = rep.witness_vertex
    a, b, c = rep.witness_leaves
    worst = max(
        space.gromov_product(a, b, v),
        space.gromov_product(a, c, v),
        space.gromov_product(b, c, v),
    )
    assert worst == rep.lam_max
    # bushiness is uniform: the constant does not grow with depth
    _, deeper = gen_bushy("trivalent_tree", depth=4)
    assert deeper.ok and deeper.lam_max == rep.lam_max == 2.0


def test_tripod_thickened_structure():
    space, rep = gen_bushy("tripod_thickened", len=4)
    assert space.n == 1 + 3 * (4 + 2 * 3 + 3) == 40
    assert space.is_tree() and rep.ok and rep.lam_max <= 1.0


# -- products ----------------------------------------------------------------------


def test_product_distance_is_l1():
    f1, f2 = gen_tree("path", n=4), gen_tree("star", n=5)
    prod = gen_product([f1, f2])
    assert prod.n == 20
    ids = np.arange(20)
    c1, c2 = decode_coords(ids, [4, 5])
    assert np.array_equal(encode_coords([c1, c2], [4, 5]), ids)
    D = prod.dist.astype(np.int64)
    want = f1.dist.astype(np.int64)[np.ix_(c1, c1)] + f2.dist.astype(np.int64)[
        np.ix_(c2, c2)
    ]
    assert np.array_equal(D, want)


def test_product_cap():
    big = gen_tree("path", n=70)
    with pytest.raises(SizeCapExceeded):
        gen_product([big, big])
    assert 70 * 70 > PRODUCT_CAP  # the guard above is actually exercised


# -- shears -------------------------------------------------------------------------


def test_shear_map_validation_and_window():
    base = gen_tree("path", n=4)
    with pytest.raises(InvalidParams):
        ShearMap(base, 6, (0, 2, 3, 4))  # jump of 2 across an edge
    with pytest.raises(InvalidParams):
        ShearMap(base, 6, (0, 1))  # wrong length
    with pytest.raises(InvalidParams):
        ShearMap(base, -1, (0, 1, 2, 3))
    shear = default_shear(base, 6, basepoint=0)
    assert shear.f == (0, 1, 2, 3)
    window = set(int(v) for v in shear.window())
    for g in range(base.n * 7):
        x, s = divmod(g, 7)
        assert (g in window) == (0 <= s + shear.f[x] <= 6)


def test_sheared_median_is_the_conjugated_product_median():
    base, line = gen_tree("path", n=3), gen_tree("path", n=7)
    space = gen_product([base, line])
    std = product_median([tree_median(base), tree_median(line)], product_space=space)
    shear = default_shear(base, 6)
    op = sheared_median(std, shear, product_space=space)
    n2 = 7
    f = shear.f

    def conj(g):  # forward shear
        x, s = divmod(g, n2)
        return x * n2 + s + f[x]

    def unconj(g):
        x, s = divmod(g, n2)
        return x * n2 + s - f[x]

    window = [int(v) for v in op.domain_vertices()]
    rng = np.random.Generator(np.random.Philox(0))
    for _ in range(300):
        x, y, z = (window[int(i)] for i in rng.integers(0, len(window), size=3))
        assert op.eval(x, y, z) == unconj(std.eval(conj(x), conj(y), conj(z)))


def test_sheared_median_window_overflow():
    base, line = gen_tree("path", n=3), gen_tree("path", n=7)
    space = gen_product([base, line])
    std = product_median([tree_median(base), tree_median(line)], product_space=space)
    op = sheared_median(std, default_shear(base, 6), product_space=space)
    outside = 2 * 7 + 6  # s + f(x) = 6 + 2 leaves the line range
    with pytest.raises(WindowOverflow):
        op.eval(outside, 0, 0)
    with pytest.raises(InvalidParams):
        sheared_median(tree_median(gen_tree("path", n=5)), default_shear(base, 6))


# -- relatively hyperbolic toys ---------------------------------------------------


def test_relhyp_toy_geometry():
    toy = gen_relhyp_toy(4, (8, 8, 8))
    sp = toy.space
    assert sp.n == 16 + 24
    assert toy.corners == (0, 12, 15)
    assert toy.ray_endpoints == (23, 31, 39)
    assert sp.peripherals == (tuple(range(16)),)
    # rays attach where they should: endpoint is ray_length from its corner
    for c, e in zip(toy.corners, toy.ray_endpoints):
        assert sp.d(c, e) == 8
    # and the flat keeps its intrinsic grid metric (checked at build, spot here)
    assert sp.d(0, 15) == 6


def test_relhyp_toy_validation():
    with pytest.raises(InvalidParams):
        gen_relhyp_toy(0, (2, 2, 2))
    with pytest.raises(InvalidParams):
        gen_relhyp_toy(3, (2, 2))
    with pytest.raises(InvalidParams):
        gen_relhyp_toy(3, (2, 2, 0))
    # F = 1 degenerates to a single-vertex flat with all rays at vertex 0
    tiny = gen_relhyp_toy(1, (2, 2, 2))
    assert tiny.corners == (0, 0, 0) and tiny.space.n == 7
