"""GraphSpace: metric construction, canonical geodesics, serialization."""
from __future__ import annotations

import numpy as np
import pytest

from medianlab.errors import (
    DisconnectedGraph,
    InvalidEdge,
    InvalidParams,
    ParseError,
    SizeCapExceeded,
)
from medianlab.generators import gen_product, gen_tree
from medianlab.space import MATRIX_CAP, GraphSpace, build_space

from oracles import brute_four_point_delta2, brute_parents, dijkstra_all_pairs


def cycle(n: int) -> GraphSpace:
    return build_space([(i, (i + 1) % n, 1) for i in range(n)])


# -- construction and validation ---------------------------------------------


def test_distances_match_dijkstra_oracle():
    for space in (
        gen_tree("random", n=23, seed=11),
        cycle(9),
        build_space([(0, 1, 4), (1, 2, 1), (2, 3, 2), (0, 3, 9), (1, 3, 2)]),
    ):
        assert np.array_equal(
            space.dist.astype(np.int64), dijkstra_all_pairs(space.n, space.edges)
        )
        space.assert_metric()


def test_edge_validation():
    with pytest.raises(InvalidEdge):
        GraphSpace(3, [(0, 1), (1, 3)])  # vertex out of range
    with pytest.raises(InvalidEdge):
        GraphSpace(3, [(0, 0)])  # loop
    with pytest.raises(InvalidEdge):
        GraphSpace(3, [(0, 1, 0), (1, 2)])  # zero weight would break the metric
    with pytest.raises(InvalidEdge):
        GraphSpace(3, [(0, 1, -2), (1, 2)])
    with pytest.raises(InvalidEdge):
        GraphSpace(3, [(0, 1), (1, 0), (1, 2)])  # duplicate (undirected)


def test_connectivity_and_size_caps():
    with pytest.raises(DisconnectedGraph):
        GraphSpace(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedGraph):
        GraphSpace(2, [])
    with pytest.raises(SizeCapExceeded):
        GraphSpace(MATRIX_CAP + 1, [(i, i + 1) for i in range(MATRIX_CAP)])
    with pytest.raises(InvalidParams):
        GraphSpace(0, [])
    single = GraphSpace(1, [])
    assert single.diameter == 0


def test_peripheral_validation():
    with pytest.raises(InvalidParams):
        GraphSpace(3, [(0, 1), (1, 2)], peripherals=[(0, 0)])
    with pytest.raises(InvalidParams):
        GraphSpace(3, [(0, 1), (1, 2)], peripherals=[(0, 5)])
    sp = GraphSpace(3, [(0, 1), (1, 2)], peripherals=[(0, 1)])
    assert sp.peripherals == ((0, 1),)


# -- metric accessors ----------------------------------------------------------


def test_interval_ball_gromov():
    path = gen_tree("path", n=7)
    assert list(path.metric_interval(1, 5)) == [1, 2, 3, 4, 5]
    assert list(path.ball(3, 2)) == [1, 2, 3, 4, 5]
    assert path.gromov_product(0, 6, 3) == 0.0
    assert path.gromov_product(0, 0, 3) == 3.0
    with pytest.raises(InvalidParams):
        path.check_vertex(9)


# -- canonical geodesics ---------------------------------------------------------


def test_parents_match_brute_oracle():
    for space in (gen_tree("random", n=15, seed=3), cycle(8),
                  gen_product([gen_tree("path", n=3), gen_tree("path", n=4)])):
        assert np.array_equal(
            space.parents.astype(np.int64),
            brute_parents(space.dist, space.edges),
        )


def test_geodesic_between_is_canonical_and_tight():
    grid = gen_product([gen_tree("path", n=4), gen_tree("path", n=4)])
    g = grid.geodesic_between(0, 15)
    assert g.vertices[0] == 0 and g.vertices[-1] == 15
    assert g.length == grid.d(0, 15) == len(g.vertices) - 1
    # smallest-index parents: from 0 the walk hugs the low-id side
    rev = grid.geodesic_between(15, 0)
    assert rev.vertices == tuple(reversed(g.vertices))
    D = grid.dist
    for a, b in zip(g.vertices, g.vertices[1:]):
        assert D[a, b] == 1


# -- hyperbolicity ----------------------------------------------------------------


def test_four_point_exhaustive_matches_oracle():
    for space in (gen_tree("random", n=12, seed=8), cycle(6), cycle(9)):
        est = space.estimate_hyperbolicity()
        assert est.exhaustive
        assert est.delta2 == brute_four_point_delta2(space.dist)
        assert est.delta == est.delta2 / 2.0
        if est.delta2 > 0:
            a, b, c, d = est.witness
            D = space.dist.astype(np.int64)
            s = sorted(
                (int(D[a, b] + D[c, d]), int(D[a, c] + D[b, d]), int(D[a, d] + D[b, c]))
            )
            assert s[2] - s[1] == est.delta2


def test_four_point_sampled_is_a_lower_bound():
    space = cycle(10)
    exact = space.estimate_hyperbolicity()
    with pytest.raises(SizeCapExceeded):
        space.estimate_hyperbolicity(cap=4)
    sampled = space.estimate_hyperbolicity(cap=4, sample=300, seed=1)
    assert not sampled.exhaustive
    assert 0 <= sampled.delta2 <= exact.delta2
    again = space.estimate_hyperbolicity(cap=4, sample=300, seed=1)
    assert again.witness == sampled.witness and again.delta2 == sampled.delta2


# -- serialization -------------------------------------------------------------


def test_text_round_trip_is_exact():
    space = GraphSpace(
        5,
        [(0, 1, 2), (1, 2, 1), (2, 3, 1), (3, 4, 1)],
        name="probe",
        meta={"origin": "unit-test"},
        peripherals=[(1, 2, 3)],
    )
    text = space.to_text()
    back = GraphSpace.from_text(text)
    assert back.to_text() == text
    assert back.content_key() == space.content_key()
    assert back.peripherals == space.peripherals
    assert back.name == "probe" and back.meta["origin"] == "unit-test"
    assert np.array_equal(back.dist, space.dist)


def test_from_text_errors():
    with pytest.raises(ParseError):
        GraphSpace.from_text("")  # no header
    with pytest.raises(ParseError):
        GraphSpace.from_text("3\n0 1\n1 2\n")  # header needs two fields
    with pytest.raises(ParseError):
        GraphSpace.from_text("3 5\n0 1\n1 2\n")  # edge count mismatch
    with pytest.raises(ParseError):
        GraphSpace.from_text("3 2\n0 1\n1 2\nP 3 0 1\n")  # peripheral count
    with pytest.raises(ParseError):
        GraphSpace.from_text("3 2\n0 1\nx y\n")  # non-integers


def test_save_and_from_file(tmp_path):
    space = gen_tree("star", n=6)
    p = tmp_path / "star.graph"
    space.save(p)
    back = GraphSpace.from_file(p)
    assert np.array_equal(back.dist, space.dist)


def test_is_tree_and_repr():
    assert gen_tree("path", n=4).is_tree()
    assert not cycle(4).is_tree()
    assert "n=4" in repr(gen_tree("path", n=4))
