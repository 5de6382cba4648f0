"""Deterministic generators for the experiment universe.

Trees (paths, stars, regular, seeded random), bushy graphs with an empirical
bushiness report, l1 graph products, the shear construction on
(base x line) products, and relatively hyperbolic toy spaces (a grid flat
with rays at three corners).

Every generator is pure: identical parameters and seeds give identical
spaces, and each generated space carries its parameters in provenance
metadata.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParams, SizeCapExceeded, WindowOverflow
from .exact import TernaryOperator
from .space import GraphSpace

PRODUCT_CAP = 4000  # largest vertex count for generated products


# ---------------------------------------------------------------------------
# trees


def gen_tree(kind: str, **params) -> GraphSpace:
    """Generate a tree.

    kinds: ``path`` (n), ``star`` (n), ``regular`` (branching, depth),
    ``random`` (n, seed).  The regular tree has a root of full degree
    ``branching`` and interior vertices with ``branching - 1`` children,
    numbered breadth-first.
    """
    if kind == "path":
        n = int(params.pop("n"))
        if params or n < 1:
            raise InvalidParams(f"path needs n >= 1, got n={n}, extra={params}")
        edges = [(i, i + 1, 1) for i in range(n - 1)]
        return GraphSpace(
            n, edges, name=f"path{n}", meta={"generator": "tree", "kind": "path", "n": str(n)}
        )
    if kind == "star":
        n = int(params.pop("n"))
        if params or n < 1:
            raise InvalidParams(f"star needs n >= 1, got n={n}, extra={params}")
        edges = [(0, i, 1) for i in range(1, n)]
        return GraphSpace(
            n, edges, name=f"star{n}", meta={"generator": "tree", "kind": "star", "n": str(n)}
        )
    if kind == "regular":
        b = int(params.pop("branching"))
        depth = int(params.pop("depth"))
        if params or b < 2 or depth < 0:
            raise InvalidParams(
                f"regular needs branching >= 2, depth >= 0; got {b}, {depth}, extra={params}"
            )
        edges = []
        frontier = [0]
        nxt = 1
        for level in range(depth):
            newfrontier = []
            for v in frontier:
                kids = b if level == 0 else b - 1
                for _ in range(kids):
                    edges.append((v, nxt, 1))
                    newfrontier.append(nxt)
                    nxt += 1
            frontier = newfrontier
        return GraphSpace(
            nxt,
            edges,
            name=f"regular{b}d{depth}",
            meta={
                "generator": "tree",
                "kind": "regular",
                "branching": str(b),
                "depth": str(depth),
            },
        )
    if kind == "random":
        n = int(params.pop("n"))
        seed = int(params.pop("seed"))
        if params or n < 1:
            raise InvalidParams(f"random tree needs n >= 1, got n={n}, extra={params}")
        rng = np.random.Generator(np.random.Philox(seed))
        edges = [(int(rng.integers(0, i)), i, 1) for i in range(1, n)]
        return GraphSpace(
            n,
            edges,
            name=f"randtree{n}s{seed}",
            meta={"generator": "tree", "kind": "random", "n": str(n), "seed": str(seed)},
        )
    raise InvalidParams(f"unknown tree kind {kind!r}")


# ---------------------------------------------------------------------------
# bushy graphs


@dataclass(frozen=True)
class BushinessReport:
    """Empirical bushiness: for each vertex, the best triple of distinct
    boundary leaves minimising the maximum pairwise Gromov product based at
    that vertex; ``lam_max`` is the worst such value over all vertices."""

    ok: bool
    reason: str
    lam_max: float
    witness_vertex: int
    witness_leaves: tuple[int, int, int]
    per_vertex: tuple[float, ...]
    leaves: tuple[int, ...]


def bushiness_report(space: GraphSpace) -> BushinessReport:
    degrees = np.zeros(space.n, dtype=np.int64)
    for u, v, _ in space.edges:
        degrees[u] += 1
        degrees[v] += 1
    leaves = np.nonzero(degrees == 1)[0]
    if space.n == 1 or leaves.size < 3:
        return BushinessReport(
            False,
            f"only {leaves.size} boundary leaves; three directions unavailable",
            float("inf"),
            -1,
            (-1, -1, -1),
            (),
            tuple(int(v) for v in leaves),
        )
    D = space.dist.astype(np.int64)
    L = leaves
    k = L.size
    iu = np.arange(k)
    strict = (iu[:, None, None] < iu[None, :, None]) & (
        iu[None, :, None] < iu[None, None, :]
    )
    dl = D[np.ix_(L, L)]
    per = np.empty(space.n, dtype=np.float64)
    wit = np.empty((space.n, 3), dtype=np.int64)
    big = np.iinfo(np.int64).max
    for v in range(space.n):
        # doubled Gromov products of leaf pairs at v; a ray from v to itself
        # is no direction, so v is excluded from its own leaf triples
        p2 = D[L, v][:, None] + D[L, v][None, :] - dl
        own = L == v
        if own.any():
            p2 = np.where(own[:, None] | own[None, :], big // 4, p2)
        t = np.maximum(np.maximum(p2[:, :, None], p2[:, None, :]), p2[None, :, :])
        t = np.where(strict, t, big)
        flat = int(np.argmin(t))
        a, rem = divmod(flat, k * k)
        b, c = divmod(rem, k)
        if t[a, b, c] >= big // 8:
            return BushinessReport(
                False,
                f"vertex {v} has fewer than three leaf directions",
                float("inf"),
                v,
                (-1, -1, -1),
                (),
                tuple(int(t) for t in leaves),
            )
        per[v] = t[a, b, c] / 2.0
        wit[v] = (L[a], L[b], L[c])
    vstar = int(np.argmax(per))
    return BushinessReport(
        True,
        "",
        float(per[vstar]),
        vstar,
        tuple(int(t) for t in wit[vstar]),
        tuple(float(t) for t in per),
        tuple(int(t) for t in leaves),
    )


def gen_bushy(kind: str, **params) -> tuple[GraphSpace, BushinessReport]:
    """Generate a bushy graph plus its bushiness report.

    kinds: ``trivalent_tree`` (depth) and ``tripod_thickened`` (len).  The
    thickened tripod has three legs of the given length with two unit leaf
    hairs at every interior leg vertex and three at each leg end, so every
    vertex sees three leaf directions with pairwise Gromov products <= 1.
    """
    if kind == "trivalent_tree":
        depth = int(params.pop("depth"))
        if params:
            raise InvalidParams(f"unexpected params {params}")
        space = gen_tree("regular", branching=3, depth=depth)
        space.meta["generator"] = "bushy"
        space.meta["kind"] = kind
        return space, bushiness_report(space)
    if kind == "tripod_thickened":
        length = int(params.pop("len"))
        if params or length < 1:
            raise InvalidParams(f"tripod_thickened needs len >= 1, extra={params}")
        edges = []
        nxt = 1
        for _leg in range(3):
            prev = 0
            for i in range(1, length + 1):
                v = nxt
                nxt += 1
                edges.append((prev, v, 1))
                hairs = 3 if i == length else 2
                for _ in range(hairs):
                    edges.append((v, nxt, 1))
                    nxt += 1
                prev = v
        space = GraphSpace(
            nxt,
            edges,
            name=f"tripod_thickened{length}",
            meta={"generator": "bushy", "kind": kind, "len": str(length)},
        )
        return space, bushiness_report(space)
    raise InvalidParams(f"unknown bushy kind {kind!r}")


# ---------------------------------------------------------------------------
# l1 products


def product_strides(sizes: Sequence[int]) -> np.ndarray:
    strides = np.ones(len(sizes), dtype=np.int64)
    for i in range(len(sizes) - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]
    return strides


def decode_coords(ids, sizes: Sequence[int]) -> list[np.ndarray]:
    """Row-major coordinates of product vertex ids."""
    ids = np.asarray(ids, dtype=np.int64)
    strides = product_strides(sizes)
    return [(ids // s) % n for s, n in zip(strides, sizes)]


def encode_coords(coords, sizes: Sequence[int]) -> np.ndarray:
    strides = product_strides(sizes)
    out = np.zeros_like(np.asarray(coords[0], dtype=np.int64))
    for c, s in zip(coords, strides):
        out = out + np.asarray(c, dtype=np.int64) * s
    return out


def gen_product(factors: Sequence[GraphSpace], cap: int = PRODUCT_CAP) -> GraphSpace:
    """Cartesian graph product with the l1 metric.

    The product distance equals the sum of factor distances; this is
    verified against the product graph's own shortest paths at build time.
    """
    if not factors:
        raise InvalidParams("product of zero factors")
    sizes = [f.n for f in factors]
    total = int(np.prod(sizes))
    if total > cap:
        raise SizeCapExceeded(f"product has {total} vertices, cap is {cap}")
    strides = product_strides(sizes)
    a = np.arange(total, dtype=np.int64)
    edges: list[tuple[int, int, int]] = []
    for j, f in enumerate(factors):
        cj = (a // strides[j]) % sizes[j]
        for u, v, w in f.edges:
            sel = a[cj == u]
            for g, h in zip(sel, sel + (v - u) * strides[j]):
                edges.append((int(g), int(h), int(w)))
    name = "x".join(f.name or f"n{f.n}" for f in factors)
    space = GraphSpace(
        total,
        edges,
        name=name,
        meta={
            "generator": "product",
            "sizes": ",".join(str(s) for s in sizes),
            "factors": ";".join(f.name or f"n{f.n}" for f in factors),
        },
    )
    coords = decode_coords(a, sizes)
    expect = np.zeros((total, total), dtype=np.int64)
    for c, f in zip(coords, factors):
        expect += f.dist.astype(np.int64)[np.ix_(c, c)]
    assert np.array_equal(expect, space.dist.astype(np.int64)), (
        "product distances disagree with the sum of factor distances"
    )
    return space


# ---------------------------------------------------------------------------
# the shear construction


@dataclass(frozen=True)
class ShearMap:
    """A 1-Lipschitz reparametrization of the line factor of X x {0..T}.

    forward map: (x, s) -> (x, s + f(x)); valid window: s + f(x) in [0, T].
    """

    base: GraphSpace
    T: int
    f: tuple[int, ...]

    def __post_init__(self):
        if len(self.f) != self.base.n:
            raise InvalidParams("shear vector length differs from base size")
        if self.T < 0:
            raise InvalidParams("line length T must be >= 0")
        for u, v, w in self.base.edges:
            if abs(self.f[u] - self.f[v]) > w:
                raise InvalidParams(
                    f"shear not 1-Lipschitz across edge ({u},{v}): "
                    f"|{self.f[u]} - {self.f[v]}| > {w}"
                )

    @property
    def line_size(self) -> int:
        return self.T + 1

    def f_array(self) -> np.ndarray:
        return np.asarray(self.f, dtype=np.int64)

    def valid_mask(self) -> np.ndarray:
        """Boolean mask over global ids (x * (T+1) + s) of the valid window."""
        n2 = self.line_size
        ids = np.arange(self.base.n * n2, dtype=np.int64)
        x, s = ids // n2, ids % n2
        t = s + self.f_array()[x]
        return (t >= 0) & (t <= self.T)

    def window(self) -> np.ndarray:
        return np.nonzero(self.valid_mask())[0]


def default_shear(base: GraphSpace, T: int, basepoint: int = 0) -> ShearMap:
    """The distance-from-basepoint shear f(x) = d(x, x0)."""
    base.check_vertex(basepoint)
    return ShearMap(base, T, tuple(int(t) for t in base.dist[basepoint]))


def sheared_median(
    base_op: TernaryOperator, shear: ShearMap, product_space: GraphSpace | None = None
) -> TernaryOperator:
    """Conjugate a product median by the shear: mu_f = Phi^-1 o m o Phi^x3.

    ``base_op`` must be the standard product median on base x line with the
    line as second factor.  The result is exact-median on any median-closed
    part of the window; (M0) holds everywhere on the window.  Evaluation
    outside the window, or a conjugated value escaping the line range,
    raises WindowOverflow with the offending triple.
    """
    if base_op.kind != "product" or len(base_op.payload.get("sizes", ())) != 2:
        raise InvalidParams("sheared_median needs a 2-factor product median")
    n1, n2 = base_op.payload["sizes"]
    if n1 != shear.base.n or n2 != shear.line_size:
        raise InvalidParams(
            f"shear ({shear.base.n} x {shear.line_size}) does not match "
            f"product ({n1} x {n2})"
        )
    space = product_space or base_op.space
    T1 = base_op.payload["factor_ops"][0].table()
    f = shear.f_array()
    Tln = shear.T
    valid = shear.valid_mask()

    def batch_rule(X, Y, Z):
        X, Y, Z = np.broadcast_arrays(
            np.asarray(X, dtype=np.int64),
            np.asarray(Y, dtype=np.int64),
            np.asarray(Z, dtype=np.int64),
        )
        for A in (X, Y, Z):
            bad = ~valid[A]
            if np.any(bad):
                i = np.argwhere(bad)[0]
                trip = (int(X[tuple(i)]), int(Y[tuple(i)]), int(Z[tuple(i)]))
                raise WindowOverflow(f"input triple {trip} leaves the valid window")
        xs = [A // n2 for A in (X, Y, Z)]
        ts = [A % n2 + f[c] for A, c in zip((X, Y, Z), xs)]
        xa = T1[xs[0], xs[1], xs[2]].astype(np.int64)
        tb = ts[0] + ts[1] + ts[2]
        tb = tb - np.minimum(np.minimum(ts[0], ts[1]), ts[2])
        tb = tb - np.maximum(np.maximum(ts[0], ts[1]), ts[2])
        sm = tb - f[xa]
        bad = (sm < 0) | (sm > Tln)
        if np.any(bad):
            i = np.argwhere(bad)[0]
            trip = (int(X[tuple(i)]), int(Y[tuple(i)]), int(Z[tuple(i)]))
            raise WindowOverflow(
                f"conjugated value for triple {trip} leaves the line range"
            )
        return xa * n2 + sm

    def rule(x, y, z):
        return int(batch_rule(np.int64(x), np.int64(y), np.int64(z)))

    return TernaryOperator(
        space,
        "sheared",
        rule=rule,
        domain=shear.window(),
        payload={
            "shear": shear,
            "base_op": base_op,
            "f": f,
            "T": Tln,
            "n2": n2,
            "base_table": T1,
            "batch_rule": batch_rule,
        },
        label=f"sheared(T={Tln})",
    )


# ---------------------------------------------------------------------------
# relatively hyperbolic toys


@dataclass(frozen=True)
class RelHypToy:
    """A grid flat declared peripheral, with rays at three distinct corners."""

    space: GraphSpace
    flat: tuple[int, ...]
    corners: tuple[int, int, int]
    ray_endpoints: tuple[int, int, int]


def gen_relhyp_toy(flat_size: int, ray_lengths: Sequence[int]) -> RelHypToy:
    """Build the toy: flat = flat_size x flat_size grid (row-major ids),
    rays of the given lengths attached at corners (0,0), (F-1,0), (F-1,F-1).

    The flat is declared peripheral and its isometric embedding is verified
    (the restricted distance matrix equals intrinsic grid distances).
    """
    F = int(flat_size)
    rays = [int(r) for r in ray_lengths]
    if F < 1:
        raise InvalidParams("flat_size must be >= 1")
    if len(rays) != 3 or any(r < 1 for r in rays):
        raise InvalidParams("need three ray lengths >= 1")
    corners = (0, (F - 1) * F, F * F - 1)
    if F >= 2 and len(set(corners)) != 3:
        raise InvalidParams("rays must attach at distinct vertices")
    edges: list[tuple[int, int, int]] = []
    for i in range(F):
        for j in range(F):
            v = i * F + j
            if i + 1 < F:
                edges.append((v, v + F, 1))
            if j + 1 < F:
                edges.append((v, v + 1, 1))
    nxt = F * F
    endpoints = []
    for c, r in zip(corners, rays):
        prev = c
        for _ in range(r):
            edges.append((prev, nxt, 1))
            prev = nxt
            nxt += 1
        endpoints.append(prev)
    flat = tuple(range(F * F))
    space = GraphSpace(
        nxt,
        edges,
        name=f"relhyp_toy_F{F}",
        meta={
            "generator": "relhyp_toy",
            "flat_size": str(F),
            "ray_lengths": ",".join(str(r) for r in rays),
        },
        peripherals=[flat],
    )
    ii, jj = np.divmod(np.arange(F * F, dtype=np.int64), F)
    intrinsic = np.abs(ii[:, None] - ii[None, :]) + np.abs(jj[:, None] - jj[None, :])
    sub = space.dist.astype(np.int64)[: F * F, : F * F]
    assert np.array_equal(sub, intrinsic), "flat is not isometrically embedded"
    return RelHypToy(space, flat, corners, tuple(endpoints))
