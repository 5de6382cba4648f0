"""Finite graph metric spaces.

A :class:`GraphSpace` is a connected graph with positive integer edge
weights, a dense all-pairs distance matrix, canonical geodesics with
deterministic tie-breaking, Gromov products, metric intervals and a
four-point hyperbolicity estimate.  Spaces serialize to a small text format
that round-trips bit-exactly.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ._backend import get_kernels
from .errors import (
    DisconnectedGraph,
    InvalidEdge,
    InvalidParams,
    ParseError,
    SizeCapExceeded,
)

MATRIX_CAP = 5000  # largest n for which the dense distance matrix is built
FOUR_POINT_CAP = 200  # default guard for the O(n^4) hyperbolicity sweep


@dataclass(frozen=True)
class GeodesicPath:
    """One canonical shortest path; consecutive vertices are adjacent and the
    total weight equals the endpoint distance."""

    vertices: tuple[int, ...]
    length: int


@dataclass(frozen=True)
class HyperbolicityEstimate:
    """Four-point condition constant.

    ``delta2`` is the exact doubled value (an integer), ``delta`` its half;
    the witness quadruple attains it.  ``exhaustive`` is False for sampled
    lower bounds.
    """

    delta: float
    delta2: int
    witness: tuple[int, int, int, int]
    exhaustive: bool
    samples: int = 0
    seed: int | None = None


class GraphSpace:
    """Immutable connected graph with precomputed integer distances."""

    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[int, int, int]],
        name: str = "",
        meta: dict[str, str] | None = None,
        peripherals: Sequence[Sequence[int]] = (),
    ):
        if n < 1:
            raise InvalidParams(f"space needs at least one vertex, got n={n}")
        if n > MATRIX_CAP:
            raise SizeCapExceeded(
                f"n={n} exceeds the distance-matrix cap {MATRIX_CAP}"
            )
        norm: list[tuple[int, int, int]] = []
        seen: set[tuple[int, int]] = set()
        for e in edges:
            if len(e) == 2:
                u, v = e  # type: ignore[misc]
                w = 1
            else:
                u, v, w = e
            u, v, w = int(u), int(v), int(w)
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidEdge(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InvalidEdge(f"loop edge at vertex {u}")
            if w < 1:
                # zero-weight edges would identify distinct vertices and
                # break the metric axioms, so they are rejected alongside
                # negative weights
                raise InvalidEdge(f"edge ({u},{v}) has non-positive weight {w}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise InvalidEdge(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            norm.append((u, v, w))
        norm.sort()
        self.n = n
        self.edges = tuple(norm)
        self.name = name
        self.meta = dict(meta or {})
        for p in peripherals:
            vs = [int(v) for v in p]
            if len(set(vs)) != len(vs):
                raise InvalidParams("peripheral subset has repeated vertices")
            for v in vs:
                if not 0 <= v < n:
                    raise InvalidParams(f"peripheral vertex {v} out of range")
        self.peripherals = tuple(tuple(int(v) for v in p) for p in peripherals)
        self._dist = self._build_dist()
        self._parents: np.ndarray | None = None

    # -- construction -----------------------------------------------------

    def _build_dist(self) -> np.ndarray:
        n = self.n
        if not self.edges:
            if n > 1:
                raise DisconnectedGraph(f"{n} vertices with no edges")
            return np.zeros((1, 1), dtype=np.int32)
        eu = np.fromiter((e[0] for e in self.edges), dtype=np.int64)
        ev = np.fromiter((e[1] for e in self.edges), dtype=np.int64)
        ew = np.fromiter((e[2] for e in self.edges), dtype=np.int64)
        adj = csr_matrix(
            (np.concatenate([ew, ew]), (np.concatenate([eu, ev]), np.concatenate([ev, eu]))),
            shape=(n, n),
        )
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp != 1:
            raise DisconnectedGraph(f"graph has {ncomp} connected components")
        unweighted = bool(np.all(ew == 1))
        D = shortest_path(adj, method="D", directed=False, unweighted=unweighted)
        Di = D.astype(np.int64)
        if not np.array_equal(Di, D):
            raise InvalidParams("non-integral shortest-path matrix")
        return Di.astype(np.int32)

    # -- basic metric access ----------------------------------------------

    @property
    def dist(self) -> np.ndarray:
        return self._dist

    def d(self, x: int, y: int) -> int:
        return int(self._dist[x, y])

    @property
    def diameter(self) -> int:
        return int(self._dist.max())

    def check_vertex(self, *vs: int) -> None:
        for v in vs:
            if not 0 <= v < self.n:
                raise InvalidParams(f"vertex {v} out of range for n={self.n}")

    def assert_metric(self) -> None:
        """Full-scan check of the metric axioms (test oracle)."""
        D = self._dist.astype(np.int64)
        assert np.array_equal(D, D.T), "distance matrix not symmetric"
        assert np.all(np.diag(D) == 0), "nonzero diagonal"
        off = D + np.eye(self.n, dtype=np.int64) * (D.max() + 1)
        assert off.min() > 0 or self.n == 1, "zero distance between distinct vertices"
        tri = D[:, :, None] + D[None, :, :] >= D[:, None, :]
        assert bool(tri.all()), "triangle inequality violated"

    def gromov_product(self, x: int, y: int, z: int) -> float:
        """(x|y)_z = (d(x,z) + d(y,z) - d(x,y)) / 2."""
        self.check_vertex(x, y, z)
        D = self._dist
        return (int(D[x, z]) + int(D[y, z]) - int(D[x, y])) / 2.0

    def metric_interval(self, x: int, y: int) -> np.ndarray:
        """All vertices on some geodesic from x to y, ascending."""
        self.check_vertex(x, y)
        D = self._dist
        on = D[x].astype(np.int64) + D[y] == int(D[x, y])
        return np.nonzero(on)[0]

    def ball(self, center: int, radius: int) -> np.ndarray:
        self.check_vertex(center)
        return np.nonzero(self._dist[center] <= radius)[0]

    # -- canonical geodesics ------------------------------------------------

    @property
    def parents(self) -> np.ndarray:
        """parents[r, v]: smallest-index neighbour of v one step closer to r
        (-1 at v = r).  Defines the canonical shortest-path trees."""
        if self._parents is None:
            n = self.n
            par = np.full((n, n), n, dtype=np.int32)
            if self.edges:
                eu = np.fromiter((e[0] for e in self.edges), dtype=np.int64)
                ev = np.fromiter((e[1] for e in self.edges), dtype=np.int64)
                ew = np.fromiter((e[2] for e in self.edges), dtype=np.int64)
                src = np.concatenate([eu, ev])
                dst = np.concatenate([ev, eu])
                wts = np.concatenate([ew, ew])
                D = self._dist.astype(np.int64)
                for r in range(n):
                    ok = D[r, src] + wts == D[r, dst]
                    np.minimum.at(par[r], dst[ok], src[ok].astype(np.int32))
            for r in range(n):
                par[r, r] = -1
            assert not np.any(par == n), "parent missing for a reachable vertex"
            self._parents = par
        return self._parents

    def geodesic_between(self, x: int, y: int) -> GeodesicPath:
        """Canonical shortest path, deterministic: the shortest-path tree is
        rooted at the lower-indexed endpoint with smallest-index parents."""
        self.check_vertex(x, y)
        root, other = (x, y) if x <= y else (y, x)
        par = self.parents
        chain = [other]
        w = other
        while w != root:
            w = int(par[root, w])
            chain.append(w)
        chain.reverse()  # now root .. other
        if x != root:
            chain.reverse()
        return GeodesicPath(tuple(chain), int(self._dist[x, y]))

    # -- hyperbolicity -------------------------------------------------------

    def estimate_hyperbolicity(
        self,
        cap: int = FOUR_POINT_CAP,
        sample: int | None = None,
        seed: int = 0,
    ) -> HyperbolicityEstimate:
        """Four-point condition delta with witness.

        Exhaustive O(n^4) sweep when n <= cap; with ``sample`` set, a seeded
        sampled lower bound is returned instead for larger spaces.
        """
        n = self.n
        if n <= cap:
            K = get_kernels()
            delta2, a, b, c, d = K.four_point_scan(self._dist)
            delta2 = max(delta2, 0)
            return HyperbolicityEstimate(delta2 / 2.0, delta2, (a, b, c, d), True)
        if sample is None:
            raise SizeCapExceeded(
                f"n={n} exceeds the four-point sweep cap {cap}; "
                "pass a sample size for a sampled estimate"
            )
        rng = np.random.Generator(np.random.Philox(seed))
        D = self._dist.astype(np.int64)
        best = -1
        wit = (-1, -1, -1, -1)
        for _ in range(sample):
            q = rng.choice(n, size=4, replace=False)
            q.sort()
            a, b, c, d = (int(t) for t in q)
            s1 = D[a, b] + D[c, d]
            s2 = D[a, c] + D[b, d]
            s3 = D[a, d] + D[b, c]
            hi, mid, _ = sorted((s1, s2, s3), reverse=True)
            if hi - mid > best:
                best = hi - mid
                wit = (a, b, c, d)
        best = max(best, 0)
        return HyperbolicityEstimate(best / 2.0, best, wit, False, sample, seed)

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text form: sorted provenance comments, ``n m`` header,
        sorted ``u v w`` edge lines, then ``P k v1 .. vk`` peripheral lines."""
        lines = []
        if self.name:
            lines.append(f"# name={self.name}")
        for k in sorted(self.meta):
            lines.append(f"# {k}={self.meta[k]}")
        lines.append(f"{self.n} {len(self.edges)}")
        for u, v, w in self.edges:
            lines.append(f"{u} {v} {w}")
        for p in self.peripherals:
            lines.append("P " + " ".join(str(v) for v in (len(p), *p)))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "GraphSpace":
        name = ""
        meta: dict[str, str] = {}
        header: tuple[int, int] | None = None
        edges: list[tuple[int, int, int]] = []
        peripherals: list[list[int]] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, _, v = body.partition("=")
                    if k.strip() == "name":
                        name = v.strip()
                    else:
                        meta[k.strip()] = v.strip()
                continue
            parts = line.split()
            if parts[0] == "P":
                try:
                    k = int(parts[1])
                    vs = [int(t) for t in parts[2:]]
                except (IndexError, ValueError) as exc:
                    raise ParseError(f"line {lineno}: bad peripheral line") from exc
                if len(vs) != k:
                    raise ParseError(
                        f"line {lineno}: peripheral declares {k} vertices, has {len(vs)}"
                    )
                peripherals.append(vs)
                continue
            try:
                nums = [int(t) for t in parts]
            except ValueError as exc:
                raise ParseError(f"line {lineno}: expected integers, got {line!r}") from exc
            if header is None:
                if len(nums) != 2:
                    raise ParseError(f"line {lineno}: header must be 'n m'")
                header = (nums[0], nums[1])
            else:
                if len(nums) == 2:
                    edges.append((nums[0], nums[1], 1))
                elif len(nums) == 3:
                    edges.append((nums[0], nums[1], nums[2]))
                else:
                    raise ParseError(f"line {lineno}: expected 'u v [w]'")
        if header is None:
            raise ParseError("missing 'n m' header line")
        n, m = header
        if len(edges) != m:
            raise ParseError(f"header declares {m} edges, file has {len(edges)}")
        return cls(n, edges, name=name, meta=meta, peripherals=peripherals)

    @classmethod
    def from_file(cls, path) -> "GraphSpace":
        with open(path) as fh:
            return cls.from_text(fh.read())

    # -- identity ------------------------------------------------------------

    def content_key(self) -> str:
        """Hash of the canonical text; used for operator cache keys and for
        same-space checks between operators."""
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        label = self.name or "space"
        return f"GraphSpace({label}, n={self.n}, m={len(self.edges)})"


def build_space(
    edge_list: Iterable[tuple[int, ...]],
    n: int | None = None,
    name: str = "",
    meta: dict[str, str] | None = None,
    peripherals: Sequence[Sequence[int]] = (),
) -> GraphSpace:
    """Build a space from an edge list; n defaults to max index + 1."""
    edges = [tuple(int(t) for t in e) for e in edge_list]
    if n is None:
        if not edges:
            raise InvalidParams("empty edge list needs an explicit vertex count")
        n = max(max(e[0], e[1]) for e in edges) + 1
    return GraphSpace(n, edges, name=name, meta=meta, peripherals=peripherals)
