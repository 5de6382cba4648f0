"""Ternary operators and exact median algebras.

A :class:`TernaryOperator` is a total map V^3 -> V over a
:class:`~medianlab.space.GraphSpace`.  Small operators materialize a dense
n^3 table; larger ones evaluate lazily through a rule with a bounded memo.
Product and sheared operators additionally carry structured payloads so that
sweeps can use specialized kernels.

Exact constructions: tree medians (geodesic-walk formula), median-graph
medians (triple-interval intersection), and coordinate-wise products.
"""
from __future__ import annotations

import csv
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._backend import get_kernels
from .errors import (
    ArityMismatch,
    EmptySubset,
    InvalidParams,
    M0Violated,
    NotATree,
    NotMedianGraph,
    ParseError,
    SizeCapExceeded,
    WindowOverflow,
)
from .space import GraphSpace

TABLE_CAP = 128  # default largest n for dense n^3 operator tables
MEMO_CAP = 1 << 20  # default lazy-rule memo capacity (triples)


class TernaryOperator:
    """Total ternary operator on a space.

    Exactly one of ``table`` / ``rule`` backs evaluation.  ``domain`` (when
    not None) restricts the vertices on which the operator is meaningful
    (used by sheared operators with validity windows); sweeps respect it.
    """

    def __init__(
        self,
        space: GraphSpace,
        kind: str,
        table: np.ndarray | None = None,
        rule: Callable[[int, int, int], int] | None = None,
        domain: np.ndarray | None = None,
        payload: dict | None = None,
        label: str = "",
        memo_cap: int = MEMO_CAP,
    ):
        if (table is None) == (rule is None):
            raise InvalidParams("operator needs exactly one of table or rule")
        self.space = space
        self.kind = kind
        self._table = table
        self._rule = rule
        self.domain = None if domain is None else np.asarray(domain, dtype=np.int64)
        self.payload = payload or {}
        self.label = label or kind
        self._memo: OrderedDict[tuple[int, int, int], int] = OrderedDict()
        self._memo_cap = memo_cap
        self._lock = threading.Lock()

    # -- evaluation ---------------------------------------------------------

    def eval(self, x: int, y: int, z: int) -> int:
        if self._table is not None:
            return int(self._table[x, y, z])
        key = (x, y, z)
        with self._lock:
            hit = self._memo.get(key)
            if hit is not None:
                self._memo.move_to_end(key)
                return hit
        val = int(self._rule(x, y, z))
        with self._lock:
            self._memo[key] = val
            if len(self._memo) > self._memo_cap:
                self._memo.popitem(last=False)
        return val

    def eval_triples(self, X, Y, Z) -> np.ndarray:
        """Vectorized evaluation on aligned index arrays."""
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        Z = np.asarray(Z, dtype=np.int64)
        if self._table is not None:
            return self._table[X, Y, Z].astype(np.int64)
        batch = self.payload.get("batch_rule")
        if batch is not None:
            return batch(X, Y, Z)
        flat = np.empty(X.size, dtype=np.int64)
        for i, (x, y, z) in enumerate(zip(X.ravel(), Y.ravel(), Z.ravel())):
            flat[i] = self.eval(int(x), int(y), int(z))
        return flat.reshape(X.shape)

    def __call__(self, x: int, y: int, z: int) -> int:
        return self.eval(x, y, z)

    # -- tables ---------------------------------------------------------------

    @property
    def has_table(self) -> bool:
        return self._table is not None

    def preload_table(self, M: np.ndarray) -> None:
        """Install a previously materialized table (e.g. from a memo dir)."""
        n = self.space.n
        if M.shape != (n, n, n):
            raise InvalidParams(
                f"preloaded table shape {M.shape} does not match n={n}"
            )
        if self.domain is not None:
            raise InvalidParams("domain-restricted operators have no full table")
        self._table = np.ascontiguousarray(M, dtype=np.int32)

    def table(self, cap: int = TABLE_CAP) -> np.ndarray:
        """Dense (n, n, n) int32 table, materializing through the rule if
        needed; refuses above ``cap`` vertices."""
        if self._table is not None:
            return self._table
        n = self.space.n
        if n > cap:
            raise SizeCapExceeded(
                f"dense operator table for n={n} exceeds cap {cap}"
            )
        idx = np.arange(n, dtype=np.int64)
        X, Y, Z = np.meshgrid(idx, idx, idx, indexing="ij")
        self._table = self.eval_triples(X, Y, Z).astype(np.int32)
        return self._table

    # -- domain and intervals -------------------------------------------------

    def domain_vertices(self) -> np.ndarray:
        if self.domain is not None:
            return self.domain
        return np.arange(self.space.n, dtype=np.int64)

    def interval(self, x: int, y: int) -> np.ndarray:
        """Members of [x, y] = {op(x, y, z) : z in domain}, ascending."""
        dom = self.domain_vertices()
        vals = self.eval_triples(
            np.full(dom.shape, x, dtype=np.int64),
            np.full(dom.shape, y, dtype=np.int64),
            dom,
        )
        return np.unique(vals)

    def same_space(self, other: "TernaryOperator") -> bool:
        return self.space is other.space or (
            self.space.content_key() == other.space.content_key()
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return f"TernaryOperator({self.label}, kind={self.kind}, n={self.space.n})"


@dataclass(frozen=True)
class IntervalSet:
    """The operator interval [x, y] with its projection map z -> op(x,y,z)."""

    x: int
    y: int
    members: tuple[int, ...]
    op: TernaryOperator

    def project(self, z: int) -> int:
        return self.op.eval(self.x, self.y, z)

    def __contains__(self, v: int) -> bool:
        return v in set(self.members)


@dataclass(frozen=True)
class AxiomReport:
    """Result of the exact (M0)/(M1) scan."""

    passed: bool
    m0_ok: bool
    m0_witness: tuple[int, int, int] | None
    m1_ok: bool
    m1_witness: dict | None  # {p, x, y, z, lhs, rhs}


@dataclass(frozen=True)
class RankEstimate:
    rank: int
    cube_witness: tuple[int, ...]


# ---------------------------------------------------------------------------
# exact median constructions


def tree_median(space: GraphSpace, cap: int = TABLE_CAP) -> TernaryOperator:
    """The median operator of a tree.

    m(x,y,z) is the meeting point of the three pairwise geodesics, found by
    walking the canonical x-y path to distance (d(x,y) + d(x,z) - d(y,z))/2
    from x.
    """
    if not space.is_tree():
        raise NotATree(
            f"space {space.name or ''} has {len(space.edges)} edges on "
            f"{space.n} vertices; a tree needs n-1"
        )
    n = space.n
    D = space.dist.astype(np.int64)
    if n > cap:
        # lazy operator: the tree median is the unique minimizer of total
        # distance to the triple, so argmin of the summed distance rows
        def batch_rule(X, Y, Z):
            X = np.asarray(X, dtype=np.int64)
            S = D[X.ravel()] + D[np.asarray(Y, dtype=np.int64).ravel()]
            S += D[np.asarray(Z, dtype=np.int64).ravel()]
            return S.argmin(axis=1).reshape(X.shape)

        return TernaryOperator(
            space,
            "exact-median",
            rule=lambda x, y, z: int((D[x] + D[y] + D[z]).argmin()),
            payload={"batch_rule": batch_rule},
            label="tree-median",
        )
    M = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        for y in range(x, n):
            path = np.asarray(space.geodesic_between(x, y).vertices, dtype=np.int64)
            prefix = D[x, path]
            a = (D[x] + D[x, y] - D[y]) // 2
            pos = np.searchsorted(prefix, a)
            assert np.array_equal(prefix[pos], a), "tree meeting point off-path"
            row = path[pos].astype(np.int32)
            M[x, y, :] = row
            M[y, x, :] = row
    return TernaryOperator(space, "exact-median", table=M, label="tree-median")


def median_graph_median(space: GraphSpace, cap: int = TABLE_CAP) -> TernaryOperator:
    """The median operator of a median graph.

    For every triple the three pairwise metric intervals must intersect in
    exactly one vertex; otherwise the space is rejected with a witness.
    """
    n = space.n
    if n > cap:
        raise SizeCapExceeded(f"median table for n={n} exceeds cap {cap}")
    K = get_kernels()
    M, ok, x, y, z, cnt = K.median_table_scan(space.dist)
    if not ok:
        raise NotMedianGraph(
            f"triple ({x},{y},{z}) has {cnt} common interval points (need 1)"
        )
    return TernaryOperator(space, "exact-median", table=M, label="graph-median")


def product_median(
    ops: Sequence[TernaryOperator],
    product_space: GraphSpace | None = None,
    cap: int = TABLE_CAP,
) -> TernaryOperator:
    """Coordinate-wise median on the l1 graph product of the factor spaces.

    Vertex encoding is row-major: id = ((c0*n1 + c1)*n2 + c2)...  Factor
    operators must be full-domain table operators.
    """
    if not ops:
        raise ArityMismatch("product of zero factors")
    for op in ops:
        if op.domain is not None:
            raise ArityMismatch("factor operators must be full-domain")
    if product_space is None:
        from .generators import gen_product

        product_space = gen_product([op.space for op in ops])
    sizes = [op.space.n for op in ops]
    total = int(np.prod(sizes))
    if product_space.n != total:
        raise ArityMismatch(
            f"product space has {product_space.n} vertices, factors give {total}"
        )
    strides = np.ones(len(sizes), dtype=np.int64)
    for i in range(len(sizes) - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]
    tables = [op.table() for op in ops]

    def batch_rule(X, Y, Z):
        out = np.zeros(np.broadcast(X, Y, Z).shape, dtype=np.int64)
        for i, (T, s, sz) in enumerate(zip(tables, strides, sizes)):
            cx = (X // s) % sz
            cy = (Y // s) % sz
            cz = (Z // s) % sz
            out += T[cx, cy, cz].astype(np.int64) * s
        return out

    def rule(x, y, z):
        return int(batch_rule(np.int64(x), np.int64(y), np.int64(z)))

    op = TernaryOperator(
        product_space,
        "product",
        rule=rule,
        payload={
            "factor_ops": list(ops),
            "sizes": sizes,
            "strides": strides,
            "batch_rule": batch_rule,
        },
        label="product-median(" + ",".join(o.label for o in ops) + ")",
    )
    if total <= cap:
        op.table(cap)
    return op


# ---------------------------------------------------------------------------
# axioms, intervals, convexity, rank


def check_median_axioms(op: TernaryOperator, cap: int = TABLE_CAP) -> AxiomReport:
    """Exact (M0) and (M1) scan over the full table."""
    M = op.table(cap)
    K = get_kernels()
    ok0, _, x0, y0, z0 = K.m0_scan(M)
    if not ok0:
        return AxiomReport(False, False, (x0, y0, z0), False, None)
    err, p, x, y, z = K.cm1_scan(M, op.space.dist)
    if err > 0:
        a = int(M[x, p, y])
        lhs = int(M[a, p, z])
        rhs = int(M[x, p, int(M[y, p, z])])
        return AxiomReport(
            False,
            True,
            None,
            False,
            {"p": p, "x": x, "y": y, "z": z, "lhs": lhs, "rhs": rhs},
        )
    return AxiomReport(True, True, None, True, None)


def algebra_interval(op: TernaryOperator, x: int, y: int) -> IntervalSet:
    members = tuple(int(v) for v in op.interval(x, y))
    return IntervalSet(x, y, members, op)


def is_convex(op: TernaryOperator, subset: Sequence[int]):
    """True iff [a1, a2] stays inside the subset for every pair in it.

    Returns ``(flag, witness)`` with witness = (a1, a2, escaping point) when
    not convex.
    """
    sub = np.unique(np.asarray(list(subset), dtype=np.int64))
    if sub.size == 0:
        raise EmptySubset("convexity of the empty set is undefined here")
    if op.has_table or op.space.n <= TABLE_CAP:
        K = get_kernels()
        esc, a1, a2, p = K.quasiconvexity_scan(op.table(), op.space.dist, sub)
        if esc == 0:
            return True, None
        return False, (a1, a2, p)
    inset = np.zeros(op.space.n, dtype=bool)
    inset[sub] = True
    dom = op.domain_vertices()
    for i, a1 in enumerate(sub):
        for a2 in sub[i:]:
            vals = op.eval_triples(
                np.full(dom.shape, a1), np.full(dom.shape, a2), dom
            )
            bad = vals[~inset[vals]]
            if bad.size:
                return False, (int(a1), int(a2), int(bad[0]))
    return True, None


def rank_estimate(op: TernaryOperator, max_rank: int = 3) -> RankEstimate:
    """Largest r <= max_rank with an embedded discrete r-cube subalgebra.

    The search enumerates antipodal pairs (x, y) and generators inside the
    operator interval [x, y]; every embedded cube is found this way because
    all its corners lie in the interval of its diagonal.  max_rank is capped
    at 3 (the search grows exponentially in r).
    """
    if max_rank > 3:
        raise SizeCapExceeded("rank search is capped at max_rank = 3")
    M = op.table()
    K = get_kernels()
    best = RankEstimate(0, (0,))
    if op.space.n >= 2 and max_rank >= 1:
        # any pair is a 1-cube: closure and majority follow from (M0)
        best = RankEstimate(1, (0, 1))
    if max_rank >= 2:
        found, x, a1, a2, y = K.rank2_scan(M)
        if found:
            best = RankEstimate(2, (x, a1, a2, y))
    if max_rank >= 3 and best.rank >= 2:
        res = K.rank3_scan(M)
        if res[0]:
            best = RankEstimate(3, tuple(int(t) for t in res[1:]))
    return best


# ---------------------------------------------------------------------------
# operator table file I/O


def save_operator_csv(op: TernaryOperator, path) -> None:
    """Write the table as ``i,j,k,m`` rows over sorted triples i <= j <= k."""
    M = op.table()
    n = op.space.n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for i in range(n):
            for j in range(i, n):
                for k in range(j, n):
                    w.writerow([i, j, k, int(M[i, j, k])])


def load_operator_csv(space: GraphSpace, path) -> TernaryOperator:
    """Load a table from sorted-triple CSV; validates totality and (M0)."""
    n = space.n
    if n > TABLE_CAP:
        raise SizeCapExceeded(f"operator table for n={n} exceeds cap {TABLE_CAP}")
    M = np.full((n, n, n), -1, dtype=np.int32)
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].startswith("#"):
                continue
            try:
                i, j, k, m = (int(t) for t in row)
            except ValueError as exc:
                raise ParseError(f"row {lineno}: expected 'i,j,k,m'") from exc
            if not (0 <= i <= j <= k < n) or not 0 <= m < n:
                raise ParseError(f"row {lineno}: indices out of range or unsorted")
            for t in ((i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
                M[t] = m
    if np.any(M < 0):
        missing = np.argwhere(M < 0)[0]
        raise ParseError(
            f"table not total: triple {tuple(int(t) for t in missing)} missing"
        )
    K = get_kernels()
    ok, code, x, y, z = K.m0_scan(M)
    if not ok:
        raise M0Violated(f"(M0) fails at triple ({x},{y},{z}) [code {code}]")
    return TernaryOperator(space, "custom-table", table=M, label="custom-table")
