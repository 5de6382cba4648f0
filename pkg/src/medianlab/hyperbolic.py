"""Hyperbolic-side constructions: the triangle-center operator, Morse
gauges from a detour corpus, interval quasiconvexity against the gauge,
ball-restricted uniqueness curves, and the barycentre trichotomy on spaces
with designated peripheral subsets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import get_kernels
from .coarse import (
    CoarseCertificate,
    Ball,
    ClosenessReport,
    chain_qi_constant,
    closeness,
    extract_quasigeodesic,
    quasiconvexity,
)
from .errors import EmptyCorpus, InvalidParams, NoBarycentre, SizeCapExceeded
from .exact import TABLE_CAP, TernaryOperator
from .space import FOUR_POINT_CAP, GraphSpace, HyperbolicityEstimate, build_space

BARYCENTRE_CAP = 400  # bulk triple classification is an n^3 sweep


# ---------------------------------------------------------------------------
# triangle centers


def triangle_center_median(space: GraphSpace, cap: int = TABLE_CAP) -> TernaryOperator:
    """The approximate-centre operator: for each triple, the vertex
    minimising the maximum distance to the three canonical geodesic sides
    (ties: total side distance, then vertex index).

    On trees this coincides with the exact median; on four-point hyperbolic
    spaces it certifies as a coarse median with C controlled by delta.
    """
    if space.n > cap:
        raise SizeCapExceeded(
            f"triangle-center table for n={space.n} exceeds cap {cap}"
        )
    K = get_kernels()
    sd = K.side_dist_table(space.parents, space.dist)
    M = K.triangle_center_table(sd, space.dist)
    op = TernaryOperator(space, "triangle-center", table=M, label="triangle-center")
    op.payload["side_dists"] = sd
    return op


# ---------------------------------------------------------------------------
# Morse gauges


@dataclass(frozen=True)
class DetourChain:
    points: tuple[int, ...]
    x: int
    y: int
    waypoint: int
    L_emp: float
    detour: int  # max distance from a chain point to the canonical geodesic [x, y]


@dataclass(frozen=True)
class MorseGauge:
    """Empirical Morse gauge: for each quasigeodesic constant L, the largest
    observed detour among corpus chains with empirical constant <= L."""

    L_values: tuple[float, ...]
    gauge: dict  # L -> N(L)
    counts: dict  # L -> number of corpus chains admitted
    witnesses: dict  # L -> (x, y, waypoint) of the gauge-attaining chain
    corpus_size: int
    seed: int

    def at(self, L: float) -> int:
        """N at the smallest tabulated constant >= L (largest if none)."""
        eligible = [v for v in self.L_values if v >= L - 1e-9]
        key = min(eligible) if eligible else max(self.L_values)
        return self.gauge[key]


def _detour_chain(
    space: GraphSpace, x: int, y: int, w: int, targets: np.ndarray
) -> DetourChain:
    first = space.geodesic_between(x, w).vertices
    second = space.geodesic_between(w, y).vertices
    pts = tuple(first) + tuple(second[1:])
    D = space.dist
    detour = int(D[np.asarray(pts, dtype=np.int64)][:, targets].min(axis=1).max())
    return DetourChain(pts, x, y, w, chain_qi_constant(space, pts), detour)


def morse_gauge(
    space: GraphSpace,
    L_values: Sequence[float] = (1.5, 2.0, 3.0),
    corpus_size: int = 200,
    seed: int = 0,
    subset: Sequence[int] | None = None,
) -> MorseGauge:
    """Estimate the Morse gauge from a corpus of waypoint-detour chains.

    Chains are concatenations of two canonical geodesics through a random
    waypoint, rejected unless their length fits the budget of the largest
    tabulated constant (len <= L*d(x,y) + L).  A tenth of the corpus is
    seeded with waypoints on the geodesic itself — true geodesic chains of
    constant exactly 1.0 — so the tightest bucket is never vacuously empty.
    N(L) is the max detour among chains with empirical quasigeodesic
    constant <= L; a constant whose sub-corpus is empty raises EmptyCorpus.

    With ``subset`` given, this is the gauge *of the subset*: endpoints are
    drawn from it and the detour is the max distance from the chain back to
    the subset (the Morse-set reading); otherwise endpoints are arbitrary
    and the detour is measured to the canonical geodesic between them.
    """
    if space.n < 3:
        raise InvalidParams("Morse corpus needs at least three vertices")
    L_values = tuple(sorted(float(v) for v in L_values))
    if not L_values:
        raise InvalidParams("no quasigeodesic constants supplied")
    Lmax = L_values[-1]
    rng = np.random.Generator(np.random.Philox(seed))
    D = space.dist
    ends = (
        np.arange(space.n, dtype=np.int64)
        if subset is None
        else np.unique(np.asarray(list(subset), dtype=np.int64))
    )
    if ends.size < 2:
        raise InvalidParams("Morse corpus needs at least two endpoint choices")
    chains: list[DetourChain] = []
    # seed with true geodesic chains (waypoint on the geodesic, empirical
    # constant exactly 1.0) so the tightest admissible bucket is inhabited
    n_seed = max(1, corpus_size // 10)
    seed_tries = 0
    while len(chains) < n_seed and seed_tries < 20 * n_seed:
        seed_tries += 1
        x, y = (int(ends[v]) for v in rng.integers(0, ends.size, size=2))
        d = int(D[x, y])
        if x == y or d > Lmax * d + Lmax:
            continue
        geo = space.geodesic_between(x, y).vertices
        w = int(geo[len(geo) // 2])  # adjacent endpoints: w = y, chain = (x, y)
        targets = np.asarray(geo, dtype=np.int64) if subset is None else ends
        chains.append(_detour_chain(space, x, y, w, targets))
    attempts = 0
    cap = 40 * corpus_size
    while len(chains) < corpus_size and attempts < cap:
        attempts += 1
        x, y = (int(ends[v]) for v in rng.integers(0, ends.size, size=2))
        w = int(rng.integers(0, space.n))
        if x == y or w == x or w == y:
            continue
        d = int(D[x, y])
        if int(D[x, w]) + int(D[w, y]) > Lmax * d + Lmax:
            continue
        targets = (
            np.asarray(space.geodesic_between(x, y).vertices, dtype=np.int64)
            if subset is None
            else ends
        )
        chains.append(_detour_chain(space, x, y, w, targets))
    if not chains:
        raise EmptyCorpus(
            f"no detour chains fit the budget L={Lmax} after {attempts} attempts"
        )
    gauge: dict = {}
    counts: dict = {}
    witnesses: dict = {}
    for L in L_values:
        sub = [c for c in chains if c.L_emp <= L + 1e-9]
        if not sub:
            raise EmptyCorpus(
                f"no corpus chain has empirical constant <= {L} "
                f"(corpus of {len(chains)})"
            )
        best = max(sub, key=lambda c: c.detour)
        gauge[L] = best.detour
        counts[L] = len(sub)
        witnesses[L] = (best.x, best.y, best.waypoint)
    return MorseGauge(L_values, gauge, counts, witnesses, len(chains), seed)


def morse_implies_quasiconvex_check(
    op: TernaryOperator,
    cert: CoarseCertificate,
    subset: Sequence[int],
    corpus_size: int = 200,
    seed: int = 0,
    n_chain_pairs: int = 8,
    L_values: Sequence[float] = (1.5, 2.0, 3.0),
) -> dict:
    """Quasiconvexity of a subset against its own Morse gauge.

    Q(subset) must satisfy Q <= N(C2) + 2 where N is the subset's gauge
    from a seeded detour corpus and C2 is the worst empirical constant of
    interval chains extracted between subset points.
    """
    sub = np.unique(np.asarray(list(subset), dtype=np.int64))
    Q = quasiconvexity(op, sub).constant
    rng = np.random.Generator(np.random.Philox(seed))
    c2 = 1.0
    chain_pairs = []
    for _ in range(n_chain_pairs):
        x, y = (int(sub[v]) for v in rng.integers(0, sub.size, size=2))
        if x == y:
            continue
        chain = extract_quasigeodesic(op, cert, x, y)
        c2 = max(c2, chain_qi_constant(op.space, chain.points))
        chain_pairs.append((x, y))
    gauge = morse_gauge(
        op.space,
        L_values=tuple(sorted(set(list(L_values) + [c2]))),
        corpus_size=corpus_size,
        seed=seed,
        subset=sub,
    )
    N = gauge.at(c2)
    return {
        "ok": Q <= N + 2,
        "Q": Q,
        "C2": c2,
        "gauge": N,
        "bound": N + 2,
        "corpus_size": gauge.corpus_size,
        "chain_pairs": chain_pairs,
        "subset_size": int(sub.size),
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# uniqueness curves


def uniqueness_experiment(
    ops: dict[str, TernaryOperator],
    radii: Sequence[int] = (4, 8, 16),
    centers: Sequence[int] | None = None,
) -> list[dict]:
    """Ball-restricted closeness curves for every unordered operator pair.

    One row per (pair, center, radius): how far apart the operators get on
    triples inside the ball.  Under uniqueness the rows stay bounded as the
    radius grows; a genuine non-uniqueness witness grows linearly.
    """
    names = sorted(ops)
    if len(names) < 2:
        raise InvalidParams("uniqueness experiment needs at least two operators")
    if centers is None:
        centers = [0]
    rows = []
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            for c in centers:
                for r in radii:
                    rep: ClosenessReport = closeness(ops[a], ops[b], Ball(int(c), int(r)))
                    rows.append(
                        {
                            "pair": f"{a}|{b}",
                            "center": int(c),
                            "radius": int(r),
                            "sup_distance": rep.sup_distance,
                            "witness": rep.argmax,
                            "values": rep.values,
                        }
                    )
    return rows


# ---------------------------------------------------------------------------
# barycentre trichotomy


@dataclass(frozen=True)
class TripleClass:
    kind: str  # "point" | "peripheral"
    delta: int  # minimal threshold at which the mechanism succeeds
    witness: int  # vertex id, or peripheral index
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BarycentreReport:
    delta: float
    delta_source: str
    all_ok: bool
    failure: tuple[int, int, int] | None
    max_min_delta: int
    max_witness: tuple[int, int, int]
    n_peripherals: int
    coned_delta2: int | None = None


def clique_cone(space: GraphSpace) -> GraphSpace:
    """Each peripheral subset completed to a clique of unit edges (the
    standard electrification making peripheral sets diameter 1)."""
    if not space.peripherals:
        raise InvalidParams("space has no peripheral subsets to cone")
    present = {(min(u, v), max(u, v)) for (u, v, _) in space.edges}
    edges = [(u, v, w) for (u, v, w) in space.edges]
    for per in space.peripherals:
        for i, u in enumerate(per):
            for v in per[i + 1 :]:
                key = (min(u, v), max(u, v))
                if key not in present:
                    present.add(key)
                    edges.append((key[0], key[1], 1))
    return build_space(
        edges,
        n=space.n,
        name=(space.name or "space") + "+coned",
        meta=dict(space.meta),
    )


def default_barycentre_delta(
    space: GraphSpace, sample: int | None = None, seed: int = 0
) -> tuple[float, HyperbolicityEstimate]:
    """Default classification threshold 2*delta + 2, with delta the
    four-point constant of the clique-coned space.

    Beyond the exhaustive four-point cap the estimate falls back to a
    seeded 20000-quadruple sample (a lower bound on delta, hence a
    conservative, i.e. stricter, default threshold)."""
    coned = clique_cone(space)
    if sample is None and coned.n > FOUR_POINT_CAP:
        sample = 20000
    est = coned.estimate_hyperbolicity(sample=sample, seed=seed)
    return 2.0 * est.delta + 2.0, est


def _side_tables(space: GraphSpace):
    K = get_kernels()
    sd = K.side_dist_table(space.parents, space.dist)
    return K, sd


def classify_triple(
    space: GraphSpace, x: int, y: int, z: int, delta: float
) -> TripleClass:
    """Barycentre mechanism for one triple.

    Point: a vertex within delta of all three canonical sides.  Peripheral:
    a peripheral subset on which each corner's two adjacent sides come
    delta-close.  The triple classifies via whichever mechanism succeeds at
    the smaller threshold (ties go to the point mechanism, which names an
    actual barycentre vertex).  Raises NoBarycentre, carrying the minimal
    successful threshold, when both mechanisms exceed delta.
    """
    space.check_vertex(x, y, z)
    K, sd = _side_tables(space)
    n = space.n
    row = lambda u, v: sd[K.pair_row(min(u, v), max(u, v), n)].astype(np.int64)
    g_xy, g_yz, g_xz = row(x, y), row(y, z), row(x, z)
    point_vals = np.maximum(np.maximum(g_xy, g_yz), g_xz)
    v = int(point_vals.argmin())
    d_pt = int(point_vals[v])
    best_per = None
    for b, per in enumerate(space.peripherals):
        mem = np.asarray(per, dtype=np.int64)
        t_x = int(np.maximum(g_xy[mem], g_xz[mem]).min())
        t_y = int(np.maximum(g_xy[mem], g_yz[mem]).min())
        t_z = int(np.maximum(g_xz[mem], g_yz[mem]).min())
        d_B = max(t_x, t_y, t_z)
        if best_per is None or d_B < best_per[0]:
            best_per = (d_B, b, {"incidences": (t_x, t_y, t_z)})
    detail = {"triple": (x, y, z), "d_point": d_pt}
    if best_per is not None:
        detail["d_peripheral"] = best_per[0]
    if d_pt <= delta and (best_per is None or d_pt <= best_per[0]):
        return TripleClass("point", d_pt, v, detail)
    if best_per is not None and best_per[0] <= delta:
        return TripleClass(
            "peripheral", best_per[0], best_per[1], detail | best_per[2]
        )
    dmin = d_pt if best_per is None else min(d_pt, best_per[0])
    raise NoBarycentre(
        f"triple ({x},{y},{z}) admits no barycentre at delta={delta}; "
        f"minimal successful threshold is {dmin}"
    )


def barycentre_report(
    space: GraphSpace,
    delta: float | None = None,
    cap: int = BARYCENTRE_CAP,
) -> BarycentreReport:
    """Bulk trichotomy over all sorted triples.

    With no explicit threshold, delta defaults to 2*delta_hyp + 2 on the
    clique-coned space.  Reports whether every triple classifies, the first
    failure otherwise, and the worst minimal threshold with its witness.
    """
    if space.n > cap:
        raise SizeCapExceeded(
            f"bulk barycentre classification for n={space.n} exceeds cap {cap}"
        )
    coned2 = None
    source = "explicit"
    if delta is None:
        delta, est = default_barycentre_delta(space)
        coned2 = est.delta2
        source = "2*delta+2 on the clique-coned space"
    K, sd = _side_tables(space)
    if space.peripherals:
        pm = np.zeros((len(space.peripherals), space.n), dtype=bool)
        for b, per in enumerate(space.peripherals):
            pm[b, np.asarray(per, dtype=np.int64)] = True
    else:
        pm = np.zeros((0, space.n), dtype=bool)
    all_ok, fx, fy, fz, dmax, wx, wy, wz = K.classify_triples_scan(
        sd, pm, space.n, float(delta)
    )
    return BarycentreReport(
        float(delta),
        source,
        bool(all_ok),
        None if all_ok else (fx, fy, fz),
        int(dmax),
        (wx, wy, wz),
        len(space.peripherals),
        coned2,
    )
