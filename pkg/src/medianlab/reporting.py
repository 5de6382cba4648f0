"""Witness-carrying reports.

Every CLI verb emits a JSON document with a fixed envelope: the schema
version, the verb and its full configuration (enough to rebuild the spaces
and operators), the headline results, and a list of *claims* — witness
tuples together with the value each is supposed to attain.  Verification
replays each claim by re-evaluating the operators at the witness alone,
which is cheap compared to the sweeps that found it.

The envelope is serialized with sorted keys so reports are byte-stable;
the timestamp is optional for byte-identical regeneration.
"""
from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .coarse import verify_chain
from .errors import ParseError
from .exact import TernaryOperator
from .space import GraphSpace

SCHEMA = 1


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    return obj


def make_report(
    command: str,
    config: dict,
    results: dict,
    claims: list[dict] | None = None,
    include_timestamp: bool = True,
) -> dict:
    rep = {
        "schema": SCHEMA,
        "tool": "medianlab",
        "version": __version__,
        "command": command,
        "config": _to_jsonable(config),
        "results": _to_jsonable(results),
        "claims": _to_jsonable(claims or []),
    }
    if include_timestamp:
        rep["timestamp"] = datetime.now(timezone.utc).isoformat()
    return rep


def dump_report(rep: dict, path: str | None = None) -> str:
    text = json.dumps(rep, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def load_report(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        rep = json.load(fh)
    if not isinstance(rep, dict) or rep.get("schema") != SCHEMA:
        raise ParseError(f"{path}: not a schema-{SCHEMA} medianlab report")
    return rep


def curve_csv(rows: list[dict], path: str | None = None) -> str:
    """CSV for closeness curves: radius,pair,sup_distance,witness."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["radius", "pair", "center", "sup_distance", "witness"])
    for r in rows:
        w.writerow(
            [
                r["radius"],
                r["pair"],
                r.get("center", ""),
                r["sup_distance"],
                " ".join(str(v) for v in r["witness"]),
            ]
        )
    text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# claim construction helpers (used by the CLI verbs)


def certificate_claims(cert, op_name: str = "op") -> list[dict]:
    """Witness claims for a certificate, tagged with the operator they target.

    ``op_name`` is the key the verifier will look the operator up under
    ("op" by default, "op2" when a report certifies its second operator).
    """
    out = []
    w = cert.witnesses.get("cm1")
    if w:
        out.append({"claim": "cm1_at", **w, "value": cert.cm1_error, "op": op_name})
    w = cert.witnesses.get("cm2")
    if w:
        out.append({"claim": "cm2_at", **w, "op": op_name})
    return out


def closeness_claim(rep, op_names: tuple[str, str]) -> dict:
    x, y, z = rep.argmax
    return {
        "claim": "closeness_at",
        "x": x,
        "y": y,
        "z": z,
        "value": rep.sup_distance,
        "v1": rep.values[0],
        "v2": rep.values[1],
        "ops": list(op_names),
    }


def chain_claim(chain, x: int, y: int) -> dict:
    return {
        "claim": "chain",
        "x": x,
        "y": y,
        "points": list(chain.points),
        "step_bound": chain.step_bound,
        "max_step": chain.verified.get("max_step", 0),
        "chain_gap": chain.verified.get("chain_gap", 0),
    }


def cube_claim(est) -> dict:
    return {"claim": "cube_at", "rank": est.rank, "corners": list(est.cube_witness)}


def four_point_claim(est) -> dict:
    a, b, c, d = est.witness
    return {"claim": "four_point_at", "a": a, "b": b, "c": c, "d": d,
            "delta2": est.delta2}


def quasiconvexity_claim(rep, subset) -> dict:
    a1, a2, p = rep.witness
    return {
        "claim": "qc_at",
        "a1": a1,
        "a2": a2,
        "p": p,
        "value": rep.constant,
        "subset": [int(v) for v in subset],
    }


def bushiness_claim(rep) -> dict:
    return {
        "claim": "bushiness_at",
        "vertex": rep.witness_vertex,
        "leaves": list(rep.witness_leaves),
        "value": rep.lam_max,
    }


def lemma_claims(suite: dict) -> list[dict]:
    out = []
    for part in sorted(suite):
        pr = suite[part]
        if not pr.witness:
            continue
        out.append(
            {"claim": f"lemma{part}_at", "value": pr.K, **_to_jsonable(pr.witness)}
        )
    return out


def gauge_claim(check: dict, subset) -> dict:
    return {
        "claim": "gauge_bound",
        "Q": check["Q"],
        "C2": check["C2"],
        "gauge": check["gauge"],
        "bound": check["bound"],
        "subset": [int(v) for v in subset],
    }


def barycentre_claim(cl, triple) -> dict:
    return {
        "claim": "barycentre_at",
        "x": triple[0],
        "y": triple[1],
        "z": triple[2],
        "kind": cl.kind,
        "delta": cl.delta,
        "witness": cl.witness,
    }


# ---------------------------------------------------------------------------
# claim replay


def _replay_cm1(op: TernaryOperator, c: dict) -> tuple[bool, str]:
    D = op.space.dist
    p, x, y, z = c["p"], c["x"], c["y"], c["z"]
    lhs = op.eval(op.eval(x, p, y), p, z)
    rhs = op.eval(x, p, op.eval(y, p, z))
    got = int(D[lhs, rhs])
    return got == c["value"], f"cm1 at witness = {got}, claimed {c['value']}"


def _replay_cm2(op: TernaryOperator, c: dict) -> tuple[bool, str]:
    D = op.space.dist
    x, p, y, z = c["x"], c["p"], c["y"], c["z"]
    num = int(D[op.eval(x, y, z), op.eval(p, y, z)])
    den = int(D[x, p]) + 1
    ok = num == c["num"] and den == c["den"]
    return ok, f"cm2 at witness = {num}/{den}, claimed {c['num']}/{c['den']}"


def _replay_closeness(ops: dict, c: dict) -> tuple[bool, str]:
    op1, op2 = (ops[name] for name in c["ops"])
    x, y, z = c["x"], c["y"], c["z"]
    v1, v2 = op1.eval(x, y, z), op2.eval(x, y, z)
    got = int(op1.space.dist[v1, v2])
    ok = got == c["value"] and v1 == c["v1"] and v2 == c["v2"]
    return ok, f"distance at witness = {got}, claimed {c['value']}"


def _replay_chain(op: TernaryOperator, c: dict) -> tuple[bool, str]:
    pts = [int(v) for v in c["points"]]
    res = verify_chain(op.space, pts, c["step_bound"])
    ok = (
        res["max_step"] == c["max_step"]
        and res["chain_gap"] == c["chain_gap"]
        and pts[0] == c["x"]
        and pts[-1] == c["y"]
    )
    return ok, f"chain recheck {res}"


def _replay_cube(op: TernaryOperator, c: dict) -> tuple[bool, str]:
    corners = [int(v) for v in c["corners"]]
    size = len(corners)
    if size != 1 << c["rank"] or len(set(corners)) != size:
        return False, f"cube witness has {size} corners for rank {c['rank']}"
    for i in range(size):
        for j in range(size):
            for k in range(size):
                want = corners[(i & j) | (i & k) | (j & k)]
                if op.eval(corners[i], corners[j], corners[k]) != want:
                    return False, f"majority fails at corner patterns ({i},{j},{k})"
    return True, f"rank-{c['rank']} cube verified at {corners}"


def _replay_four_point(space: GraphSpace, c: dict) -> tuple[bool, str]:
    D = space.dist.astype(np.int64)
    a, b, cc, d = c["a"], c["b"], c["c"], c["d"]
    if min(a, b, cc, d) < 0:
        return c["delta2"] == 0, "degenerate quadruple"
    s = sorted((int(D[a, b] + D[cc, d]), int(D[a, cc] + D[b, d]),
                int(D[a, d] + D[b, cc])))
    got = s[2] - s[1]
    return got == c["delta2"], f"doubled gap at witness = {got}, claimed {c['delta2']}"


def _replay_qc(op: TernaryOperator, c: dict) -> tuple[bool, str]:
    sub = np.asarray(c["subset"], dtype=np.int64)
    D = op.space.dist
    got = int(D[c["p"], sub].min())
    if got != c["value"]:
        return False, f"escape at witness = {got}, claimed {c['value']}"
    dom = op.domain_vertices()
    vals = op.eval_triples(
        np.full(dom.shape, c["a1"]), np.full(dom.shape, c["a2"]), dom
    )
    if not np.any(vals == c["p"]):
        return False, f"witness point {c['p']} not in the interval"
    return True, f"escape {got} attained in [{c['a1']},{c['a2']}]"


def _replay_bushiness(space: GraphSpace, c: dict) -> tuple[bool, str]:
    v = c["vertex"]
    ls = [int(u) for u in c["leaves"]]
    if v < 0 or len(ls) != 3:
        return False, "missing bushiness witness"
    g = [
        space.gromov_product(ls[i], ls[j], v)
        for i, j in ((0, 1), (0, 2), (1, 2))
    ]
    got = max(g)
    return got == c["value"], f"max pairwise product at witness = {got}"


def _replay_barycentre(space: GraphSpace, c: dict) -> tuple[bool, str]:
    from .hyperbolic import classify_triple

    cl = classify_triple(space, c["x"], c["y"], c["z"], c["delta"])
    ok = cl.kind == c["kind"] and cl.delta == c["delta"] and cl.witness == c["witness"]
    return ok, f"reclassified as {cl.kind} (delta={cl.delta}, witness={cl.witness})"


def _interval_dist(op: TernaryOperator, x: int, y: int) -> np.ndarray:
    """Distance from every domain vertex to the interval [x, y]."""
    iv = op.interval(x, y)
    dom = op.domain_vertices()
    return dom, op.space.dist[np.ix_(dom, iv)].min(axis=1)


def _replay_lemma(op: TernaryOperator, c: dict, part: int) -> tuple[bool, str]:
    D = op.space.dist
    ev = op.eval
    if part == 1:
        a, b, cc, d, e = (c[k] for k in "abcde")
        got = int(D[ev(ev(a, b, cc), d, e), ev(ev(a, d, e), ev(b, d, e), cc)])
        return got == c["value"], f"double-median defect at witness = {got}"
    if part == 2:
        x, y = c["x"], c["y"]
        p = ev(x, y, c["zp"])
        got = int(D[ev(ev(x, p, c["zx"]), ev(p, y, c["zy"]), p), p])
        return got == c["value"], f"projection drift at witness = {got}"
    if part == 3:
        if c.get("x", -1) < 0:
            return True, "no witness (empty intersection at this R)"
        x, y, z, R = c["x"], c["y"], c["z"], c["R"]
        dom, dxy = _interval_dist(op, x, y)
        _, dyz = _interval_dist(op, y, z)
        _, dxz = _interval_dist(op, x, z)
        mem = dom[(dxy <= R) & (dyz <= R) & (dxz <= R)]
        got = int(D[np.ix_(mem, mem)].max()) if mem.size else 0
        want = int(round(c["value"] * (R + 1)))
        return got == want, f"triple-intersection diameter at witness = {got}"
    if part == 4:
        x, y, a, b, R = c["x"], c["y"], c["a"], c["b"], c["R"]
        dom, dxy = _interval_dist(op, x, y)
        pos = {int(v): i for i, v in enumerate(dom)}
        if dxy[pos[a]] > R or dxy[pos[b]] > R:
            return False, "witness endpoints not within R of the interval"
        iv = op.interval(a, b)
        got = int(dxy[[pos[int(v)] for v in iv]].max())
        want = int(round(c["value"] * (R + 1)))
        return got == want, f"interval escape at witness = {got}"
    if part == 5:
        x, y, z, a, b, cc, R = (c[k] for k in ("x", "y", "z", "a", "b", "c", "R"))
        dom, dxy = _interval_dist(op, x, y)
        _, dyz = _interval_dist(op, y, z)
        _, dxz = _interval_dist(op, x, z)
        pos = {int(v): i for i, v in enumerate(dom)}
        cand_ok = (
            max(dxy[pos[a]], dxz[pos[a]]) <= R
            and max(dyz[pos[b]], dxy[pos[b]]) <= R
            and max(dxz[pos[cc]], dyz[pos[cc]]) <= R
        )
        got = int(D[ev(a, b, cc), ev(x, y, z)])
        want = int(round(c["value"] * (R + 1)))
        return (
            cand_ok and got == want,
            f"corner perturbation at witness = {got} (candidacy {cand_ok})",
        )
    if part == 6:
        from .coarse import quasiconvexity

        A = op.interval(c["x"], c["y"])
        B = np.asarray(c["B"], dtype=np.int64)
        qa = quasiconvexity(op, A).constant
        qb = quasiconvexity(op, B).constant
        hd = max(
            int(D[np.ix_(B, A)].min(axis=1).max()),
            int(D[np.ix_(A, B)].min(axis=1).max()),
        )
        ok = qa == c["Q_A"] and qb == c["Q_B"] and hd == c["hausdorff"]
        return ok, f"recomputed Q_A={qa}, Q_B={qb}, hausdorff={hd}"
    return False, f"unknown lemma part {part}"


def _replay_gauge(op: TernaryOperator, c: dict) -> tuple[bool, str]:
    from .coarse import quasiconvexity

    Q = quasiconvexity(op, c["subset"]).constant
    ok = Q == c["Q"] and Q <= c["bound"]
    return ok, f"recomputed Q = {Q} against bound {c['bound']}"


def replay_claims(
    rep: dict,
    ops: dict[str, TernaryOperator],
    space: GraphSpace,
    space_for=None,
) -> list[dict]:
    """Re-verify every claim in a loaded report.

    ``ops`` maps the operator names used by the report ("op", "op2") to
    rebuilt operators; single-operator claims replay against the operator
    named in their "op" field (default "op").  A claim carrying its own
    "space" spec is replayed on that space, resolved through ``space_for``
    (reports that sweep several spaces tag each claim this way).
    """
    out = []
    default_space = space
    for c in rep.get("claims", []):
        kind = c.get("claim")
        op = ops.get(c.get("op", "op"))
        if c.get("space") and space_for is not None:
            space = space_for(c["space"])
        else:
            space = default_space
        try:
            if kind == "cm1_at":
                ok, msg = _replay_cm1(op, c)
            elif kind == "cm2_at":
                ok, msg = _replay_cm2(op, c)
            elif kind == "closeness_at":
                ok, msg = _replay_closeness(ops, c)
            elif kind == "chain":
                ok, msg = _replay_chain(op, c)
            elif kind == "four_point_at":
                ok, msg = _replay_four_point(space, c)
            elif kind == "qc_at":
                ok, msg = _replay_qc(op, c)
            elif kind == "bushiness_at":
                ok, msg = _replay_bushiness(space, c)
            elif kind == "barycentre_at":
                ok, msg = _replay_barycentre(space, c)
            elif kind == "gauge_bound":
                ok, msg = _replay_gauge(op, c)
            elif kind == "cube_at":
                ok, msg = _replay_cube(op, c)
            elif kind == "no_barycentre_at":
                from .errors import NoBarycentre
                from .hyperbolic import classify_triple

                try:
                    cl = classify_triple(space, c["x"], c["y"], c["z"], c["delta"])
                    ok, msg = False, f"unexpectedly classified as {cl.kind}"
                except NoBarycentre as exc:
                    ok, msg = True, str(exc)
            elif kind and kind.startswith("lemma") and kind.endswith("_at"):
                ok, msg = _replay_lemma(op, c, int(kind[5]))
            else:
                ok, msg = False, f"unknown claim kind {kind!r}"
        except Exception as exc:  # claim replay must never crash the verifier
            ok, msg = False, f"replay raised {type(exc).__name__}: {exc}"
        out.append({"claim": kind, "ok": ok, "detail": msg})
    return out
