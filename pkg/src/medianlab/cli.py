"""Command-line laboratory.

Verbs: gen, certify, closeness, lemma22, quasigeo, quasiconvexity, rank,
barycentre, experiment, verify.  Every verb (except gen, which emits a graph
file) produces a witness-carrying JSON report that `verify --report` can
re-validate without repeating the sweeps.

Exit codes are stable and documented in --help; failures print a
machine-readable JSON error object.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys

import numpy as np

from . import __version__, active_backend, set_backend
from .coarse import (
    Ball,
    Exhaustive,
    Sample,
    Subset,
    certify,
    closeness,
    extract_quasigeodesic,
    lemma22_suite,
    quasiconvexity,
    through_point_quasigeodesic,
)
from .errors import ALL_ERRORS, InvalidParams, MedianLabError, ParseError
from .exact import TABLE_CAP, rank_estimate
from .hyperbolic import (
    barycentre_report,
    classify_triple,
    default_barycentre_delta,
    morse_implies_quasiconvex_check,
    uniqueness_experiment,
)
from .reporting import (
    barycentre_claim,
    certificate_claims,
    chain_claim,
    closeness_claim,
    cube_claim,
    curve_csv,
    dump_report,
    gauge_claim,
    lemma_claims,
    load_report,
    make_report,
    quasiconvexity_claim,
    replay_claims,
)
from .space import GraphSpace
from .specs import operator_from_spec, space_from_spec

OP_ALIASES = {
    "tree-median": "tree",
    "graph-median": "graph",
    "triangle-center": "tc",
    "product-median": "product",
    "tc-product": "tcproduct",
}


def _exit_code_table() -> str:
    rows = sorted(ALL_ERRORS, key=lambda e: e.exit_code)
    lines = ["exit codes:", "  0   success"]
    for err in rows:
        lines.append(f"  {err.exit_code:<3} {err.__name__}")
    return "\n".join(lines)


def _norm_op_spec(spec: str) -> str:
    head, _, rest = spec.partition(":")
    head = OP_ALIASES.get(head, head)
    return f"{head}:{rest}" if rest else head


def _build_op(space: GraphSpace, op_spec: str, space_spec: str):
    op = operator_from_spec(space, _norm_op_spec(op_spec), space_spec)
    cache = os.environ.get("MEDIANLAB_CACHE")
    if cache and op.domain is None and space.n <= TABLE_CAP:
        os.makedirs(cache, exist_ok=True)
        key = hashlib.sha256(
            f"{space.content_key()}|{_norm_op_spec(op_spec)}".encode()
        ).hexdigest()[:24]
        path = os.path.join(cache, f"table_{key}.npy")
        if os.path.exists(path):
            op.preload_table(np.load(path))
        else:
            np.save(path, op.table())
    return op


def _certify_auto(op, args):
    sample = getattr(args, "sample", None)
    if op.domain_vertices().size > 200 and sample is None:
        sample = 20000
    return certify(op, sample=sample, seed=getattr(args, "seed", 0))


def _scope_from_args(args):
    mode = args.scope
    if mode == "exhaustive":
        return Exhaustive()
    if mode == "ball":
        if args.center is None or args.radius is None:
            raise InvalidParams("ball scope needs --center and --radius")
        return Ball(args.center, args.radius)
    if mode == "sample":
        return Sample(args.k, args.seed)
    if mode == "subset":
        if not args.subset:
            raise InvalidParams("subset scope needs --subset")
        return Subset(tuple(int(v) for v in args.subset.split()), "cli-subset")
    raise InvalidParams(f"unknown scope {mode!r}")


def _echo_config(args, *fields) -> dict:
    cfg = {
        "backend": active_backend(),
        "threads": args.threads,
        "version": __version__,
    }
    for f in fields:
        cfg[f] = getattr(args, f.replace("-", "_"), None)
    return cfg


def _emit(args, rep: dict, csv_text: str | None = None) -> None:
    fmt = getattr(args, "format", "json")
    out = getattr(args, "out", None)
    if fmt == "csv":
        if csv_text is None:
            raise InvalidParams("this verb has no CSV form; use --format json")
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        else:
            sys.stdout.write(csv_text)
        return
    text = dump_report(rep, out)
    if not out:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(args) -> int:
    if args.spec:
        spec = args.spec
    elif args.tree:
        if args.tree in ("path", "star"):
            spec = f"{args.tree}:{args.n}"
        elif args.tree == "regular":
            spec = f"regular:{args.branching},{args.depth}"
        elif args.tree == "random":
            spec = f"random:{args.n},seed={args.seed}"
        else:
            raise ParseError(f"unknown tree kind {args.tree!r}")
    elif args.bushy:
        size = args.len if args.len is not None else args.depth
        spec = f"bushy:{args.bushy},{size}"
    elif args.relhyp is not None:
        spec = f"relhyp:{args.relhyp}"
        if args.rays:
            spec += f",rays={args.rays}"
    elif args.product:
        spec = f"product:{args.product}"
    else:
        raise ParseError("gen needs --spec or one of --tree/--bushy/--relhyp/--product")
    space = space_from_spec(spec)
    if args.name:
        space.name = args.name
    text = space.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {space.n} vertices, {len(space.edges)} edges to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_certify(args) -> int:
    space = space_from_spec(args.space)
    op = _build_op(space, args.op, args.space)
    cert = certify(op, sample=args.sample, seed=args.seed)
    rep = make_report(
        "certify",
        _echo_config(args, "space", "op", "sample", "seed"),
        {
            "m0": cert.m0_exact,
            "cm1_error": cert.cm1_error,
            "cm2_constant": cert.cm2_constant,
            "C": cert.C,
            "scope": cert.scope,
        },
        certificate_claims(cert),
        include_timestamp=not args.no_timestamp,
    )
    _emit(args, rep)
    return 0


def cmd_closeness(args) -> int:
    space = space_from_spec(args.space)
    op1 = _build_op(space, args.op, args.space)
    op2 = _build_op(space, args.op2, args.space)
    rep_c = closeness(op1, op2, _scope_from_args(args))
    rep = make_report(
        "closeness",
        _echo_config(
            args, "space", "op", "op2", "scope", "center", "radius", "k", "seed"
        ),
        {
            "sup_distance": rep_c.sup_distance,
            "argmax": rep_c.argmax,
            "values": rep_c.values,
            "scope": rep_c.scope,
            "sampled": rep_c.sampled,
        },
        [closeness_claim(rep_c, ("op", "op2"))],
        include_timestamp=not args.no_timestamp,
    )
    _emit(args, rep)
    return 0


def cmd_lemma22(args) -> int:
    space = space_from_spec(args.space)
    op = _build_op(space, args.op, args.space)
    cert = _certify_auto(op, args)
    R_values = tuple(int(v) for v in args.radii.split(","))
    suite = lemma22_suite(
        op, cert, R_values=R_values, sample=args.sample, seed=args.seed
    )
    results = {
        str(part): {
            "name": pr.name,
            "K": pr.K,
            "sampled": pr.sampled,
            "witness": pr.witness,
        }
        for part, pr in suite.items()
    }
    results["certificate_C"] = cert.C
    rep = make_report(
        "lemma22",
        _echo_config(args, "space", "op", "radii", "sample", "seed"),
        results,
        lemma_claims(suite),
        include_timestamp=not args.no_timestamp,
    )
    _emit(args, rep)
    return 0


def cmd_quasigeo(args) -> int:
    space = space_from_spec(args.space)
    op = _build_op(space, args.op, args.space)
    cert = _certify_auto(op, args)
    if args.p is None:
        chain = extract_quasigeodesic(op, cert, args.x, args.y)
        detail = {}
    else:
        chain, detail = through_point_quasigeodesic(op, cert, args.x, args.y, args.p)
    rep = make_report(
        "quasigeo",
        _echo_config(args, "space", "op", "x", "y", "p", "seed"),
        {
            "points": list(chain.points),
            "L": chain.L,
            "A": chain.A,
            "step_bound": chain.step_bound,
            "verified": chain.verified,
            "through": detail,
            "certificate_C": cert.C,
        },
        [chain_claim(chain, args.x, args.y)],
        include_timestamp=not args.no_timestamp,
    )
    _emit(args, rep)
    return 0


def cmd_quasiconvexity(args) -> int:
    space = space_from_spec(args.space)
    op = _build_op(space, args.op, args.space)
    if args.interval:
        x, y = (int(v) for v in args.interval.split(","))
        subset = [int(v) for v in op.interval(x, y)]
    elif args.subset:
        subset = [int(v) for v in args.subset.split()]
    else:
        raise InvalidParams("quasiconvexity needs --subset or --interval")
    q = quasiconvexity(op, subset)
    rep = make_report(
        "quasiconvexity",
        _echo_config(args, "space", "op", "subset", "interval"),
        {"constant": q.constant, "witness": q.witness, "subset_size": q.subset_size},
        [quasiconvexity_claim(q, subset)],
        include_timestamp=not args.no_timestamp,
    )
    _emit(args, rep)
    return 0


def cmd_rank(args) -> int:
    space = space_from_spec(args.space)
    op = _build_op(space, args.op, args.space)
    est = rank_estimate(op, max_rank=args.max_rank)
    rep = make_report(
        "rank",
        _echo_config(args, "space", "op", "max_rank"),
        {"rank": est.rank, "cube_witness": list(est.cube_witness)},
        [cube_claim(est)] if est.rank >= 1 else [],
        include_timestamp=not args.no_timestamp,
    )
    _emit(args, rep)
    return 0


def cmd_barycentre(args) -> int:
    space = space_from_spec(args.space)
    if args.delta is not None:
        delta = args.delta
        delta_source = "explicit"
    else:
        delta, _ = default_barycentre_delta(space)
        delta_source = "2*delta+2 on the clique-coned space"
    if args.triple:
        x, y, z = (int(v) for v in args.triple.split(","))
        cl = classify_triple(space, x, y, z, delta)
        rep = make_report(
            "barycentre",
            _echo_config(args, "space", "triple", "delta"),
            {
                "kind": cl.kind,
                "delta_used": delta,
                "delta_source": delta_source,
                "threshold": cl.delta,
                "witness": cl.witness,
                "detail": cl.detail,
            },
            [barycentre_claim(cl, (x, y, z))],
            include_timestamp=not args.no_timestamp,
        )
    else:
        rep_b = barycentre_report(space, delta=delta)
        claims = []
        wx, wy, wz = rep_b.max_witness
        if min(rep_b.max_witness) >= 0:
            cl = classify_triple(space, wx, wy, wz, max(delta, rep_b.max_min_delta))
            claims.append(barycentre_claim(cl, rep_b.max_witness))
        if rep_b.failure is not None:
            claims.append(
                {
                    "claim": "no_barycentre_at",
                    "x": rep_b.failure[0],
                    "y": rep_b.failure[1],
                    "z": rep_b.failure[2],
                    "delta": delta,
                }
            )
        rep = make_report(
            "barycentre",
            _echo_config(args, "space", "delta"),
            {
                "delta_used": rep_b.delta,
                "delta_source": delta_source,
                "all_ok": rep_b.all_ok,
                "failure": rep_b.failure,
                "max_min_delta": rep_b.max_min_delta,
                "max_witness": rep_b.max_witness,
                "n_peripherals": rep_b.n_peripherals,
            },
            claims,
            include_timestamp=not args.no_timestamp,
        )
    _emit(args, rep)
    return 0


# -- experiments -------------------------------------------------------------


def _exp_uniqueness(args):
    space = space_from_spec(args.space)
    op1 = _build_op(space, args.op, args.space)
    op2 = _build_op(space, args.op2, args.space)
    radii = tuple(int(v) for v in args.radii.split(","))
    centers = tuple(int(v) for v in args.centers.split(","))
    rows = uniqueness_experiment({"op": op1, "op2": op2}, radii=radii, centers=centers)
    claims = []
    for r in rows:
        claims.append(
            {
                "claim": "closeness_at",
                "x": r["witness"][0],
                "y": r["witness"][1],
                "z": r["witness"][2],
                "value": r["sup_distance"],
                "v1": r["values"][0],
                "v2": r["values"][1],
                "ops": ["op", "op2"],
            }
        )
    rep = make_report(
        "experiment-uniqueness",
        _echo_config(args, "space", "op", "op2", "radii", "centers"),
        {"rows": rows},
        claims,
        include_timestamp=not args.no_timestamp,
    )
    return rep, curve_csv(rows)


def _exp_shear(args):
    n = args.n
    T = 3 * n
    space_spec = f"product:path:{n + 1}|path:{T + 1}"
    space = space_from_spec(space_spec)
    std = operator_from_spec(space, "product", space_spec)
    sheared = operator_from_spec(space, "sheared", space_spec)
    cert = _certify_auto(sheared, args)
    windows = sorted({max(1, n // 4), max(1, n // 2), n})
    rows = []
    claims = certificate_claims(cert, "op2")
    for w in windows:
        box = tuple(
            x * (T + 1) + s for x in range(w + 1) for s in range(w + 1)
        )
        rep_c = closeness(std, sheared, Subset(box, f"box{w}"))
        rows.append(
            {
                "radius": w,
                "pair": "standard|sheared",
                "center": 0,
                "sup_distance": rep_c.sup_distance,
                "witness": rep_c.argmax,
                "values": rep_c.values,
            }
        )
        claims.append(closeness_claim(rep_c, ("op", "op2")))
    rep = make_report(
        "experiment-shear",
        _echo_config(args, "n", "sample", "seed")
        | {"space": space_spec, "op": "product", "op2": "sheared"},
        {
            "rows": rows,
            "certificate": {
                "C": cert.C,
                "cm1_error": cert.cm1_error,
                "cm2_constant": cert.cm2_constant,
            },
        },
        claims,
        include_timestamp=not args.no_timestamp,
    )
    return rep, curve_csv(rows)


def _exp_barycentre(args):
    from .generators import gen_relhyp_toy

    sizes = tuple(int(v) for v in args.flat_sizes.split(","))
    per_size = {}
    claims = []
    for F in sizes:
        spec = f"relhyp:{F},rays={F * 2};{F * 2};{F * 2}"
        toy = gen_relhyp_toy(F, (F * 2,) * 3)
        space = toy.space
        space.meta["spec"] = spec
        rep_b = barycentre_report(space)
        ends = toy.ray_endpoints
        cl_ends = classify_triple(space, *ends, rep_b.delta)
        per_size[str(F)] = {
            "spec": spec,
            "delta_used": rep_b.delta,
            "all_ok": rep_b.all_ok,
            "max_min_delta": rep_b.max_min_delta,
            "n": space.n,
            "ray_endpoints": list(ends),
            "ray_endpoint_kind": cl_ends.kind,
        }
        claims.append(barycentre_claim(cl_ends, ends) | {"space": spec})
        wx, wy, wz = rep_b.max_witness
        if rep_b.all_ok and min(rep_b.max_witness) >= 0:
            cl = classify_triple(
                space, wx, wy, wz, max(rep_b.delta, rep_b.max_min_delta)
            )
            claims.append(barycentre_claim(cl, rep_b.max_witness) | {"space": spec})
        if rep_b.failure is not None:
            claims.append(
                {
                    "claim": "no_barycentre_at",
                    "x": rep_b.failure[0],
                    "y": rep_b.failure[1],
                    "z": rep_b.failure[2],
                    "delta": rep_b.delta,
                    "space": spec,
                }
            )
    rep = make_report(
        "experiment-barycentre",
        _echo_config(args, "flat_sizes"),
        {"per_size": per_size, "all_ok": all(v["all_ok"] for v in per_size.values())},
        claims,
        include_timestamp=not args.no_timestamp,
    )
    return rep, None


def _exp_morse(args):
    space = space_from_spec(args.space)
    op = _build_op(space, args.op, args.space)
    cert = _certify_auto(op, args)
    subsets = {}
    if space.peripherals:
        subsets["peripheral0"] = list(space.peripherals[0])
    rng = np.random.Generator(np.random.Philox(args.seed))
    for i in range(args.geodesics):
        x, y = (int(v) for v in rng.integers(0, space.n, size=2))
        if x == y:
            continue
        subsets[f"geodesic{i}_{x}_{y}"] = [
            int(v) for v in space.geodesic_between(x, y).vertices
        ]
    rows = {}
    claims = []
    for name, sub in subsets.items():
        chk = morse_implies_quasiconvex_check(
            op, cert, sub, corpus_size=args.corpus, seed=args.seed
        )
        rows[name] = {k: chk[k] for k in ("ok", "Q", "C2", "gauge", "bound", "corpus_size")}
        claims.append(gauge_claim(chk, sub))
    rep = make_report(
        "experiment-morse",
        _echo_config(args, "space", "op", "corpus", "geodesics", "seed"),
        {"subsets": rows, "all_ok": all(r["ok"] for r in rows.values())},
        claims,
        include_timestamp=not args.no_timestamp,
    )
    return rep, None


def cmd_experiment(args) -> int:
    runners = {
        "uniqueness": _exp_uniqueness,
        "shear": _exp_shear,
        "barycentre": _exp_barycentre,
        "morse": _exp_morse,
    }
    if args.name not in runners:
        raise InvalidParams(
            f"unknown experiment {args.name!r}; choose from {sorted(runners)}"
        )
    rep, csv_text = runners[args.name](args)
    _emit(args, rep, csv_text)
    return 0


def cmd_verify(args) -> int:
    rep = load_report(args.report)
    cfg = rep.get("config", {})
    claims = rep.get("claims", [])
    space_spec = cfg.get("space")
    if not space_spec and any("space" not in c for c in claims):
        raise ParseError(f"{args.report}: config carries no space spec")
    space = space_from_spec(space_spec) if space_spec else None
    ops = {}
    for key in ("op", "op2"):
        spec = cfg.get(key)
        if spec:
            ops[key] = _build_op(space, spec, space_spec)
    _space_cache: dict[str, object] = {}

    def space_for(spec: str):
        if spec not in _space_cache:
            _space_cache[spec] = space_from_spec(spec)
        return _space_cache[spec]

    results = replay_claims(rep, ops, space, space_for)
    ok = all(r["ok"] for r in results)
    for r in results:
        print(f"{'ok ' if r['ok'] else 'FAIL'} {r['claim']}: {r['detail']}")
    print(f"verified {sum(r['ok'] for r in results)}/{len(results)} claims")
    if not ok:
        raise MedianLabError(f"{args.report}: claim verification failed")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, out: bool = True):
    p.add_argument("--backend", choices=("numpy", "numba"), default=None,
                   help="kernel backend (default: numba when available)")
    p.add_argument("--threads", type=int, default=1,
                   help="sweep parallelism; results are schedule-independent "
                        "(this build runs sweeps serially)")
    p.add_argument("--config", default=None,
                   help="key=value file supplying defaults for flags")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp for byte-identical reports")
    if out:
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="medianlab",
        description=__doc__,
        epilog=_exit_code_table(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=f"medianlab {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gen", help="generate a space and write its graph file")
    p.add_argument("--spec", default=None, help="space spec, e.g. product:path:4|path:4")
    p.add_argument("--tree", default=None, help="tree kind: path|star|regular|random")
    p.add_argument("--bushy", default=None, help="trivalent_tree|tripod_thickened")
    p.add_argument("--relhyp", type=int, default=None, help="flat size")
    p.add_argument("--product", default=None, help="factor specs joined with |")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--branching", type=int, default=3)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--len", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rays", default=None, help="ray lengths, e.g. 8;8;8")
    p.add_argument("--name", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("certify", help="(M0)/(CM1)/(CM2) certificate with witnesses")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("closeness", help="sup distance between two operators")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--op2", required=True)
    p.add_argument("--scope", default="exhaustive",
                   choices=("exhaustive", "ball", "sample", "subset"))
    p.add_argument("--center", type=int, default=None)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--k", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subset", default=None, help="space-separated vertex ids")
    _add_common(p)
    p.set_defaults(fn=cmd_closeness)

    p = sub.add_parser("lemma22", help="six-part empirical interval constants")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--radii", default="0,1,2", help="R values, comma-separated")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(fn=cmd_lemma22)

    p = sub.add_parser("quasigeo", help="interval chain between two vertices")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--p", type=int, default=None, help="route the chain near p")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(fn=cmd_quasigeo)

    p = sub.add_parser("quasiconvexity", help="escape constant of a subset")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--subset", default=None, help="space-separated vertex ids")
    p.add_argument("--interval", default=None, help="X,Y to use the interval [X,Y]")
    _add_common(p)
    p.set_defaults(fn=cmd_quasiconvexity)

    p = sub.add_parser("rank", help="largest embedded median cube")
    p.add_argument("--space", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--max-rank", type=int, default=3)
    _add_common(p)
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("barycentre", help="rel-hyp barycentre trichotomy")
    p.add_argument("--space", required=True)
    p.add_argument("--triple", default=None, help="X,Y,Z (omit for the bulk scan)")
    p.add_argument("--delta", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_barycentre)

    p = sub.add_parser("experiment", help="bundled experiments")
    p.add_argument("name", choices=("uniqueness", "shear", "barycentre", "morse"))
    p.add_argument("--space", default=None)
    p.add_argument("--op", default="auto")
    p.add_argument("--op2", default="tc")
    p.add_argument("--radii", default="4,8,16")
    p.add_argument("--centers", default="0")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--flat-sizes", default="4,8")
    p.add_argument("--corpus", type=int, default=200)
    p.add_argument("--geodesics", type=int, default=3)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("verify", help="replay every claim in a report")
    p.add_argument("--report", required=True)
    _add_common(p, out=False)
    p.set_defaults(fn=cmd_verify)

    return ap


def _apply_config_file(argv: list[str], ap: argparse.ArgumentParser) -> list[str]:
    """key=value lines become leading flags (explicit argv wins)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    extra: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" in line:
                k, v = line.split("=", 1)
            else:
                parts = line.split(None, 1)
                k, v = parts[0], parts[1] if len(parts) > 1 else ""
            flag = f"--{k.strip().replace('_', '-')}"
            if flag not in argv:
                extra.append(flag)
                if v.strip():  # bare keys are boolean flags
                    extra.append(v.strip())
    # insert after the verb (and experiment name) so subparsers see them
    for j, tok in enumerate(argv):
        if not tok.startswith("-"):
            k = j + 1
            if tok == "experiment" and k < len(argv) and not argv[k].startswith("-"):
                k += 1
            return argv[:k] + extra + argv[k:]
    return argv + extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        argv = _apply_config_file(argv, ap)
        args = ap.parse_args(argv)
        if args.backend:
            set_backend(args.backend)
        try:
            return args.fn(args)
        finally:
            if args.backend:
                set_backend(None)
    except MedianLabError as exc:
        import json

        sys.stdout.write(
            json.dumps(
                {
                    "error": type(exc).__name__,
                    "code": exc.exit_code,
                    "message": str(exc),
                },
                sort_keys=True,
            )
            + "\n"
        )
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
