"""Spec strings: a tiny grammar for describing spaces and operators.

Reports echo these strings so that any report can be re-verified by
rebuilding the exact objects it talks about.

Space specs
    path:9                     path with 9 vertices
    star:7                     star with 7 vertices
    regular:3,3                regular tree, branching 3, depth 3
    random:40,seed=5           random tree on 40 vertices
    bushy:trivalent_tree,4     bushy generator (kind, size parameter)
    bushy:tripod_thickened,8
    relhyp:4,rays=4;4;4        flat square with three peripheral rays
    product:path:9|path:9      l1 product; factors separated by '|'
    file:PATH                  load a saved space file

Operator specs
    auto                       tree median on trees, else graph median
    tree | graph | tc          force a construction
    product                    coordinate-wise median (product spaces only)
    tcproduct                  coordinate-wise triangle centers per factor
    sheared:T=24,basepoint=0   sheared median (2-factor products with a
                               path second factor; both params optional)
"""
from __future__ import annotations

from .errors import InvalidParams, ParseError
from .exact import (
    TernaryOperator,
    median_graph_median,
    product_median,
    tree_median,
)
from .generators import (
    default_shear,
    gen_bushy,
    gen_product,
    gen_relhyp_toy,
    gen_tree,
    sheared_median,
)
from .hyperbolic import triangle_center_median
from .space import GraphSpace


def _split_params(body: str) -> tuple[list[int], dict[str, str]]:
    pos: list[int] = []
    kw: dict[str, str] = {}
    if not body:
        return pos, kw
    for part in body.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            k, v = part.split("=", 1)
            kw[k.strip()] = v.strip()
        else:
            try:
                pos.append(int(part))
            except ValueError as exc:
                raise ParseError(f"expected integer parameter, got {part!r}") from exc
    return pos, kw


def space_from_spec(spec: str) -> GraphSpace:
    """Build the space a spec string describes (see module docstring)."""
    spec = spec.strip()
    kind, _, body = spec.partition(":")
    if kind == "file":
        if not body:
            raise ParseError("file: spec needs a path")
        space = GraphSpace.from_file(body)
        space.meta.setdefault("spec", spec)
        return space
    if kind == "product":
        if not body:
            raise ParseError("product spec needs factors, e.g. product:path:3|path:3")
        factors = [space_from_spec(f) for f in body.split("|")]
        space = gen_product(factors)
        space.meta["spec"] = spec
        return space
    if kind in ("path", "star"):
        pos, kw = _split_params(body)
        if len(pos) != 1 or kw:
            raise ParseError(f"{kind} spec takes one integer, got {body!r}")
        space = gen_tree(kind, n=pos[0])
    elif kind == "regular":
        pos, kw = _split_params(body)
        if len(pos) != 2 or kw:
            raise ParseError(f"regular spec takes branching,depth, got {body!r}")
        space = gen_tree("regular", branching=pos[0], depth=pos[1])
    elif kind == "random":
        pos, kw = _split_params(body)
        if len(pos) != 1:
            raise ParseError(f"random spec takes n[,seed=..], got {body!r}")
        space = gen_tree("random", n=pos[0], seed=int(kw.pop("seed", 0)))
        if kw:
            raise ParseError(f"unknown random-tree parameters {sorted(kw)}")
    elif kind == "bushy":
        sub, _, rest = body.partition(",")
        pos, kw = _split_params(rest)
        if len(pos) != 1 or kw:
            raise ParseError(f"bushy spec takes kind,size, got {body!r}")
        if sub == "trivalent_tree":
            space, _ = gen_bushy(sub, depth=pos[0])
        elif sub == "tripod_thickened":
            space, _ = gen_bushy(sub, len=pos[0])
        else:
            raise ParseError(f"unknown bushy kind {sub!r}")
    elif kind == "relhyp":
        pos, kw = _split_params(body)
        rays = kw.pop("rays", None)
        if len(pos) != 1 or kw:
            raise ParseError(f"relhyp spec takes F[,rays=a,b,c], got {body!r}")
        lengths = tuple(int(v) for v in rays.split(";")) if rays else (pos[0],) * 3
        space = gen_relhyp_toy(pos[0], lengths).space
    else:
        raise ParseError(f"unknown space spec kind {kind!r}")
    space.meta["spec"] = spec
    return space


def _product_factors(space: GraphSpace, space_spec: str) -> list[GraphSpace]:
    spec = space_spec.strip()
    if not spec.startswith("product:"):
        spec = space.meta.get("spec", "")
    if not spec.startswith("product:"):
        raise InvalidParams(
            "this operator needs the product structure; use a product: space spec"
        )
    import numpy as np

    factors = [space_from_spec(f) for f in spec[len("product:") :].split("|")]
    rebuilt = gen_product(factors)
    if rebuilt.n != space.n or not np.array_equal(rebuilt.dist, space.dist):
        raise InvalidParams("product factors do not rebuild the given space")
    return factors


def _factor_median(space: GraphSpace) -> TernaryOperator:
    return tree_median(space) if space.is_tree() else median_graph_median(space)


def operator_from_spec(
    space: GraphSpace, spec: str, space_spec: str = ""
) -> TernaryOperator:
    """Build an operator on ``space``; product/sheared kinds recover the
    factor structure from the space spec string."""
    spec = spec.strip()
    kind, _, body = spec.partition(":")
    if kind == "auto":
        op = _factor_median(space)
    elif kind == "tree":
        op = tree_median(space)
    elif kind == "graph":
        op = median_graph_median(space)
    elif kind == "tc":
        op = triangle_center_median(space)
    elif kind == "product":
        factors = _product_factors(space, space_spec)
        op = product_median([_factor_median(f) for f in factors], product_space=space)
    elif kind == "tcproduct":
        factors = _product_factors(space, space_spec)
        op = product_median(
            [triangle_center_median(f) for f in factors], product_space=space
        )
    elif kind == "sheared":
        pos, kw = _split_params(body)
        if pos:
            raise ParseError(f"sheared spec takes key=value parameters, got {body!r}")
        factors = _product_factors(space, space_spec)
        if len(factors) != 2:
            raise InvalidParams("sheared operators need exactly two factors")
        base, line = factors
        T = int(kw.pop("T", line.n - 1))
        basepoint = int(kw.pop("basepoint", 0))
        if kw:
            raise ParseError(f"unknown sheared parameters {sorted(kw)}")
        if T != line.n - 1:
            raise InvalidParams(
                f"shear T={T} must match the line factor length {line.n - 1}"
            )
        std = product_median(
            [_factor_median(base), _factor_median(line)], product_space=space
        )
        op = sheared_median(std, default_shear(base, T, basepoint), product_space=space)
    else:
        raise ParseError(f"unknown operator spec kind {kind!r}")
    op.payload["spec"] = spec
    return op
