"""Reference sweep kernels, written with plain numpy.

Every function here has a twin of the same name and signature in
``_kernels_numba``.  The two backends must return bit-identical values *and*
witnesses; to make that checkable each kernel documents its iteration order,
and witnesses are always the first tuple attaining the reported extremum in
that order.

Conventions
-----------
* ``D`` is the dense ``(n, n)`` int32 distance matrix of the space.
* ``M`` is a dense ``(n, n, n)`` int32 operator table, ``M[x, y, z]``.
* Subsets are ascending int64 vertex arrays.
* Scans over unordered argument groups restrict to sorted tuples; this is
  only done where the scanned expression is provably symmetric.
"""
from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# axiom scans


def m0_scan(M):
    """Check localisation (m(x,x,y) = x and permutations) and full symmetry.

    Returns ``(ok, code, x, y, z)``.  ``code`` is 0 when ok, 1 for a
    localisation failure at pair (x, y) -- reported as triple (x, x, y) --
    and 2 for a symmetry failure at the first sorted triple x < y < z whose
    orbit is inconsistent.  Order: pairs (x, y) lexicographic, then sorted
    triples lexicographic.
    """
    n = M.shape[0]
    idx = np.arange(n)
    col = idx[:, None]
    row = idx[None, :]
    loc1 = M[col, col, row]  # m(x, x, y)
    loc2 = M[col, row, col]  # m(x, y, x)
    loc3 = M[row, col, col]  # m(y, x, x)
    bad = (loc1 != col) | (loc2 != col) | (loc3 != col)
    if bad.any():
        flat = int(np.argmax(bad))
        x, y = divmod(flat, n)
        return False, 1, x, x, y

    mism = np.zeros(M.shape, dtype=bool)
    for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        mism |= M != M.transpose(perm)
    strict = (idx[:, None, None] < idx[None, :, None]) & (
        idx[None, :, None] < idx[None, None, :]
    )
    mism &= strict
    if mism.any():
        flat = int(np.argmax(mism))
        x, rem = divmod(flat, n * n)
        y, z = divmod(rem, n)
        return False, 2, x, y, z
    return True, 0, -1, -1, -1


def cm1_scan(M, D):
    """Max of d(m(m(x,p,y),p,z), m(x,p,m(y,p,z))) over all 4-tuples.

    Returns ``(K, p, x, y, z)`` with the witness first in (p, x, y, z)
    lexicographic order.
    """
    n = M.shape[0]
    rowmax = np.empty(n, dtype=np.int64)
    for p in range(n):
        A = M[:, p, :]
        lhs = A[A]       # lhs[x,y,z] = m(m(x,p,y), p, z)
        rhs = A[:, A]    # rhs[x,y,z] = m(x, p, m(y,p,z))
        rowmax[p] = D[lhs, rhs].max()
    K = int(rowmax.max())
    p0 = int(np.argmax(rowmax == K))
    A = M[:, p0, :]
    err = D[A[A], A[:, A]]
    flat = int(np.argmax(err == K))
    x, rem = divmod(flat, n * n)
    y, z = divmod(rem, n)
    return K, p0, x, y, z


def cm2_scan(M, D):
    """Max of d(m(x,y,z), m(p,y,z)) / (d(x,p) + 1) over all 4-tuples.

    Returns ``(K, x, p, y, z, num, den)``; witness first in (x, p, y, z)
    lexicographic order; ``num``/``den`` are the exact integers of the
    extremal ratio.
    """
    n = M.shape[0]
    rowmax = np.empty(n, dtype=np.float64)
    for x in range(n):
        num = D[M[x][None, :, :], M]
        den = (D[x].astype(np.float64) + 1.0)[:, None, None]
        rowmax[x] = (num / den).max()
    K = float(rowmax.max())
    x0 = int(np.argmax(rowmax == K))
    num = D[M[x0][None, :, :], M]
    den = (D[x0].astype(np.float64) + 1.0)[:, None, None]
    ratio = num / den
    flat = int(np.argmax(ratio == K))
    p, rem = divmod(flat, n * n)
    y, z = divmod(rem, n)
    return K, x0, p, y, z, int(num[p, y, z]), int(D[x0, p]) + 1


# ---------------------------------------------------------------------------
# metric scans


def four_point_scan(D):
    """Doubled four-point hyperbolicity constant.

    For every quadruple a < b < c < d the three pairings give sums
    s1 = d(a,b)+d(c,d), s2 = d(a,c)+d(b,d), s3 = d(a,d)+d(b,c); the scan
    maximises (largest - second largest).  Returns ``(delta2, a, b, c, d)``,
    witness first in sorted-quadruple lexicographic order.
    """
    n = D.shape[0]
    if n < 4:
        return 0, -1, -1, -1, -1
    pairmax = np.full((n, n), -1, dtype=np.int64)
    for a in range(n - 3):
        for b in range(a + 1, n - 2):
            sub = D[b + 1 :, b + 1 :].astype(np.int64)
            s1 = int(D[a, b]) + sub
            s2 = D[a, b + 1 :].astype(np.int64)[:, None] + D[b, b + 1 :][None, :]
            s3 = D[a, b + 1 :].astype(np.int64)[None, :] + D[b, b + 1 :][:, None]
            hi = np.maximum(np.maximum(s1, s2), s3)
            lo = np.minimum(np.minimum(s1, s2), s3)
            gap = 2 * hi - (s1 + s2 + s3) + lo
            t = gap.shape[0]
            mask = np.triu(np.ones((t, t), dtype=bool), 1)
            pairmax[a, b] = gap[mask].max() if t > 1 else -1
    delta2 = int(pairmax.max())
    flat = int(np.argmax(pairmax == delta2))
    a, b = divmod(flat, n)
    sub = D[b + 1 :, b + 1 :].astype(np.int64)
    s1 = int(D[a, b]) + sub
    s2 = D[a, b + 1 :].astype(np.int64)[:, None] + D[b, b + 1 :][None, :]
    s3 = D[a, b + 1 :].astype(np.int64)[None, :] + D[b, b + 1 :][:, None]
    hi = np.maximum(np.maximum(s1, s2), s3)
    lo = np.minimum(np.minimum(s1, s2), s3)
    gap = 2 * hi - (s1 + s2 + s3) + lo
    t = gap.shape[0]
    gap[~np.triu(np.ones((t, t), dtype=bool), 1)] = -1
    flat = int(np.argmax(gap == delta2))
    c, d = divmod(flat, t)
    return delta2, a, b, b + 1 + c, b + 1 + d


def median_table_scan(D):
    """Triple-interval-intersection median table.

    For every sorted triple the scan intersects the three metric intervals;
    a unique common vertex is required.  Returns ``(M, ok, x, y, z, count)``
    where (x, y, z) is the first sorted triple violating uniqueness (count
    carries the intersection size there).  On failure the partially filled
    table is unspecified; callers must discard it.
    """
    n = D.shape[0]
    on = (D[:, None, :].astype(np.int64) + D[None, :, :]) == D[:, :, None]
    M = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        M[x, x, :] = x
        M[x, :, x] = x
        M[:, x, x] = x
    for x in range(n):
        for y in range(x + 1, n):
            bxy = on[x, y]
            for z in range(y + 1, n):
                cand = bxy & on[y, z] & on[x, z]
                cnt = int(cand.sum())
                if cnt != 1:
                    return M, False, x, y, z, cnt
                m = int(np.argmax(cand))
                M[x, y, z] = m
                M[x, z, y] = m
                M[y, x, z] = m
                M[y, z, x] = m
                M[z, x, y] = m
                M[z, y, x] = m
    return M, True, -1, -1, -1, 1


# ---------------------------------------------------------------------------
# interval tables


def interval_members_table(M):
    """Boolean table IM[x, y, v] = v lies in the operator interval [x, y]."""
    n = M.shape[0]
    IM = np.zeros((n, n, n), dtype=bool)
    flat = IM.reshape(n * n, n)
    rows = np.repeat(np.arange(n * n), n)
    flat[rows, M.reshape(n * n, n).ravel()] = True
    return IM


def min_dist_to_interval_table(M, D):
    """MD[x, y, v] = min distance from v to the operator interval [x, y]."""
    n = M.shape[0]
    MD = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        MD[x] = D[:, M[x]].min(axis=2).T
    return MD


# ---------------------------------------------------------------------------
# closeness


def closeness_scan(M1, M2, D, idx):
    """Max of d(m1(x,y,z), m2(x,y,z)) over sorted triples of ``idx``.

    Both operators must be (M0)-symmetric, which makes the sorted sweep
    complete.  Returns ``(K, x, y, z)`` with actual vertex ids, witness
    first in sorted-position lexicographic order.
    """
    idx = np.asarray(idx, dtype=np.int64)
    m = idx.shape[0]
    tri = np.triu(np.ones((m, m), dtype=bool))
    rowmax = np.full(m, -1, dtype=np.int64)
    for i in range(m):
        sub = idx[i:]
        v = D[M1[idx[i]][np.ix_(sub, sub)], M2[idx[i]][np.ix_(sub, sub)]]
        rowmax[i] = v[tri[: m - i, : m - i]].max()
    K = int(rowmax.max())
    i0 = int(np.argmax(rowmax == K))
    sub = idx[i0:]
    v = D[M1[idx[i0]][np.ix_(sub, sub)], M2[idx[i0]][np.ix_(sub, sub)]].astype(np.int64)
    v[~tri[: m - i0, : m - i0]] = -1
    flat = int(np.argmax(v == K))
    j, k = divmod(flat, m - i0)
    return K, int(idx[i0]), int(sub[j]), int(sub[k])


def product_closeness_scan(D1, D2, Ta1, Tb1, f1, Ta2, Tb2, f2, n2, sub):
    """Closeness sweep for two 2-factor product operators.

    Global vertex id g = x * n2 + s with x in the first factor and s in the
    second.  Each operator is (first-factor table, second-factor table,
    shear vector f on the first factor added to the second coordinate before
    taking the factor median and subtracted after).  Caller guarantees all
    sheared coordinates stay inside the second factor's table.

    Returns ``(K, gx, gy, gz, w1, w2)`` where w1/w2 are the two operator
    values (global ids) at the witness triple; witness first in
    sorted-position lexicographic order over ``sub``.
    """
    sub = np.asarray(sub, dtype=np.int64)
    m = sub.shape[0]
    xs = sub // n2
    ss = sub % n2
    t1 = ss + f1[xs]
    t2 = ss + f2[xs]
    tri = np.triu(np.ones((m, m), dtype=bool))
    rowmax = np.full(m, -1, dtype=np.int64)

    def row_vals(i):
        X = xs[i:]
        a1 = Ta1[xs[i]][np.ix_(X, X)]
        b1 = Tb1[t1[i]][np.ix_(t1[i:], t1[i:])]
        s1 = b1 - f1[a1]
        a2 = Ta2[xs[i]][np.ix_(X, X)]
        b2 = Tb2[t2[i]][np.ix_(t2[i:], t2[i:])]
        s2 = b2 - f2[a2]
        return a1, s1, a2, s2, D1[a1, a2].astype(np.int64) + D2[s1, s2]

    for i in range(m):
        _, _, _, _, v = row_vals(i)
        rowmax[i] = v[tri[: m - i, : m - i]].max()
    K = int(rowmax.max())
    i0 = int(np.argmax(rowmax == K))
    a1, s1, a2, s2, v = row_vals(i0)
    v[~tri[: m - i0, : m - i0]] = -1
    flat = int(np.argmax(v == K))
    j, k = divmod(flat, m - i0)
    w1 = int(a1[j, k]) * n2 + int(s1[j, k])
    w2 = int(a2[j, k]) * n2 + int(s2[j, k])
    return K, int(sub[i0]), int(sub[i0 + j]), int(sub[i0 + k]), w1, w2


# ---------------------------------------------------------------------------
# empirical constants for the six-part lemma suite


def lemma_p1_scan(M, D):
    """Max of d(m(m(a,b,c),d,e), m(m(a,d,e),m(b,d,e),c)).

    Sweep order: sorted pairs (d <= e) outer, then (a <= b, c).  Both
    restrictions are justified by (M0) symmetry of the expression.
    Returns ``(K, a, b, c, d, e)``.
    """
    n = M.shape[0]
    ab = np.triu(np.ones((n, n), dtype=bool))[:, :, None]
    best = -1
    wit = (-1, -1, -1, -1, -1)
    for d in range(n):
        for e in range(d, n):
            u = M[:, d, e]
            err = D[u[M], M[u[:, None, None], u[None, :, None], np.arange(n)[None, None, :]]]
            err = np.where(ab, err, -1)
            k = int(err.max())
            if k > best:
                best = k
                flat = int(np.argmax(err == k))
                a, rem = divmod(flat, n * n)
                b, c = divmod(rem, n)
                wit = (a, b, c, d, e)
    return best, wit[0], wit[1], wit[2], wit[3], wit[4]


def lemma_p2_scan(M, D):
    """Max of d(m(x', y', p), p) with p in [x,y], x' in [x,p], y' in [p,y].

    The constrained points are generated as p = m(x,y,zp), x' = m(x,p,zx),
    y' = m(p,y,zy).  Sweep order: (x, y, zp, zx, zy) lexicographic.
    Returns ``(K, x, y, zp, zx, zy)``.
    """
    n = M.shape[0]
    best = -1
    wit = (-1, -1, -1, -1, -1)
    for x in range(n):
        for y in range(n):
            P = M[x, y]
            A = M[x][P]      # A[zp, zx] = x'
            B = M[P, y, :]   # B[zp, zy] = y'
            for zp in range(n):
                p = P[zp]
                val = D[M[A[zp][:, None], B[zp][None, :], p], p]
                k = int(val.max())
                if k > best:
                    best = k
                    flat = int(np.argmax(val == k))
                    zx, zy = divmod(flat, n)
                    wit = (x, y, zp, zx, zy)
    return best, wit[0], wit[1], wit[2], wit[3], wit[4]


def lemma_p3_scan(M, D, MD, R):
    """Max diameter of the triple intersection of R-neighbourhoods of the
    three pairwise intervals, over sorted triples.  Returns
    ``(K, x, y, z)``."""
    n = M.shape[0]
    best = -1
    wit = (-1, -1, -1)
    for x in range(n):
        mdx = MD[x]
        for y in range(x, n):
            mxy = mdx[y] <= R
            for z in range(y, n):
                mem = np.where(mxy & (MD[y, z] <= R) & (mdx[z] <= R))[0]
                diam = int(D[np.ix_(mem, mem)].max()) if mem.size else 0
                if diam > best:
                    best = diam
                    wit = (x, y, z)
    return best, wit[0], wit[1], wit[2]


def lemma_p4_scan(M, D, MD, IM, R):
    """Max escape of [a, b] from the R-neighbourhood of [x, y] where both a
    and b lie in that neighbourhood.

    Sweep order: sorted pairs (x <= y), then sorted pairs (a <= b), then the
    escaping point p ascending.  Returns ``(K, x, y, a, b, p)``.
    """
    n = M.shape[0]
    tri = np.triu(np.ones((n, n), dtype=bool))
    best = -1
    wit = (-1, -1, -1, -1, -1)
    for x in range(n):
        for y in range(x, n):
            row = MD[x, y]
            cand = row <= R
            E = np.where(IM, row[None, None, :].astype(np.int64), -1).max(axis=2)
            E = np.where(tri & cand[:, None] & cand[None, :], E, -1)
            k = int(E.max())
            if k > best:
                best = k
                flat = int(np.argmax(E == k))
                a, b = divmod(flat, n)
                p = int(np.argmax(IM[a, b] & (row == k)))
                wit = (x, y, a, b, p)
    return best, wit[0], wit[1], wit[2], wit[3], wit[4]


def lemma_p5_scan(M, D, MD, R):
    """Max of d(m(a,b,c), m(x,y,z)) where a, b, c approximate the corners.

    a must be R-close to [x,y] and [x,z]; b to [y,z] and [y,x]; c to [z,x]
    and [z,y].  Sweep order: sorted triples (x <= y <= z), then (a, b, c)
    lexicographic within their candidate sets.  Returns
    ``(K, x, y, z, a, b, c)``.
    """
    n = M.shape[0]
    best = -1
    wit = (-1, -1, -1, -1, -1, -1)
    for x in range(n):
        for y in range(x, n):
            near_xy = MD[x, y] <= R
            for z in range(y, n):
                near_yz = MD[y, z] <= R
                near_xz = MD[x, z] <= R
                A = np.where(near_xy & near_xz)[0]
                B = np.where(near_yz & near_xy)[0]
                C = np.where(near_xz & near_yz)[0]
                if not (A.size and B.size and C.size):
                    continue
                val = D[M[np.ix_(A, B, C)], M[x, y, z]]
                k = int(val.max())
                if k > best:
                    best = k
                    flat = int(np.argmax(val == k))
                    ia, rem = divmod(flat, B.size * C.size)
                    ib, ic = divmod(rem, C.size)
                    wit = (x, y, z, int(A[ia]), int(B[ib]), int(C[ic]))
    return best, wit[0], wit[1], wit[2], wit[3], wit[4], wit[5]


# ---------------------------------------------------------------------------
# quasiconvexity


def quasiconvexity_scan(M, D, sub):
    """Max escape distance of operator intervals between subset points.

    Returns ``(K, a1, a2, p)``; witness first in (i <= j, z) order over
    subset positions.
    """
    sub = np.asarray(sub, dtype=np.int64)
    s = sub.shape[0]
    n = M.shape[0]
    dsub = D[:, sub].min(axis=1)
    G = M[np.ix_(sub, sub)]
    V = dsub[G].astype(np.int64)
    V[~np.triu(np.ones((s, s), dtype=bool))] = -1
    K = int(V.max())
    flat = int(np.argmax(V == K))
    i, rem = divmod(flat, s * n)
    j, z = divmod(rem, n)
    return K, int(sub[i]), int(sub[j]), int(G[i, j, z])


# ---------------------------------------------------------------------------
# geodesic side tables and the barycentre classifier


def pair_row(u, v, n):
    """Row index of the unordered pair (u <= v) in a packed pair table."""
    return u * n - (u * (u - 1)) // 2 + (v - u)


def side_dist_table(parents, D):
    """Distances to canonical geodesics for every unordered vertex pair.

    ``parents[r, v]`` is the canonical BFS-tree parent of v rooted at r.
    Row ``pair_row(u, v, n)`` of the result holds, for every vertex w, the
    minimum distance from w to the canonical geodesic between u and v.
    """
    n = D.shape[0]
    npairs = n * (n + 1) // 2
    sd = np.empty((npairs, n), dtype=np.int32)
    for u in range(n):
        for v in range(u, n):
            best = D[v].copy()
            w = v
            while w != u:
                w = int(parents[u, w])
                np.minimum(best, D[w], out=best)
            sd[pair_row(u, v, n)] = best
    return sd


def classify_triples_scan(sd, pm, n, delta_default):
    """Bulk barycentre classification over all sorted vertex triples.

    ``sd`` is the side-distance table from :func:`side_dist_table`; ``pm``
    is a (P, n) boolean peripheral membership matrix.  For every triple the
    minimal successful threshold is min(point mechanism, peripheral
    mechanism).  Returns ``(all_ok, fx, fy, fz, dmax, wx, wy, wz)``: whether
    every triple classifies at ``delta_default`` (with the first failure),
    and the maximal minimal threshold (with its first witness triple).
    """
    nper = pm.shape[0]
    all_ok = True
    fail = (-1, -1, -1)
    dmax = -1
    wit = (-1, -1, -1)
    cols = np.arange(n)
    for x in range(n):
        for y in range(x, n):
            a_row = sd[pair_row(x, y, n)].astype(np.int64)  # gamma = [x, y]
            zs = cols[y:]
            ryz = pair_row(y, zs, n)
            rxz = pair_row(x, zs, n)
            alpha = sd[ryz].astype(np.int64)  # rows per z
            beta = sd[rxz].astype(np.int64)
            mx = np.maximum(np.maximum(a_row[None, :], alpha), beta)
            d_pt = mx.min(axis=1)
            d_per = np.full(zs.shape[0], np.iinfo(np.int64).max)
            for b in range(nper):
                mem = pm[b]
                ga = a_row[mem][None, :]
                t_a = np.maximum(beta[:, mem], ga).min(axis=1)
                t_b = np.maximum(alpha[:, mem], ga).min(axis=1)
                t_c = np.maximum(alpha[:, mem], beta[:, mem]).min(axis=1)
                d_B = np.maximum(np.maximum(t_a, t_b), t_c)
                np.minimum(d_per, d_B, out=d_per)
            dmin = np.minimum(d_pt, d_per)
            if all_ok:
                badpos = np.nonzero(dmin > delta_default)[0]
                if badpos.size:
                    all_ok = False
                    fail = (x, y, int(zs[badpos[0]]))
            k = int(dmin.max())
            if k > dmax:
                dmax = k
                wit = (x, y, int(zs[int(np.argmax(dmin == k))]))
    return all_ok, fail[0], fail[1], fail[2], dmax, wit[0], wit[1], wit[2]


# ---------------------------------------------------------------------------
# triangle-centre operator table


def triangle_center_table(sd, D):
    """Approximate-centre operator table.

    For each sorted triple the centre is the vertex minimising the maximum
    distance to the three canonical geodesic sides, ties broken by the total
    of the three side distances, then by vertex index.
    """
    n = D.shape[0]
    M = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        for y in range(x, n):
            sxy = sd[pair_row(x, y, n)].astype(np.int64)
            for z in range(y, n):
                syz = sd[pair_row(y, z, n)]
                sxz = sd[pair_row(x, z, n)]
                mx = np.maximum(np.maximum(sxy, syz), sxz)
                tot = sxy + syz + sxz
                best = int(np.lexsort((np.arange(n), tot, mx))[0])
                M[x, y, z] = best
                M[x, z, y] = best
                M[y, x, z] = best
                M[y, z, x] = best
                M[z, x, y] = best
                M[z, y, x] = best
    return M


# ---------------------------------------------------------------------------
# rank search


def _maj(i, j, k):
    return (i & j) | (i & k) | (j & k)


def _is_cube(M, cube):
    """Check that ``cube`` (list of 2^r vertices indexed by bit patterns)
    is closed under the operator and realises bitwise majority."""
    size = len(cube)
    if len(set(cube)) != size:
        return False
    for i in range(size):
        for j in range(size):
            for k in range(size):
                if M[cube[i], cube[j], cube[k]] != cube[_maj(i, j, k)]:
                    return False
    return True


def rank2_scan(M):
    """Find the first square subalgebra, diagonal-generated.

    Every embedded square has an antipodal pair (x, y) with the two side
    corners inside the operator interval [x, y]; the sweep enumerates
    (x, y) lexicographically, then side corners a1 < a2 from the interval.
    Returns ``(found, x, a1, a2, y)`` labelling corners 00, 01, 10, 11.
    """
    n = M.shape[0]
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            memb = np.unique(M[x, y])
            for a1 in memb:
                a1 = int(a1)
                if a1 == x or a1 == y:
                    continue
                for a2 in memb:
                    a2 = int(a2)
                    if a2 <= a1 or a2 == x or a2 == y:
                        continue
                    if M[a1, a2, x] != x or M[a1, a2, y] != y:
                        continue
                    if _is_cube(M, [x, a1, a2, y]):
                        return True, x, a1, a2, y
    return False, -1, -1, -1, -1


def rank3_scan(M):
    """Find the first 3-cube subalgebra, diagonal-generated.

    Enumerates antipodal pairs (x, y) lexicographically, then generators
    a1 < a2 < a3 in the interval [x, y] with pairwise m(ai, aj, x) = x; the
    remaining corners are forced as m(ai, aj, y).  Returns
    ``(found, c0..c7)`` with corners in bit order (c0 = x = 000,
    c1 = a3 = 001, c2 = a2 = 010, c4 = a1 = 100, c7 = y = 111).
    """
    n = M.shape[0]
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            memb = [int(v) for v in np.unique(M[x, y]) if v != x and v != y]
            for ia, a1 in enumerate(memb):
                for ib in range(ia + 1, len(memb)):
                    a2 = memb[ib]
                    if M[a1, a2, x] != x:
                        continue
                    for ic in range(ib + 1, len(memb)):
                        a3 = memb[ic]
                        if M[a1, a3, x] != x or M[a2, a3, x] != x:
                            continue
                        cube = [
                            x,
                            a3,
                            a2,
                            int(M[a2, a3, y]),
                            a1,
                            int(M[a1, a3, y]),
                            int(M[a1, a2, y]),
                            y,
                        ]
                        if _is_cube(M, cube):
                            return (True, *cube)
    return False, -1, -1, -1, -1, -1, -1, -1, -1
