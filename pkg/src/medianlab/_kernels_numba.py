"""Compiled sweep kernels (numba mirror of ``_kernels_numpy``).

Every function matches its numpy twin in name, signature, iteration order,
returned value and returned witness; the parity test suite compares the two
backends on randomised instances.  Kernels are single-threaded on purpose:
deterministic witness order matters more here than parallel speed, and the
sweeps are cache-friendly loop nests that compile tightly.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def m0_scan(M):
    n = M.shape[0]
    for x in range(n):
        for y in range(n):
            if M[x, x, y] != x or M[x, y, x] != x or M[y, x, x] != x:
                return False, 1, x, x, y
    for x in range(n):
        for y in range(x + 1, n):
            for z in range(y + 1, n):
                v = M[x, y, z]
                if (
                    M[x, z, y] != v
                    or M[y, x, z] != v
                    or M[y, z, x] != v
                    or M[z, x, y] != v
                    or M[z, y, x] != v
                ):
                    return False, 2, x, y, z
    return True, 0, -1, -1, -1


@njit(cache=True)
def cm1_scan(M, D):
    n = M.shape[0]
    best = np.int64(-1)
    wp = -1
    wx = -1
    wy = -1
    wz = -1
    for p in range(n):
        for x in range(n):
            for y in range(n):
                a = M[x, p, y]
                for z in range(n):
                    err = D[M[a, p, z], M[x, p, M[y, p, z]]]
                    if err > best:
                        best = np.int64(err)
                        wp = p
                        wx = x
                        wy = y
                        wz = z
    return int(best), wp, wx, wy, wz


@njit(cache=True)
def cm2_scan(M, D):
    n = M.shape[0]
    best = -1.0
    wx = -1
    wp = -1
    wy = -1
    wz = -1
    bnum = 0
    bden = 1
    for x in range(n):
        for p in range(n):
            den = np.float64(D[x, p]) + 1.0
            for y in range(n):
                for z in range(n):
                    num = D[M[x, y, z], M[p, y, z]]
                    ratio = np.float64(num) / den
                    if ratio > best:
                        best = ratio
                        wx = x
                        wp = p
                        wy = y
                        wz = z
                        bnum = int(num)
                        bden = int(D[x, p]) + 1
    return best, wx, wp, wy, wz, bnum, bden


@njit(cache=True)
def four_point_scan(D):
    n = D.shape[0]
    if n < 4:
        return 0, -1, -1, -1, -1
    best = np.int64(-1)
    wa = -1
    wb = -1
    wc = -1
    wd = -1
    for a in range(n - 3):
        for b in range(a + 1, n - 2):
            dab = np.int64(D[a, b])
            for c in range(b + 1, n - 1):
                dac = np.int64(D[a, c])
                dbc = np.int64(D[b, c])
                for d in range(c + 1, n):
                    s1 = dab + D[c, d]
                    s2 = dac + D[b, d]
                    s3 = np.int64(D[a, d]) + dbc
                    hi = s1
                    lo = s1
                    if s2 > hi:
                        hi = s2
                    if s3 > hi:
                        hi = s3
                    if s2 < lo:
                        lo = s2
                    if s3 < lo:
                        lo = s3
                    gap = 2 * hi - (s1 + s2 + s3) + lo
                    if gap > best:
                        best = gap
                        wa = a
                        wb = b
                        wc = c
                        wd = d
    return int(best), wa, wb, wc, wd


@njit(cache=True)
def median_table_scan(D):
    n = D.shape[0]
    M = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        for t in range(n):
            M[x, x, t] = x
            M[x, t, x] = x
            M[t, x, x] = x
    for x in range(n):
        for y in range(x + 1, n):
            dxy = D[x, y]
            for z in range(y + 1, n):
                dyz = D[y, z]
                dxz = D[x, z]
                cnt = 0
                m = -1
                for v in range(n):
                    if (
                        D[x, v] + D[v, y] == dxy
                        and D[y, v] + D[v, z] == dyz
                        and D[x, v] + D[v, z] == dxz
                    ):
                        if cnt == 0:
                            m = v
                        cnt += 1
                if cnt != 1:
                    return M, False, x, y, z, cnt
                M[x, y, z] = m
                M[x, z, y] = m
                M[y, x, z] = m
                M[y, z, x] = m
                M[z, x, y] = m
                M[z, y, x] = m
    return M, True, -1, -1, -1, 1


@njit(cache=True)
def interval_members_table(M):
    n = M.shape[0]
    IM = np.zeros((n, n, n), dtype=np.bool_)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                IM[x, y, M[x, y, z]] = True
    return IM


@njit(cache=True)
def min_dist_to_interval_table(M, D):
    n = M.shape[0]
    MD = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        for y in range(n):
            for v in range(n):
                best = D[v, M[x, y, 0]]
                for z in range(1, n):
                    d = D[v, M[x, y, z]]
                    if d < best:
                        best = d
                MD[x, y, v] = best
    return MD


@njit(cache=True)
def closeness_scan(M1, M2, D, idx):
    m = idx.shape[0]
    best = np.int64(-1)
    wx = -1
    wy = -1
    wz = -1
    for i in range(m):
        x = idx[i]
        for j in range(i, m):
            y = idx[j]
            for k in range(j, m):
                z = idx[k]
                v = D[M1[x, y, z], M2[x, y, z]]
                if v > best:
                    best = np.int64(v)
                    wx = x
                    wy = y
                    wz = z
    return int(best), int(wx), int(wy), int(wz)


@njit(cache=True)
def product_closeness_scan(D1, D2, Ta1, Tb1, f1, Ta2, Tb2, f2, n2, sub):
    m = sub.shape[0]
    xs = np.empty(m, dtype=np.int64)
    ss = np.empty(m, dtype=np.int64)
    t1 = np.empty(m, dtype=np.int64)
    t2 = np.empty(m, dtype=np.int64)
    for i in range(m):
        xs[i] = sub[i] // n2
        ss[i] = sub[i] % n2
        t1[i] = ss[i] + f1[xs[i]]
        t2[i] = ss[i] + f2[xs[i]]
    best = np.int64(-1)
    wx = -1
    wy = -1
    wz = -1
    w1 = -1
    w2 = -1
    for i in range(m):
        for j in range(i, m):
            for k in range(j, m):
                a1 = Ta1[xs[i], xs[j], xs[k]]
                s1 = Tb1[t1[i], t1[j], t1[k]] - f1[a1]
                a2 = Ta2[xs[i], xs[j], xs[k]]
                s2 = Tb2[t2[i], t2[j], t2[k]] - f2[a2]
                v = np.int64(D1[a1, a2]) + D2[s1, s2]
                if v > best:
                    best = v
                    wx = sub[i]
                    wy = sub[j]
                    wz = sub[k]
                    w1 = a1 * n2 + s1
                    w2 = a2 * n2 + s2
    return int(best), int(wx), int(wy), int(wz), int(w1), int(w2)


@njit(cache=True)
def lemma_p1_scan(M, D):
    n = M.shape[0]
    best = np.int64(-1)
    wa = -1
    wb = -1
    wc = -1
    wd = -1
    we = -1
    for d in range(n):
        for e in range(d, n):
            for a in range(n):
                ade = M[a, d, e]
                for b in range(a, n):
                    bde = M[b, d, e]
                    for c in range(n):
                        err = D[M[M[a, b, c], d, e], M[ade, bde, c]]
                        if err > best:
                            best = np.int64(err)
                            wa = a
                            wb = b
                            wc = c
                            wd = d
                            we = e
    return int(best), wa, wb, wc, wd, we


@njit(cache=True)
def lemma_p2_scan(M, D):
    n = M.shape[0]
    best = np.int64(-1)
    wx = -1
    wy = -1
    wzp = -1
    wzx = -1
    wzy = -1
    for x in range(n):
        for y in range(n):
            for zp in range(n):
                p = M[x, y, zp]
                for zx in range(n):
                    xp = M[x, p, zx]
                    for zy in range(n):
                        yp = M[p, y, zy]
                        err = D[M[xp, yp, p], p]
                        if err > best:
                            best = np.int64(err)
                            wx = x
                            wy = y
                            wzp = zp
                            wzx = zx
                            wzy = zy
    return int(best), wx, wy, wzp, wzx, wzy


@njit(cache=True)
def lemma_p3_scan(M, D, MD, R):
    n = M.shape[0]
    best = np.int64(-1)
    wx = -1
    wy = -1
    wz = -1
    mem = np.empty(n, dtype=np.int64)
    for x in range(n):
        for y in range(x, n):
            for z in range(y, n):
                cnt = 0
                for v in range(n):
                    if MD[x, y, v] <= R and MD[y, z, v] <= R and MD[x, z, v] <= R:
                        mem[cnt] = v
                        cnt += 1
                diam = np.int64(0)
                for i in range(cnt):
                    for j in range(i + 1, cnt):
                        d = np.int64(D[mem[i], mem[j]])
                        if d > diam:
                            diam = d
                if diam > best:
                    best = diam
                    wx = x
                    wy = y
                    wz = z
    return int(best), wx, wy, wz


@njit(cache=True)
def lemma_p4_scan(M, D, MD, IM, R):
    n = M.shape[0]
    best = np.int64(-1)
    wx = -1
    wy = -1
    wa = -1
    wb = -1
    wp = -1
    for x in range(n):
        for y in range(x, n):
            for a in range(n):
                if MD[x, y, a] > R:
                    continue
                for b in range(a, n):
                    if MD[x, y, b] > R:
                        continue
                    esc = np.int64(-1)
                    pw = -1
                    for v in range(n):
                        if IM[a, b, v] and MD[x, y, v] > esc:
                            esc = np.int64(MD[x, y, v])
                            pw = v
                    if esc > best:
                        best = esc
                        wx = x
                        wy = y
                        wa = a
                        wb = b
                        wp = pw
    return int(best), wx, wy, wa, wb, wp


@njit(cache=True)
def lemma_p5_scan(M, D, MD, R):
    n = M.shape[0]
    best = np.int64(-1)
    wx = -1
    wy = -1
    wz = -1
    wa = -1
    wb = -1
    wc = -1
    for x in range(n):
        for y in range(x, n):
            for z in range(y, n):
                m0 = M[x, y, z]
                for a in range(n):
                    if MD[x, y, a] > R or MD[x, z, a] > R:
                        continue
                    for b in range(n):
                        if MD[y, z, b] > R or MD[x, y, b] > R:
                            continue
                        for c in range(n):
                            if MD[x, z, c] > R or MD[y, z, c] > R:
                                continue
                            err = D[M[a, b, c], m0]
                            if err > best:
                                best = np.int64(err)
                                wx = x
                                wy = y
                                wz = z
                                wa = a
                                wb = b
                                wc = c
    return int(best), wx, wy, wz, wa, wb, wc


@njit(cache=True)
def quasiconvexity_scan(M, D, sub):
    s = sub.shape[0]
    n = M.shape[0]
    dsub = np.empty(n, dtype=np.int32)
    for v in range(n):
        best = D[v, sub[0]]
        for i in range(1, s):
            d = D[v, sub[i]]
            if d < best:
                best = d
        dsub[v] = best
    best = np.int64(-1)
    wa = -1
    wb = -1
    wp = -1
    for i in range(s):
        a = sub[i]
        for j in range(i, s):
            b = sub[j]
            for z in range(n):
                p = M[a, b, z]
                if dsub[p] > best:
                    best = np.int64(dsub[p])
                    wa = a
                    wb = b
                    wp = p
    return int(best), int(wa), int(wb), int(wp)


@njit(cache=True)
def _pair_row(u, v, n):
    return u * n - (u * (u - 1)) // 2 + (v - u)


def pair_row(u, v, n):
    return _pair_row(u, v, n)


@njit(cache=True)
def side_dist_table(parents, D):
    n = D.shape[0]
    npairs = n * (n + 1) // 2
    sd = np.empty((npairs, n), dtype=np.int32)
    for u in range(n):
        for v in range(u, n):
            r = _pair_row(u, v, n)
            for t in range(n):
                sd[r, t] = D[v, t]
            w = v
            while w != u:
                w = parents[u, w]
                for t in range(n):
                    if D[w, t] < sd[r, t]:
                        sd[r, t] = D[w, t]
    return sd


@njit(cache=True)
def classify_triples_scan(sd, pm, n, delta_default):
    nper = pm.shape[0]
    all_ok = True
    fx = -1
    fy = -1
    fz = -1
    dmax = np.int64(-1)
    wx = -1
    wy = -1
    wz = -1
    big = np.int64(1) << 60
    for x in range(n):
        for y in range(x, n):
            rg = _pair_row(x, y, n)
            for z in range(y, n):
                ra = _pair_row(y, z, n)
                rb = _pair_row(x, z, n)
                d_pt = big
                for v in range(n):
                    mx = np.int64(sd[rg, v])
                    if sd[ra, v] > mx:
                        mx = np.int64(sd[ra, v])
                    if sd[rb, v] > mx:
                        mx = np.int64(sd[rb, v])
                    if mx < d_pt:
                        d_pt = mx
                d_per = big
                for b in range(nper):
                    t_a = big
                    t_b = big
                    t_c = big
                    for v in range(n):
                        if not pm[b, v]:
                            continue
                        m1 = np.int64(sd[rb, v])
                        if sd[rg, v] > m1:
                            m1 = np.int64(sd[rg, v])
                        if m1 < t_a:
                            t_a = m1
                        m2 = np.int64(sd[ra, v])
                        if sd[rg, v] > m2:
                            m2 = np.int64(sd[rg, v])
                        if m2 < t_b:
                            t_b = m2
                        m3 = np.int64(sd[ra, v])
                        if sd[rb, v] > m3:
                            m3 = np.int64(sd[rb, v])
                        if m3 < t_c:
                            t_c = m3
                    d_B = t_a
                    if t_b > d_B:
                        d_B = t_b
                    if t_c > d_B:
                        d_B = t_c
                    if d_B < d_per:
                        d_per = d_B
                dmin = d_pt if d_pt < d_per else d_per
                if all_ok and dmin > delta_default:
                    all_ok = False
                    fx = x
                    fy = y
                    fz = z
                if dmin > dmax:
                    dmax = dmin
                    wx = x
                    wy = y
                    wz = z
    return all_ok, fx, fy, fz, int(dmax), wx, wy, wz


@njit(cache=True)
def triangle_center_table(sd, D):
    n = D.shape[0]
    M = np.empty((n, n, n), dtype=np.int32)
    for x in range(n):
        for y in range(x, n):
            rg = _pair_row(x, y, n)
            for z in range(y, n):
                ra = _pair_row(y, z, n)
                rb = _pair_row(x, z, n)
                bmx = np.int64(1) << 60
                btot = np.int64(1) << 60
                bv = -1
                for v in range(n):
                    s1 = np.int64(sd[rg, v])
                    s2 = np.int64(sd[ra, v])
                    s3 = np.int64(sd[rb, v])
                    mx = s1
                    if s2 > mx:
                        mx = s2
                    if s3 > mx:
                        mx = s3
                    tot = s1 + s2 + s3
                    if mx < bmx or (mx == bmx and tot < btot):
                        bmx = mx
                        btot = tot
                        bv = v
                M[x, y, z] = bv
                M[x, z, y] = bv
                M[y, x, z] = bv
                M[y, z, x] = bv
                M[z, x, y] = bv
                M[z, y, x] = bv
    return M


@njit(cache=True)
def _is_cube(M, cube):
    size = cube.shape[0]
    for i in range(size):
        for j in range(i + 1, size):
            if cube[i] == cube[j]:
                return False
    for i in range(size):
        for j in range(size):
            for k in range(size):
                maj = (i & j) | (i & k) | (j & k)
                if M[cube[i], cube[j], cube[k]] != cube[maj]:
                    return False
    return True


@njit(cache=True)
def _interval_flags(M, x, y, flags):
    n = M.shape[0]
    flags[:] = False
    for z in range(n):
        flags[M[x, y, z]] = True


@njit(cache=True)
def rank2_scan(M):
    n = M.shape[0]
    flags = np.zeros(n, dtype=np.bool_)
    cube = np.empty(4, dtype=np.int64)
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            _interval_flags(M, x, y, flags)
            for a1 in range(n):
                if not flags[a1] or a1 == x or a1 == y:
                    continue
                for a2 in range(a1 + 1, n):
                    if not flags[a2] or a2 == x or a2 == y:
                        continue
                    if M[a1, a2, x] != x or M[a1, a2, y] != y:
                        continue
                    cube[0] = x
                    cube[1] = a1
                    cube[2] = a2
                    cube[3] = y
                    if _is_cube(M, cube):
                        return True, x, a1, a2, y
    return False, -1, -1, -1, -1


@njit(cache=True)
def rank3_scan(M):
    n = M.shape[0]
    flags = np.zeros(n, dtype=np.bool_)
    cube = np.empty(8, dtype=np.int64)
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            _interval_flags(M, x, y, flags)
            for a1 in range(n):
                if not flags[a1] or a1 == x or a1 == y:
                    continue
                for a2 in range(a1 + 1, n):
                    if not flags[a2] or a2 == x or a2 == y:
                        continue
                    if M[a1, a2, x] != x:
                        continue
                    for a3 in range(a2 + 1, n):
                        if not flags[a3] or a3 == x or a3 == y:
                            continue
                        if M[a1, a3, x] != x or M[a2, a3, x] != x:
                            continue
                        cube[0] = x
                        cube[1] = a3
                        cube[2] = a2
                        cube[3] = M[a2, a3, y]
                        cube[4] = a1
                        cube[5] = M[a1, a3, y]
                        cube[6] = M[a1, a2, y]
                        cube[7] = y
                        if _is_cube(M, cube):
                            return (
                                True,
                                x,
                                int(cube[1]),
                                int(cube[2]),
                                int(cube[3]),
                                int(cube[4]),
                                int(cube[5]),
                                int(cube[6]),
                                y,
                            )
    return False, -1, -1, -1, -1, -1, -1, -1, -1
