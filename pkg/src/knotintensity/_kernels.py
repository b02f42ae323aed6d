"""Numba kernels for the projection/classification hot path.

All exact integer work (Alexander determinants) runs modulo 31-bit primes
with enough primes that Chinese remaindering reconstructs the true integer
coefficients: a crossing-relation matrix row has coefficient L1-norm at most
4, so every determinant coefficient is bounded by 4**(c-1) for c crossings,
and ``primes_needed`` picks the prime count from that bound.  Products of
two residues stay below 2**62, so all arithmetic fits in int64.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Largest primes below 2**31; enough for diagrams with up to ~600 crossings.
PRIMES = np.array(
    [
        2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
        2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
        2147483423, 2147483399, 2147483353, 2147483323, 2147483269,
        2147483249, 2147483237, 2147483179, 2147483171, 2147483137,
        2147483123, 2147483077, 2147483069, 2147483059, 2147483053,
        2147483033, 2147483029, 2147482951, 2147482949, 2147482943,
        2147482937, 2147482921, 2147482877, 2147482873, 2147482867,
        2147482859, 2147482819, 2147482817, 2147482811, 2147482801,
    ],
    dtype=np.int64,
)

# Status codes shared by the geometry kernels.
OK = 0
DEGEN_SHORT_EDGE = 1
DEGEN_PARALLEL = 2
DEGEN_PARAM = 3
DEGEN_DEPTH = 4


def primes_needed(n_crossings: int) -> int:
    """Number of CRT primes covering the 4**(c-1) coefficient bound."""
    bits = 2 * max(n_crossings - 1, 0) + 2
    k = max(1, math.ceil(bits / 31))
    if k > len(PRIMES):
        raise ValueError(f"diagram too large for exact CRT path ({n_crossings} crossings)")
    return k


@njit(cache=True)
def _seg2_min_dist(ax, ay, bx, by, cx, cy, dx, dy):
    """Minimum distance between 2D segments AB and CD (endpoint checks only;
    callers use it for near-parallel configurations)."""
    best = 1e300
    for (px, py, qx, qy, rx, ry) in (
        (ax, ay, cx, cy, dx, dy),
        (bx, by, cx, cy, dx, dy),
        (cx, cy, ax, ay, bx, by),
        (dx, dy, ax, ay, bx, by),
    ):
        ex, ey = rx - qx, ry - qy
        ll = ex * ex + ey * ey
        if ll > 0.0:
            t = ((px - qx) * ex + (py - qy) * ey) / ll
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        hx = qx + t * ex - px
        hy = qy + t * ey - py
        d = math.sqrt(hx * hx + hy * hy)
        if d < best:
            best = d
    return best


@njit(cache=True)
def _pair_cross(ax, ay, bx, by, cx, cy, dx, dy, da0, da1, db0, db1,
                min_sin, min_param, depth_tol, prox_tol):
    """Crossing test for one projected edge pair.

    Returns (flag, t, u, over_first, sign) where flag is OK with t/u set,
    -1 for no crossing, or a DEGEN_* code.
    """
    rx, ry = bx - ax, by - ay
    sx, sy = dx - cx, dy - cy
    lr = math.sqrt(rx * rx + ry * ry)
    ls = math.sqrt(sx * sx + sy * sy)
    denom = rx * sy - ry * sx
    if abs(denom) < min_sin * lr * ls:
        if _seg2_min_dist(ax, ay, bx, by, cx, cy, dx, dy) < prox_tol:
            return DEGEN_PARALLEL, 0.0, 0.0, False, 0
        return -1, 0.0, 0.0, False, 0
    qx, qy = cx - ax, cy - ay
    t = (qx * sy - qy * sx) / denom
    u = (qx * ry - qy * rx) / denom
    if t <= -min_param or t >= 1.0 + min_param or u <= -min_param or u >= 1.0 + min_param:
        return -1, 0.0, 0.0, False, 0
    if t < min_param or t > 1.0 - min_param or u < min_param or u > 1.0 - min_param:
        return DEGEN_PARAM, 0.0, 0.0, False, 0
    da = da0 + (da1 - da0) * t
    db = db0 + (db1 - db0) * u
    if abs(da - db) < depth_tol:
        return DEGEN_DEPTH, 0.0, 0.0, False, 0
    over_first = da > db
    if over_first:
        sign = 1 if denom > 0.0 else -1
    else:
        sign = 1 if -denom > 0.0 else -1
    return OK, t, u, over_first, sign


@njit(cache=True)
def find_crossings(P2, depth, closed, scale, min_sin, min_param, min_depth_rel):
    """All transversal crossings among the edges of one projected polyline.

    Edge e runs from vertex e to e+1 (wrapping when ``closed``).  Returns
    (status, over_edge, under_edge, over_param, under_param, sign); on a
    non-OK status the arrays are empty and the direction must be resampled.
    """
    n = P2.shape[0]
    E = n if closed else n - 1
    cap = max(E * (E - 1) // 2, 1)
    over_e = np.empty(cap, np.int64)
    under_e = np.empty(cap, np.int64)
    s_over = np.empty(cap, np.float64)
    s_under = np.empty(cap, np.float64)
    sgn = np.empty(cap, np.int64)
    count = 0
    min_len = 1e-9 * scale
    depth_tol = min_depth_rel * scale

    for i in range(E):
        i2 = i + 1 if i + 1 < n else 0
        ex = P2[i2, 0] - P2[i, 0]
        ey = P2[i2, 1] - P2[i, 1]
        if math.sqrt(ex * ex + ey * ey) < min_len:
            return DEGEN_SHORT_EDGE, over_e[:0], under_e[:0], s_over[:0], s_under[:0], sgn[:0]

    for i in range(E):
        i2 = i + 1 if i + 1 < n else 0
        for j in range(i + 1, E):
            if j == i + 1:
                continue
            if closed and i == 0 and j == E - 1:
                continue
            j2 = j + 1 if j + 1 < n else 0
            flag, t, u, over_first, sign = _pair_cross(
                P2[i, 0], P2[i, 1], P2[i2, 0], P2[i2, 1],
                P2[j, 0], P2[j, 1], P2[j2, 0], P2[j2, 1],
                depth[i], depth[i2], depth[j], depth[j2],
                min_sin, min_param, depth_tol, min_len,
            )
            if flag == -1:
                continue
            if flag != OK:
                return flag, over_e[:0], under_e[:0], s_over[:0], s_under[:0], sgn[:0]
            if over_first:
                over_e[count] = i
                under_e[count] = j
                s_over[count] = t
                s_under[count] = u
            else:
                over_e[count] = j
                under_e[count] = i
                s_over[count] = u
                s_under[count] = t
            sgn[count] = sign
            count += 1
    return OK, over_e[:count], under_e[:count], s_over[:count], s_under[:count], sgn[:count]


@njit(cache=True)
def closure_crossings(W2, Wd, cpx, cpy, cpd, scale, min_sin, min_param, min_depth_rel):
    """Crossings of the two closing edges against a window polyline.

    The window has w vertices and w-1 edges (relative indices 0..w-2); the
    closing edges get relative indices w-1 (last vertex -> closure point)
    and w (closure point -> first vertex).  Adjacent pairs are skipped.
    """
    w = W2.shape[0]
    cap = max(2 * w, 4)
    over_e = np.empty(cap, np.int64)
    under_e = np.empty(cap, np.int64)
    s_over = np.empty(cap, np.float64)
    s_under = np.empty(cap, np.float64)
    sgn = np.empty(cap, np.int64)
    count = 0
    min_len = 1e-9 * scale
    depth_tol = min_depth_rel * scale

    # closure edges: (w-1): W[w-1] -> P ; (w): P -> W[0]
    for ce in range(2):
        if ce == 0:
            ax, ay, ad = W2[w - 1, 0], W2[w - 1, 1], Wd[w - 1]
            bx, by, bd = cpx, cpy, cpd
            rel = w - 1
        else:
            ax, ay, ad = cpx, cpy, cpd
            bx, by, bd = W2[0, 0], W2[0, 1], Wd[0]
            rel = w
        ex, ey = bx - ax, by - ay
        if math.sqrt(ex * ex + ey * ey) < min_len:
            return DEGEN_SHORT_EDGE, over_e[:0], under_e[:0], s_over[:0], s_under[:0], sgn[:0]
        for j in range(w - 1):
            if ce == 0 and j == w - 2:
                continue
            if ce == 1 and j == 0:
                continue
            flag, t, u, over_first, sign = _pair_cross(
                ax, ay, bx, by,
                W2[j, 0], W2[j, 1], W2[j + 1, 0], W2[j + 1, 1],
                ad, bd, Wd[j], Wd[j + 1],
                min_sin, min_param, depth_tol, min_len,
            )
            if flag == -1:
                continue
            if flag != OK:
                return flag, over_e[:0], under_e[:0], s_over[:0], s_under[:0], sgn[:0]
            if over_first:
                over_e[count] = rel
                under_e[count] = j
                s_over[count] = t
                s_under[count] = u
            else:
                over_e[count] = j
                under_e[count] = rel
                s_over[count] = u
                s_under[count] = t
            sgn[count] = sign
            count += 1

    # The two closing edges share the closure point; a transversal crossing
    # away from it is impossible, but a near-collinear overlap is degenerate.
    rx, ry = cpx - W2[w - 1, 0], cpy - W2[w - 1, 1]
    sx, sy = W2[0, 0] - cpx, W2[0, 1] - cpy
    lr = math.sqrt(rx * rx + ry * ry)
    ls = math.sqrt(sx * sx + sy * sy)
    if abs(rx * sy - ry * sx) < min_sin * lr * ls:
        return DEGEN_PARALLEL, over_e[:0], under_e[:0], s_over[:0], s_under[:0], sgn[:0]

    return OK, over_e[:count], under_e[:count], s_over[:count], s_under[:count], sgn[:count]


@njit(cache=True)
def filter_window(over_e, under_e, s_over, s_under, sgn, a_edge, n_window_edges, n_parent, cyclic):
    """Restrict parent-level crossings to a window of consecutive edges.

    Keeps crossings whose edges both fall in the ``n_window_edges`` edges
    starting at parent edge ``a_edge`` and rebases edge indices to the
    window (0..n_window_edges-1).
    """
    n = len(over_e)
    ro = np.empty(n, np.int64)
    ru = np.empty(n, np.int64)
    so = np.empty(n, np.float64)
    su = np.empty(n, np.float64)
    sg = np.empty(n, np.int64)
    count = 0
    for k in range(n):
        if cyclic:
            o = (over_e[k] - a_edge) % n_parent
            u = (under_e[k] - a_edge) % n_parent
        else:
            o = over_e[k] - a_edge
            u = under_e[k] - a_edge
        if 0 <= o < n_window_edges and 0 <= u < n_window_edges:
            ro[count] = o
            ru[count] = u
            so[count] = s_over[k]
            su[count] = s_under[k]
            sg[count] = sgn[k]
            count += 1
    return ro[:count], ru[:count], so[:count], su[:count], sg[:count]


@njit(cache=True)
def assemble_code(over_e, under_e, s_over, s_under, sgn):
    """Order crossing passages along the curve into Gauss-code arrays.

    Returns (ids, overs, signs_by_id) where ids/overs run over the 2C
    passages in traversal order and crossings are numbered 0..C-1 in input
    order.
    """
    C = len(over_e)
    keys = np.empty(2 * C, np.float64)
    ids = np.empty(2 * C, np.int64)
    overs = np.empty(2 * C, np.int64)
    for k in range(C):
        keys[2 * k] = over_e[k] + s_over[k]
        ids[2 * k] = k
        overs[2 * k] = 1
        keys[2 * k + 1] = under_e[k] + s_under[k]
        ids[2 * k + 1] = k
        overs[2 * k + 1] = 0
    order = np.argsort(keys)
    return ids[order], overs[order], sgn.copy()


@njit(cache=True)
def simplify_code_arrays(code_id, code_over, sign_by_id):
    """Reduce a Gauss code with untwist and unpoke moves until neither applies.

    Untwist removes a crossing whose two passages are cyclically adjacent;
    unpoke removes a pair of crossings of opposite sign traversed
    consecutively over-over in one place and under-under in another.  A
    worklist of positions whose neighbourhood changed keeps this linear in
    the code length plus the number of reductions.
    """
    L0 = len(code_id)
    out_id = np.empty(L0, np.int64)
    out_over = np.empty(L0, np.int64)
    if L0 == 0:
        return out_id[:0], out_over[:0]

    nxt = np.empty(L0, np.int64)
    prv = np.empty(L0, np.int64)
    for p in range(L0):
        nxt[p] = (p + 1) % L0
        prv[p] = (p - 1) % L0
    alive = np.ones(L0, np.uint8)
    n_alive = L0

    n_ids = len(sign_by_id)
    pos_over = np.full(n_ids, -1, np.int64)
    pos_under = np.full(n_ids, -1, np.int64)
    for p in range(L0):
        if code_over[p] == 1:
            pos_over[code_id[p]] = p
        else:
            pos_under[code_id[p]] = p

    stack = np.empty(4 * L0 + 16, np.int64)
    top = 0
    for p in range(L0):
        stack[top] = p
        top += 1

    while top > 0:
        top -= 1
        p = stack[top]
        if alive[p] == 0 or n_alive == 0:
            continue
        q = nxt[p]
        if q == p:
            continue
        removed = False
        if code_id[p] == code_id[q]:
            # untwist
            rm2a, rm2b = p, q
            a1 = prv[p]
            b1 = nxt[q]
            for r in (p, q):
                alive[r] = 0
            nxt[a1] = b1
            prv[b1] = a1
            n_alive -= 2
            if n_alive > 0:
                if top + 2 >= len(stack):
                    stack = np.concatenate((stack, np.empty(len(stack), np.int64)))
                stack[top] = a1
                top += 1
                stack[top] = b1
                top += 1
            removed = True
        else:
            x = code_id[p]
            y = code_id[q]
            if code_over[p] == code_over[q] and sign_by_id[x] == -sign_by_id[y]:
                if code_over[p] == 1:
                    px = pos_under[x]
                    py = pos_under[y]
                else:
                    px = pos_over[x]
                    py = pos_over[y]
                if nxt[px] == py or nxt[py] == px:
                    a1 = prv[p]
                    b1 = nxt[q]
                    nxt[a1] = b1
                    prv[b1] = a1
                    alive[p] = 0
                    alive[q] = 0
                    # px/py are adjacent; unlink them as a block
                    first = px if nxt[px] == py else py
                    second = nxt[first]
                    a2 = prv[first]
                    b2 = nxt[second]
                    nxt[a2] = b2
                    prv[b2] = a2
                    alive[first] = 0
                    alive[second] = 0
                    n_alive -= 4
                    if n_alive > 0:
                        if top + 4 >= len(stack):
                            stack = np.concatenate((stack, np.empty(len(stack), np.int64)))
                        for r in (a1, b1, a2, b2):
                            if alive[r]:
                                stack[top] = r
                                top += 1
                    removed = True
        if removed and n_alive > 0:
            continue

    m = 0
    for p in range(L0):
        if alive[p]:
            out_id[m] = code_id[p]
            out_over[m] = code_over[p]
            m += 1
    return out_id[:m], out_over[:m]


@njit(cache=True)
def alexander_matrices(code_id, code_over, sign_by_id):
    """Crossing-relation matrix of a Gauss code, split as M0 + t*M1.

    One relation per crossing over the arc variables (arcs break at under
    passages): a positive crossing with over arc o, incoming under arc a and
    outgoing under arc b contributes (1-t)x_o + t x_a - x_b; a negative one
    contributes (1-t)x_o - x_a + t x_b.
    """
    L = len(code_id)
    c = L // 2
    M0 = np.zeros((c, c), np.int64)
    M1 = np.zeros((c, c), np.int64)
    if c == 0:
        return M0, M1

    # remap crossing ids to 0..c-1 in order of first appearance
    remap = np.full(len(sign_by_id), -1, np.int64)
    nxt = 0
    for p in range(L):
        if remap[code_id[p]] < 0:
            remap[code_id[p]] = nxt
            nxt += 1

    under_pos = np.empty(c, np.int64)
    m = 0
    for p in range(L):
        if code_over[p] == 0:
            under_pos[m] = p
            m += 1

    arc_of_pos = np.empty(L, np.int64)
    j = 0
    for p in range(L):
        if j >= c:
            arc_of_pos[p] = 0
        else:
            arc_of_pos[p] = j
            if p == under_pos[j]:
                j += 1

    over_arc = np.empty(c, np.int64)
    in_arc = np.empty(c, np.int64)
    out_arc = np.empty(c, np.int64)
    for p in range(L):
        k = remap[code_id[p]]
        if code_over[p] == 1:
            over_arc[k] = arc_of_pos[p]
        else:
            a = arc_of_pos[p]
            in_arc[k] = a
            out_arc[k] = (a + 1) % c

    for k0 in range(len(sign_by_id)):
        k = remap[k0]
        if k < 0:
            continue
        o = over_arc[k]
        a = in_arc[k]
        b = out_arc[k]
        M0[k, o] += 1
        M1[k, o] -= 1
        if sign_by_id[k0] > 0:
            M1[k, a] += 1
            M0[k, b] -= 1
        else:
            M0[k, a] -= 1
            M1[k, b] += 1
    return M0, M1


@njit(cache=True)
def _modinv(a, p):
    # extended Euclid; a is nonzero mod p
    t, newt = 0, 1
    r, newr = p, a % p
    while newr != 0:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += p
    return t


@njit(cache=True)
def det_mod_points(M0, M1, points, p):
    """det(M0 + x*M1) mod p for each x, on the minor dropping the last
    row and column."""
    c = M0.shape[0]
    m = c - 1
    out = np.empty(len(points), np.int64)
    A = np.empty((m, m), np.int64)
    for ip in range(len(points)):
        x = points[ip] % p
        for i in range(m):
            for j in range(m):
                v = (M0[i, j] + x * M1[i, j]) % p
                if v < 0:
                    v += p
                A[i, j] = v
        det = 1
        sign_flip = False
        singular = False
        for k in range(m):
            piv = -1
            for r in range(k, m):
                if A[r, k] != 0:
                    piv = r
                    break
            if piv < 0:
                singular = True
                break
            if piv != k:
                for j in range(k, m):
                    tmp = A[k, j]
                    A[k, j] = A[piv, j]
                    A[piv, j] = tmp
                sign_flip = not sign_flip
            akk = A[k, k]
            det = (det * akk) % p
            inv = _modinv(akk, p)
            for r in range(k + 1, m):
                if A[r, k] != 0:
                    f = (A[r, k] * inv) % p
                    for j in range(k, m):
                        A[r, j] = (A[r, j] - f * A[k, j]) % p
        if singular:
            out[ip] = 0
        else:
            if sign_flip:
                det = (p - det) % p
            out[ip] = det
    return out


@njit(cache=True)
def interpolate_mod(values, p):
    """Coefficients (mod p) of the polynomial with the given values at
    x = 0..len(values)-1, via Newton divided differences."""
    n = len(values)
    d = np.empty(n, np.int64)
    for i in range(n):
        d[i] = values[i] % p
    for lvl in range(1, n):
        inv = _modinv(lvl % p, p)
        for i in range(n - 1, lvl - 1, -1):
            d[i] = ((d[i] - d[i - 1]) % p * inv) % p
    coeffs = np.zeros(n, np.int64)
    basis = np.zeros(n, np.int64)
    basis[0] = 1
    deg = 0
    coeffs[0] = d[0] % p
    for lvl in range(1, n):
        # basis *= (x - (lvl-1))
        shift = (lvl - 1) % p
        for j in range(deg + 1, 0, -1):
            basis[j] = (basis[j - 1] - shift * basis[j]) % p
        basis[0] = (-shift * basis[0]) % p
        deg += 1
        dk = d[lvl]
        for j in range(deg + 1):
            coeffs[j] = (coeffs[j] + dk * basis[j]) % p
    for j in range(n):
        v = coeffs[j] % p
        if v < 0:
            v += p
        coeffs[j] = v
    return coeffs


@njit(cache=True)
def min_dist_segment_to_polyline(a, b, W):
    """Minimum 3D distance between segment AB and a polyline's edges."""
    best = 1e300
    ux = b[0] - a[0]
    uy = b[1] - a[1]
    uz = b[2] - a[2]
    for j in range(W.shape[0] - 1):
        vx = W[j + 1, 0] - W[j, 0]
        vy = W[j + 1, 1] - W[j, 1]
        vz = W[j + 1, 2] - W[j, 2]
        wx = a[0] - W[j, 0]
        wy = a[1] - W[j, 1]
        wz = a[2] - W[j, 2]
        A = ux * ux + uy * uy + uz * uz
        B = ux * vx + uy * vy + uz * vz
        C = vx * vx + vy * vy + vz * vz
        D = ux * wx + uy * wy + uz * wz
        E = vx * wx + vy * wy + vz * wz
        den = A * C - B * B
        if den > 1e-300:
            s = (B * E - C * D) / den
            t = (A * E - B * D) / den
        else:
            s = 0.0
            t = E / C if C > 0.0 else 0.0
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        # re-clamp t for the clamped s
        if C > 0.0:
            t = (E + s * B) / C
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        if A > 0.0:
            s = (t * B - D) / A
            if s < 0.0:
                s = 0.0
            elif s > 1.0:
                s = 1.0
        gx = a[0] + s * ux - (W[j, 0] + t * vx)
        gy = a[1] + s * uy - (W[j, 1] + t * vy)
        gz = a[2] + s * uz - (W[j, 2] + t * vz)
        d = math.sqrt(gx * gx + gy * gy + gz * gz)
        if d < best:
            best = d
    return best


def warmup():
    """Force compilation of every kernel (call before forking workers)."""
    P2 = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]])
    depth = np.zeros(3)
    find_crossings(P2, depth, True, 1.0, 1e-6, 1e-9, 1e-9)
    closure_crossings(P2, depth, 5.0, 5.0, 1.0, 1.0, 1e-6, 1e-9, 1e-9)
    e = np.array([0], dtype=np.int64)
    s = np.array([0.5])
    filter_window(e, e, s, s, e, 0, 3, 5, True)
    ids, overs, sg = assemble_code(e, np.array([2], dtype=np.int64), s, s,
                                   np.array([1], dtype=np.int64))
    simplify_code_arrays(ids, overs, sg)
    M0, M1 = alexander_matrices(ids, overs, sg)
    pts = np.array([-1, 0, 1], dtype=np.int64)
    vals = det_mod_points(np.eye(2, dtype=np.int64), np.zeros((2, 2), np.int64),
                          pts, int(PRIMES[0]))
    interpolate_mod(vals, int(PRIMES[0]))
    min_dist_segment_to_polyline(np.zeros(3), np.ones(3),
                                 np.array([[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]))
