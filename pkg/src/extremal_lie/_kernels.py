"""numba kernels for point sets over F_p and their relation matrices."""
from __future__ import annotations

import numba as nb
import numpy as np

# the TBB layer shipped here is too old; prefer OpenMP, then the builtin workqueue
nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@nb.njit(cache=True)
def canonicalize(V, p, inv):
    """Scale each row so its first nonzero entry is 1 (in place); returns lead index or -1."""
    n, d = V.shape
    lead = np.full(n, -1, dtype=np.int64)
    for r in range(n):
        for c in range(d):
            if V[r, c] != 0:
                lead[r] = c
                s = inv[V[r, c]]
                if s != 1:
                    for k in range(c, d):
                        V[r, k] = (V[r, k] * s) % p
                break
    return lead


@nb.njit(cache=True)
def encode(V, p):
    """Base-p integer key of each row (caller guarantees p**d < 2**63)."""
    n, d = V.shape
    out = np.zeros(n, dtype=np.int64)
    for r in range(n):
        k = 0
        for c in range(d):
            k = k * p + V[r, c]
        out[r] = k
    return out


@nb.njit(cache=True)
def is_symmetric(R):
    n = R.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if R[i, j] != R[j, i]:
                return i, j
    return -1, -1


@nb.njit(cache=True)
def diagonal_check(R):
    """First (i, j) where R[i, j] == -2 disagrees with i == j."""
    n = R.shape[0]
    for i in range(n):
        for j in range(n):
            if (R[i, j] == -2) != (i == j):
                return i, j
    return -1, -1


@nb.njit(cache=True)
def adjacency(R, label):
    """CSR lists of j with R[i, j] == label."""
    n = R.shape[0]
    counts = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        c = 0
        for j in range(n):
            if R[i, j] == label:
                c += 1
        counts[i + 1] = c
    indptr = np.cumsum(counts)
    indices = np.empty(indptr[n], dtype=np.int64)
    for i in range(n):
        t = indptr[i]
        for j in range(n):
            if R[i, j] == label:
                indices[t] = j
                t += 1
    return indptr, indices


@nb.njit(cache=True)
def graph_row(indptr, indices, p, n, common, dist):
    """Common-neighbour counts and BFS distances (capped at 4, -1 beyond) from p."""
    for q in range(n):
        common[q] = 0
        dist[q] = -1
    dist[p] = 0
    for t in range(indptr[p], indptr[p + 1]):
        u = indices[t]
        dist[u] = 1
    for t in range(indptr[p], indptr[p + 1]):
        u = indices[t]
        for s in range(indptr[u], indptr[u + 1]):
            q = indices[s]
            common[q] += 1
            if dist[q] == -1:
                dist[q] = 2
    for level in range(2, 4):
        for q in range(n):
            if dist[q] == level:
                for s in range(indptr[q], indptr[q + 1]):
                    r = indices[s]
                    if dist[r] == -1:
                        dist[r] = level + 1


@nb.njit(cache=True)
def graph_labels(indptr, indices, p, n, out, dist_out):
    """Labels of pairs (p, q) derived from the collinearity graph alone."""
    common = np.zeros(n, dtype=np.int64)
    graph_row(indptr, indices, p, n, common, dist_out)
    for q in range(n):
        if q == p:
            out[q] = -2
        elif dist_out[q] == 1:
            out[q] = -1
        elif common[q] >= 2:
            out[q] = 0
        elif common[q] == 1:
            out[q] = 1
        else:
            out[q] = 2


@nb.njit(cache=True)
def components(indptr, indices, n):
    comp = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    c = 0
    for s in range(n):
        if comp[s] != -1:
            continue
        top = 0
        stack[top] = s
        comp[s] = c
        while top >= 0:
            u = stack[top]
            top -= 1
            for t in range(indptr[u], indptr[u + 1]):
                v = indices[t]
                if comp[v] == -1:
                    comp[v] = c
                    top += 1
                    stack[top] = v
        c += 1
    return comp, c


@nb.njit(cache=True)
def axiom_c_row(R, x, ys, brackets):
    """For E_1 pairs (x, y) with bracket point w: w in E_{<=i+j}(z) for every z.

    Returns (y, z) of the first violation or (-1, -1).
    """
    n = R.shape[0]
    for t in range(ys.size):
        y = ys[t]
        w = brackets[t]
        for z in range(n):
            bound = R[z, x] + R[z, y]
            if R[z, w] > bound:
                return y, z
    return -1, -1


@nb.njit(cache=True)
def axiom_d_row(R, x):
    """For y in E_2(x): no z with R[x, z] <= 0 and R[y, z] <= -1."""
    n = R.shape[0]
    for y in range(n):
        if R[x, y] != 2:
            continue
        for z in range(n):
            if R[x, z] <= 0 and R[y, z] <= -1:
                return y, z
    return -1, -1


@nb.njit(cache=True)
def subspace_check(R, x, lines, bound, need_meet):
    """Lines versus {z : R[x, z] <= bound}.

    A subspace contains every line meeting it in two or more points; with
    ``need_meet`` every line must also meet it.  Returns a bad line index or -1.
    """
    m, k = lines.shape
    for t in range(m):
        c = 0
        for s in range(k):
            if R[x, lines[t, s]] <= bound:
                c += 1
        if c >= 2 and c != k:
            return t
        if need_meet and c == 0:
            return t
    return -1


@nb.njit(cache=True)
def has_label(R, label):
    """First row without any entry equal to ``label``, or -1."""
    n = R.shape[0]
    for i in range(n):
        found = False
        for j in range(n):
            if R[i, j] == label:
                found = True
                break
        if not found:
            return i
    return -1


@nb.njit(cache=True)
def transport_rows(R, order, parent, gen, invperm):
    """Fill R[p] = R[parent[p]][invperm[gen[p]]] in BFS ``order``."""
    n = R.shape[0]
    for t in range(order.size):
        p = order[t]
        a = parent[p]
        if a < 0:
            continue
        g = gen[p]
        for q in range(n):
            R[p, q] = R[a, invperm[g, q]]


@nb.njit(cache=True)
def invariance_witness(R, perm):
    """First (a, b) with R[perm a, perm b] != R[a, b], or (-1, -1)."""
    n = R.shape[0]
    for a in range(n):
        pa = perm[a]
        for b in range(n):
            if R[pa, perm[b]] != R[a, b]:
                return a, b
    return -1, -1


@nb.njit(cache=True)
def invariance_rows(R, perm, rows):
    """Like invariance_witness, restricted to the given rows a."""
    n = R.shape[0]
    for t in range(rows.size):
        a = rows[t]
        pa = perm[a]
        for b in range(n):
            if R[pa, perm[b]] != R[a, b]:
                return a, b
    return -1, -1


@nb.njit(cache=True)
def find_line(inc_ptr, inc_idx, lines, a, b):
    """Index of the line through points a and b, or -1."""
    for t in range(inc_ptr[a], inc_ptr[a + 1]):
        l = inc_idx[t]
        for s in range(lines.shape[1]):
            if lines[l, s] == b:
                return l
    return -1


@nb.njit(cache=True)
def path_lemma(R, ptr, idx, x):
    """Paths x-u-v-z with (x,v), (u,z) in E_1 must have (x,z) in E_2.

    Returns (count, u, v, z) with the first violating path, or (count, -1, -1, -1).
    """
    count = 0
    for a in range(ptr[x], ptr[x + 1]):
        u = idx[a]
        for b in range(ptr[u], ptr[u + 1]):
            v = idx[b]
            if R[x, v] != 1:
                continue
            for c in range(ptr[v], ptr[v + 1]):
                z = idx[c]
                if R[u, z] != 1:
                    continue
                count += 1
                if R[x, z] != 2:
                    return count, u, v, z
    return count, -1, -1, -1


@nb.njit(cache=True)
def _opposite(R, lines, l1, l2):
    """Lines are opposite and z -> z' (the unique point of l2 in E_<=1(z)) is a bijection in E_1."""
    k = lines.shape[1]
    seen = np.zeros(k, dtype=np.int64)
    for i in range(k):
        z = lines[l1, i]
        has2 = False
        cnt = 0
        pos = -1
        for j in range(k):
            w = lines[l2, j]
            if R[z, w] == 2:
                has2 = True
            else:
                cnt += 1
                pos = j
        if not has2 or cnt != 1:
            return False
        if R[z, lines[l2, pos]] != 1:
            return False
        seen[pos] += 1
    for j in range(k):
        if seen[j] != 1:
            return False
        w = lines[l2, j]
        has2 = False
        for i in range(k):
            if R[w, lines[l1, i]] == 2:
                has2 = True
        if not has2:
            return False
    return True


@nb.njit(cache=True)
def gamma_components(R, x):
    """Number of components of the graph on E_2(x) joining points at graph distance 1 or 2."""
    n = R.shape[0]
    members = np.empty(n, dtype=np.int64)
    m = 0
    for y in range(n):
        if R[x, y] == 2:
            members[m] = y
            m += 1
    if m == 0:
        return 0
    comp = np.full(m, -1, dtype=np.int64)
    stack = np.empty(m, dtype=np.int64)
    c = 0
    for s in range(m):
        if comp[s] != -1:
            continue
        comp[s] = c
        top = 0
        stack[0] = s
        while top >= 0:
            a = stack[top]
            top -= 1
            ya = members[a]
            for b in range(m):
                if comp[b] == -1:
                    r = R[ya, members[b]]
                    if r == -1 or r == 0 or r == 1:
                        comp[b] = c
                        top += 1
                        stack[top] = b
        c += 1
    return c


@nb.njit(cache=True, parallel=True)
def graph_agreement(R, ptr, idx):
    """Compare every row of R with the labels read off the collinearity graph.

    Also checks that E_2 pairs are at distance exactly 3 (some neighbour u of x
    has R[u, y] in {0, 1}, i.e. graph distance 2 to y once rows agree).
    Returns per-row first bad column (-1 if none) and a flag for the distance test.
    """
    n = R.shape[0]
    bad = np.full(n, -1, dtype=np.int64)
    far = np.full(n, -1, dtype=np.int64)
    for x in nb.prange(n):
        common = np.zeros(n, dtype=np.int32)
        for a in range(ptr[x], ptr[x + 1]):
            u = idx[a]
            for b in range(ptr[u], ptr[u + 1]):
                common[idx[b]] += 1
        for y in range(n):
            r = R[x, y]
            if y == x:
                lab = -2
            elif R[x, y] == -1:
                lab = -1
            elif common[y] >= 2:
                lab = 0
            elif common[y] == 1:
                lab = 1
            else:
                lab = 2
            if lab != r:
                bad[x] = y
                break
            if r == 2:
                hit = False
                for a in range(ptr[x], ptr[x + 1]):
                    s = R[idx[a], y]
                    if s == 0 or s == 1:
                        hit = True
                        break
                if not hit and far[x] == -1:
                    far[x] = y
    return bad, far


@nb.njit(cache=True)
def partner_lemma(R, ptr, idx, x):
    """Every neighbour y of x has a neighbour z with R[x, z] == 1; first bad y or -1."""
    for a in range(ptr[x], ptr[x + 1]):
        y = idx[a]
        found = False
        for b in range(ptr[y], ptr[y + 1]):
            if R[x, idx[b]] == 1:
                found = True
                break
        if not found:
            return y
    return -1


@nb.njit(cache=True)
def far_neighbour(R, ptr, idx, x):
    """Every y in E_1(x) has a neighbour in E_2(x); first bad y or -1."""
    n = R.shape[0]
    for y in range(n):
        if R[x, y] != 1:
            continue
        found = False
        for b in range(ptr[y], ptr[y + 1]):
            if R[x, idx[b]] == 2:
                found = True
                break
        if not found:
            return y
    return -1


@nb.njit(cache=True)
def opposite_lemma(R, ptr, idx, lines, inc_ptr, inc_idx, x):
    """Paths x-u-v-w-y with (x,v), (u,w), (v,y) in E_1: lines xu and wy are opposite.

    Each (line xu, line wy) pair is tested once.

    Returns (paths, pairs checked, u, v, w, y) of the first failure or with -1s.
    """
    nl = lines.shape[0]
    k = lines.shape[1]
    xl = inc_idx[inc_ptr[x]:inc_ptr[x + 1]]
    memo = np.zeros((xl.size, nl), dtype=np.int8)
    paths = 0
    pairs = 0
    for a in range(ptr[x], ptr[x + 1]):
        u = idx[a]
        lxu = find_line(inc_ptr, inc_idx, lines, x, u)
        loc = -1
        for t in range(xl.size):
            if xl[t] == lxu:
                loc = t
        if loc < 0:
            return paths, pairs, u, -1, -1, -1
        for b in range(ptr[u], ptr[u + 1]):
            v = idx[b]
            if R[x, v] != 1:
                continue
            for c in range(ptr[v], ptr[v + 1]):
                w = idx[c]
                if R[u, w] != 1:
                    continue
                for e in range(inc_ptr[w], inc_ptr[w + 1]):
                    l2 = inc_idx[e]
                    for s in range(k):
                        y = lines[l2, s]
                        if y == w or R[v, y] != 1:
                            continue
                        paths += 1
                        if memo[loc, l2] == 0:
                            pairs += 1
                            memo[loc, l2] = 1 if _opposite(R, lines, lxu, l2) else 2
                        if memo[loc, l2] == 2:
                            return paths, pairs, u, v, w, y
    return paths, pairs, -1, -1, -1, -1
