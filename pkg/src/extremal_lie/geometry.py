"""Extremal geometries: points, lines, relations, and their verification suites.

Points are projective classes of extremal elements over a finite prime field,
held as canonical integer vectors (first nonzero coordinate 1).  The relation
matrix is an ``int8`` array with entries in {-2, ..., 2}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _kernels as K
from . import extremal as ex
from .algebra import Algebra, homomorphism_witness
from .linalg import VerificationError
from .roots import RootSystem

DEFAULT_POINT_CAP = 100_000
# at most this many points: every relation row is computed from the algebra
DIRECT_ROW_LIMIT = 1500
# at most this many points: per-point sweeps run at every point, not only orbit representatives
ALL_POINTS_LIMIT = 6000
# the relation matrix is held densely; N**2 bytes
MATRIX_LIMIT = 40_000
# rows recomputed from the algebra to cross-check transported rows
SPOT_ROWS = 24


class GeometryError(ValueError):
    pass


class PointCapExceeded(GeometryError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def predicted_point_count(rs: RootSystem, q: int) -> int:
    """Number of long-root points of the split group of type ``rs`` over F_q.

    Ratio of the Weyl-group Poincare polynomial of the whole diagram to that of
    the diagram with the nodes in the root set J removed, evaluated at q.
    """
    J = rs.root_set_J()

    def poincare(roots):
        out = Fraction(1)
        for r in roots:
            h = sum(r)
            out *= Fraction(q ** (h + 1) - 1, q ** h - 1)
        return out

    levi = [r for r in rs.positive if all(r[i - 1] == 0 for i in J)]
    total = poincare(rs.positive) / poincare(levi)
    if total.denominator != 1:
        raise GeometryError("point count is not an integer")
    return int(total)


def _as_int(field, arr):
    arr = np.asarray(arr)
    if not field.int_backed:
        raise GeometryError("geometries need a finite prime field with int64 arithmetic")
    return np.mod(arr.astype(np.int64), field.p)


class PointIndex:
    """Dedup table for canonical row vectors."""

    def __init__(self, p, d):
        self.p, self.d = p, d
        self.fast = d * math.log2(max(p, 2)) < 62
        self.keys = np.zeros(0, dtype=np.int64)     # sorted
        self.ids = np.zeros(0, dtype=np.int64)
        self.table = {}

    def _keys(self, rows):
        return K.encode(rows, self.p)

    def lookup(self, rows):
        """Index of each row, -1 if absent."""
        if self.fast:
            k = self._keys(rows)
            pos = np.searchsorted(self.keys, k)
            pos = np.minimum(pos, max(len(self.keys) - 1, 0))
            hit = (len(self.keys) > 0) & (self.keys[pos] == k) if len(self.keys) else np.zeros(len(k), bool)
            out = np.full(len(k), -1, dtype=np.int64)
            out[hit] = self.ids[pos[hit]]
            return out
        return np.array([self.table.get(r.tobytes(), -1) for r in rows], dtype=np.int64)

    def add(self, rows, start):
        """Register distinct new ``rows`` with ids start, start+1, ..."""
        ids = np.arange(start, start + len(rows), dtype=np.int64)
        if self.fast:
            k = self._keys(rows)
            keys = np.concatenate([self.keys, k])
            allids = np.concatenate([self.ids, ids])
            order = np.argsort(keys, kind="stable")
            self.keys, self.ids = keys[order], allids[order]
        else:
            for r, i in zip(rows, ids):
                self.table[r.tobytes()] = int(i)
        return ids


def canonical(field, rows):
    """Canonical projective representatives (first nonzero entry 1) of nonzero rows."""
    p = field.p
    V = np.array(_as_int(field, np.atleast_2d(rows)), dtype=np.int64)
    inv = _inverse_table(p)
    lead = K.canonicalize(V, p, inv)
    if (lead < 0).any():
        raise GeometryError("zero vector has no projective point")
    return V


_INV_CACHE = {}


def _inverse_table(p):
    if p not in _INV_CACHE:
        t = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            t[a] = pow(a, -1, p)
        _INV_CACHE[p] = t
    return _INV_CACHE[p]


@dataclass(frozen=True)
class ExtremalPoint:
    index: int
    vector: np.ndarray
    functional: np.ndarray


@dataclass(frozen=True)
class Line:
    points: tuple


@dataclass
class Generator:
    seed: int     # point index of the base extremal element
    t: int
    matrix: np.ndarray


class ExtremalGeometry:
    """Points with relations, lines and the collinearity graph.

    Built either from an algebra (``orbit_geometry``, ``brute_force_geometry``)
    or from abstract data (``abstract_geometry``) for negative controls.
    """

    def __init__(self, N, algebra=None, points=None, gform=None, source="abstract"):
        self.N = N
        self.algebra = algebra
        self.points = points
        self.gform = gform
        self.source = source
        self.generators: list[Generator] = []
        self.perms = None          # (gens, N) permutation of points per generator
        self.parent = None
        self.via = None
        self.orbit_roots: list[int] = []
        self.orbit_of = None
        self._R = None
        self._lines = None
        self._brackets = {}
        self.notes = []
        self.index = None

    # -- basic data ---------------------------------------------------------
    @property
    def field(self):
        return self.algebra.field

    @property
    def q(self):
        return self.field.p

    def point(self, i) -> ExtremalPoint:
        return ExtremalPoint(i, self.points[i], self.functionals[i])

    @cached_property
    def functionals(self):
        if self.gform is None:
            raise GeometryError("no g-form attached")
        return np.mod(self.points @ self.gform, self.q)

    def index_of(self, vectors):
        """Point index of each vector (any nonzero multiple), -1 if not a point."""
        V = canonical(self.field, vectors)
        return self.index.lookup(V)

    @property
    def relations(self):
        if self._R is None:
            self._R = self._compute_relations()
        return self._R

    def set_relations(self, R):
        self._R = np.ascontiguousarray(R, dtype=np.int8)

    @property
    def transitive(self) -> bool:
        """True when every point is an image of one orbit root under verified automorphisms."""
        return self.perms is not None and len(self.orbit_roots) == 1

    @property
    def sweep_points(self):
        """Points at which per-point sweeps run.

        All points for small geometries; otherwise the orbit roots (the sweeps
        check automorphism-invariant statements, so one point per orbit suffices).
        """
        if self.N <= ALL_POINTS_LIMIT or self.perms is None:
            return list(range(self.N))
        return list(self.orbit_roots)

    # -- relations ---------------------------------------------------------
    def algebraic_row(self, i):
        """Relations of point i to every point, computed in the algebra."""
        L = self.algebra
        f = L.field
        p = f.p
        P = self.points
        x = P[i]
        row = np.zeros(self.N, dtype=np.int8)
        gx = np.mod(self.functionals[i] @ P.T, p)
        A = _as_int(f, L.ad(x))
        br = np.mod(A @ P.T, p).any(axis=0)
        row[gx != 0] = 2
        row[(gx == 0) & br] = 1
        rest = np.flatnonzero((gx == 0) & ~br)
        for j in rest:
            if j == i:
                row[j] = -2
                continue
            ok = True
            for mu in range(1, p):
                z = np.mod(x + mu * P[j], p)
                if not self._combo_extremal(z):
                    ok = False
                    break
            row[j] = -1 if ok else 0
        return row

    def _combo_extremal(self, z):
        """z in E, trying the g-form functional first and falling back to the general test."""
        L = self.algebra
        p = self.q
        A = _as_int(L.field, L.ad(z))
        A2 = np.mod(A @ A, p)
        if p == 2 and A2.any():
            return False      # [z,[z,y]] = 2g(y)z = 0 is forced in characteristic 2
        if self.gform is not None:
            g = np.mod(z @ self.gform, p)
            if g.any() and ex.eq1_witness(L, z, g) is None and ex.eq2_witness(L, z, g) is None:
                if p != 2 or not ex.is_sandwich(L, z):
                    return True
        return ex.in_E(L, z)

    def _compute_relations(self):
        if self.N > MATRIX_LIMIT:
            raise GeometryError(f"{self.N} points exceed the relation-matrix limit {MATRIX_LIMIT}")
        R = np.zeros((self.N, self.N), dtype=np.int8)
        if self.N <= DIRECT_ROW_LIMIT or self.perms is None:
            for i in range(self.N):
                R[i] = self.algebraic_row(i)
            self.notes.append("relation rows computed in the algebra for every point")
            return R
        for r in self.orbit_roots:
            R[r] = self.algebraic_row(r)
        invperm = np.argsort(self.perms, axis=1)
        order = self.bfs_order
        K.transport_rows(R, order, self.parent, self.via, invperm)
        spots = _spread(self.N, SPOT_ROWS)
        for i in spots:
            row = self.algebraic_row(i)
            bad = np.flatnonzero(row != R[i])
            if bad.size:
                raise VerificationError(f"transported relation row {i} disagrees at {bad[0]}", (i, int(bad[0])))
        self.notes.append(f"relation rows computed in the algebra at orbit roots, transported along "
                          f"verified automorphisms, {len(spots)} rows re-derived directly")
        return R

    @cached_property
    def bfs_order(self):
        depth = np.zeros(self.N, dtype=np.int64)
        for i in range(self.N):
            a = self.parent[i]
            depth[i] = 0 if a < 0 else depth[a] + 1
        return np.argsort(depth, kind="stable")

    def E(self, i, k):
        return np.flatnonzero(self.relations[i] == k)

    def E_le(self, i, k):
        return np.flatnonzero(self.relations[i] <= k)

    # -- graph ---------------------------------------------------------------
    @cached_property
    def collinearity(self):
        """CSR adjacency (indptr, indices) of the E_-1 graph."""
        return K.adjacency(self.relations, -1)

    def neighbours(self, i):
        ptr, idx = self.collinearity
        return idx[ptr[i]:ptr[i + 1]]

    def graph_row(self, i):
        """(labels, distances) of every point relative to i from the graph alone."""
        ptr, idx = self.collinearity
        out = np.zeros(self.N, dtype=np.int8)
        dist = np.zeros(self.N, dtype=np.int64)
        K.graph_labels(ptr, idx, i, self.N, out, dist)
        return out, dist

    # -- lines ---------------------------------------------------------------
    @property
    def lines(self):
        if self._lines is None:
            self._lines = self._compute_lines()
        return self._lines

    def set_lines(self, lines):
        lines = np.asarray(lines, dtype=np.int64)
        self._lines = lines.reshape(len(lines), lines.shape[1] if lines.ndim == 2 else 0)

    def _compute_lines(self):
        """All lines F x + F y through E_-1 pairs, as sorted index rows."""
        p = self.q
        ptr, idx = self.collinearity
        src = np.repeat(np.arange(self.N), np.diff(ptr))
        keep = src < idx
        a, b = src[keep], idx[keep]
        if a.size == 0:
            return np.zeros((0, p + 1), dtype=np.int64)
        rows = []
        chunk = 1 << 16
        for s in range(0, a.size, chunk):
            aa, bb = a[s:s + chunk], b[s:s + chunk]
            cols = [aa, bb]
            for mu in range(1, p):
                V = np.mod(self.points[aa] + mu * self.points[bb], p)
                j = self.index_of(V)
                if (j < 0).any():
                    t = int(np.flatnonzero(j < 0)[0])
                    raise VerificationError("a point of the line through an E_-1 pair is not extremal",
                                            (int(aa[t]), int(bb[t])))
                cols.append(j)
            rows.append(np.sort(np.stack(cols, axis=1), axis=1))
        lines = np.unique(np.concatenate(rows), axis=0)
        return lines

    def line_through(self, i, j):
        """Index row of the line through collinear points i != j."""
        if self.relations[i, j] != -1:
            raise GeometryError(f"points {i}, {j} are not collinear")
        if self.algebra is None:
            L = self.lines
            hit = np.flatnonzero((L == i).any(axis=1) & (L == j).any(axis=1))
            return L[hit[0]]
        p = self.q
        pts = [i, j] + [int(self.index_of(np.mod(self.points[i] + mu * self.points[j], p))[0])
                        for mu in range(1, p)]
        return np.array(sorted(pts), dtype=np.int64)

    # -- bracket point for E_1 pairs ---------------------------------------
    def bracket_point(self, i, j):
        """Index of the point F[x_i, x_j] for an E_1 pair."""
        if self.algebra is None:
            return self._brackets[(min(i, j), max(i, j))]
        v = self.algebra.bracket(self.points[i], self.points[j])
        idx = self.index_of(v)[0]
        if idx < 0:
            raise VerificationError(f"[x, y] for E_1 pair {i}, {j} is not a point", (i, j))
        return int(idx)

    def bracket_points(self, i, js):
        """Indices of F[x_i, x_j] for E_1 partners j of i (vectorized bracket_point)."""
        js = np.asarray(js, dtype=np.int64)
        if self.algebra is None:
            return np.array([self.bracket_point(i, j) for j in js], dtype=np.int64)
        if js.size == 0:
            return np.zeros(0, dtype=np.int64)
        A = _as_int(self.field, self.algebra.ad(self.points[i]))
        V = np.mod(self.points[js] @ A.T, self.q)
        zero = np.flatnonzero(~V.any(axis=1))
        if zero.size:
            raise VerificationError(f"[x, y] vanishes for E_1 pair {i}, {js[zero[0]]}", (i, int(js[zero[0]])))
        idx = self.index_of(V)
        if (idx < 0).any():
            j = int(js[np.flatnonzero(idx < 0)[0]])
            raise VerificationError(f"[x, y] for E_1 pair {i}, {j} is not a point", (i, j))
        return idx

    @cached_property
    def incidence(self):
        """CSR map point -> indices of the lines through it."""
        lines = self.lines
        flat = lines.ravel()
        owner = np.repeat(np.arange(len(lines), dtype=np.int64), lines.shape[1] if len(lines) else 0)
        order = np.argsort(flat, kind="stable")
        ptr = np.zeros(self.N + 1, dtype=np.int64)
        np.add.at(ptr, flat + 1, 1)
        return np.cumsum(ptr), owner[order]

    @property
    def degenerate(self) -> bool:
        """No lines: the geometry has no E_-1 pair."""
        return not (self.relations == -1).any()

    def counts(self):
        R = self.relations
        row = R[self.sweep_points[0]] if self.N else np.zeros(0)
        return {"points": int(self.N), "lines": int(len(self.lines)),
                "E_i(x)": {str(k): int((row == k).sum()) for k in range(-2, 3)}}

    def to_json(self, relations=True):
        out = {"source": self.source, "field": str(self.field) if self.algebra else None,
               "points": self.points.tolist() if self.points is not None else None,
               "lines": self.lines.tolist()}
        if relations:
            flat = self.relations.ravel()
            if flat.size:
                change = np.flatnonzero(np.diff(flat)) + 1
                starts = np.concatenate([[0], change])
                lens = np.diff(np.concatenate([starts, [flat.size]]))
                out["relations_rle"] = [[int(flat[s]), int(n)] for s, n in zip(starts, lens)]
            else:
                out["relations_rle"] = []
        return out


def _spread(n, k):
    if n <= k:
        return list(range(n))
    return sorted({int(round(t)) for t in np.linspace(0, n - 1, k)})


# --- construction ----------------------------------------------------------

def _seed_functionals(L, seeds):
    return [ex.extremal_functional(L, s) for s in seeds]


def orbit_geometry(L: Algebra, seeds, point_cap=DEFAULT_POINT_CAP, verify=True) -> ExtremalGeometry:
    """Closure of the seed points under the groups Exp(seed).

    The maps exp(x, t) for the seed elements x are verified to be algebra
    automorphisms preserving the g-form; every point reached is therefore
    extremal with functional g(y, .).
    """
    f = L.field
    if not f.is_finite:
        raise GeometryError("orbit enumeration needs a finite field")
    if not f.int_backed:
        raise GeometryError("orbit enumeration needs a prime below 2**25")
    p, d = f.p, L.dim
    seeds = canonical(f, np.asarray(seeds))
    _, first = np.unique(K.encode(seeds.copy(), p) if d * math.log2(p) < 62 else
                         np.array([hash(s.tobytes()) for s in seeds]), return_index=True)
    seeds = seeds[np.sort(first)]
    gfun = _seed_functionals(L, seeds)
    form = ex.g_form(L, [s for s in seeds], [g.values for g in gfun])
    G = _as_int(f, form.matrix)
    gens = []
    for s_i, s in enumerate(seeds):
        for t in range(1, p):
            M = _as_int(f, ex.exp_matrix(L, s, G @ s % p, t))
            if verify:
                w = homomorphism_witness(L, L, M)
                if w is not None:
                    raise VerificationError(f"exp map of seed {s_i} is not an automorphism at {w}", w)
                if not (np.mod(M.T @ G @ M - G, p) == 0).all():
                    raise VerificationError(f"exp map of seed {s_i} does not preserve the g-form")
            gens.append(Generator(s_i, t, M))
    if verify:
        for s_i, s in enumerate(seeds):
            ms = {g.t: g.matrix for g in gens if g.seed == s_i}
            for a in range(1, p):
                for b in range(1, p):
                    c = (a + b) % p
                    want = ms[c] if c else np.eye(d, dtype=np.int64)
                    if not (np.mod(ms[a] @ ms[b] - want, p) == 0).all():
                        raise VerificationError(f"one-parameter law fails for seed {s_i}")
    ng = len(gens)
    cap = int(point_cap)
    pts = np.zeros((min(cap, 1024), d), dtype=np.int64)
    perms = np.full((ng, pts.shape[0]), -1, dtype=np.int64)
    parent = np.full(pts.shape[0], -1, dtype=np.int64)
    via = np.full(pts.shape[0], -1, dtype=np.int64)
    index = PointIndex(p, d)
    n = 0
    roots = []

    def grow(need):
        nonlocal pts, perms, parent, via
        if need <= pts.shape[0]:
            return
        size = max(need, 2 * pts.shape[0])
        pts = np.vstack([pts, np.zeros((size - pts.shape[0], d), dtype=np.int64)])
        perms = np.hstack([perms, np.full((ng, size - perms.shape[1]), -1, dtype=np.int64)])
        parent = np.concatenate([parent, np.full(size - parent.size, -1, dtype=np.int64)])
        via = np.concatenate([via, np.full(size - via.size, -1, dtype=np.int64)])

    for s in seeds:
        if index.lookup(s[None, :])[0] >= 0:
            continue
        if n + 1 > cap:
            raise PointCapExceeded(f"point cap {cap} exceeded", n)
        grow(n + 1)
        pts[n] = s
        index.add(s[None, :], n)
        roots.append(n)
        frontier = np.array([n])
        n += 1
        while frontier.size:
            new_all = []
            for g_i, g in enumerate(gens):
                img = np.mod(pts[frontier] @ g.matrix.T, p)
                img = canonical(f, img)
                idx = index.lookup(img)
                miss = np.flatnonzero(idx < 0)
                if miss.size:
                    keys_rows = img[miss]
                    uniq, first_pos, inverse = np.unique(keys_rows, axis=0, return_index=True,
                                                         return_inverse=True)
                    order = np.argsort(first_pos)
                    uniq, first_pos = uniq[order], first_pos[order]
                    rank = np.empty(order.size, dtype=np.int64)
                    rank[order] = np.arange(order.size)
                    m = uniq.shape[0]
                    if n + m > cap:
                        raise PointCapExceeded(f"point cap {cap} exceeded", n + m)
                    grow(n + m)
                    pts[n:n + m] = uniq
                    parent[n:n + m] = frontier[miss[first_pos]]
                    via[n:n + m] = g_i
                    index.add(uniq, n)
                    idx[miss] = n + rank[inverse.ravel()]
                    new_all.append(np.arange(n, n + m))
                    n += m
                perms[g_i, frontier] = idx
            frontier = np.concatenate(new_all) if new_all else np.zeros(0, dtype=np.int64)
    geom = ExtremalGeometry(n, L, pts[:n].copy(), G, source="orbit")
    geom.generators = gens
    geom.perms = perms[:, :n].copy()
    geom.parent = parent[:n].copy()
    geom.via = via[:n].copy()
    geom.orbit_roots = roots
    geom.index = index
    geom.seed_points = [int(i) for i in geom.index_of(seeds)]
    if (geom.perms < 0).any():
        raise VerificationError("orbit is not closed under the generators")
    for g_i in range(ng):
        if np.unique(geom.perms[g_i]).size != n:
            raise VerificationError(f"generator {g_i} does not permute the points")
    if verify:
        for i in _spread(n, SPOT_ROWS):
            x = geom.points[i]
            g = geom.functionals[i]
            if ex.eq1_witness(L, x, g) is not None or ex.eq2_witness(L, x, g) is not None:
                raise VerificationError(f"orbit point {i} fails the extremal identities", i)
    return geom


def brute_force_geometry(L: Algebra, cap=2**16) -> ExtremalGeometry:
    """Every projective point of L tested for extremality (independent oracle).

    Sandwiches are extremal but give no geometry points; they are counted in
    ``sandwich_count``.
    """
    f = L.field
    if not f.is_finite or not f.int_backed:
        raise GeometryError("brute force needs a small finite field")
    p, d = f.p, L.dim
    total = (p ** d - 1) // (p - 1)
    if p ** d > cap:
        raise GeometryError(f"{total} projective points exceed the brute-force cap {cap}")
    adstack = _as_int(f, L.adjoint_stack).reshape(d, d, d)  # [i, k, j]: coeff of b_k in [b_i, b_j]
    cands = _projective_points(p, d)
    keep = []
    chunk = 4096
    for s in range(0, len(cands), chunk):
        X = cands[s:s + chunk]
        A = np.mod(np.einsum("ni,ikj->nkj", X, adstack), p)
        A2 = np.mod(A @ A, p)
        lead = np.argmax(X != 0, axis=1)
        # columns of A2 must be multiples of x: A2[:, k, b] x[lead] == x[k] A2[lead, b]
        top = A2[np.arange(len(X)), lead, :]                      # (n, d)
        ok = (np.mod(A2 - X[:, :, None] * top[:, None, :], p) == 0).all(axis=(1, 2))
        keep.extend((s + np.flatnonzero(ok)).tolist())
    good, funcs = [], []
    sandwiches = 0
    for i in keep:
        try:
            gf = ex.extremal_functional(L, cands[i])
        except ex.NotExtremal:
            continue
        if gf.is_zero or ex.is_sandwich(L, cands[i]):
            sandwiches += 1
            continue
        good.append(i)
        funcs.append(_as_int(f, gf.values))
    pts = cands[good] if good else np.zeros((0, d), dtype=np.int64)
    geom = ExtremalGeometry(len(good), L, pts, None, source="brute-force")
    geom.index = PointIndex(p, d)
    geom.index.add(pts, 0)
    geom.functionals = np.array(funcs, dtype=np.int64).reshape(len(good), d)
    if sandwiches:
        geom.notes.append(f"{sandwiches} projective sandwich classes excluded")
    geom.sandwich_count = sandwiches
    return geom


def _projective_points(p, d):
    """All canonical projective representatives in F_p^d, in lexicographic order."""
    out = []
    for lead in range(d):
        tail = d - lead - 1
        n = p ** tail
        block = np.zeros((n, d), dtype=np.int64)
        block[:, lead] = 1
        if tail:
            digits = np.arange(n)
            for c in range(d - 1, lead, -1):
                block[:, c] = digits % p
                digits //= p
        out.append(block)
    return np.concatenate(out)


def abstract_geometry(N, lines, relations, brackets=None) -> ExtremalGeometry:
    """A point-line space given by data, for toy examples and negative controls."""
    geom = ExtremalGeometry(N, source="abstract")
    geom.set_relations(np.asarray(relations, dtype=np.int8))
    geom.set_lines(np.asarray(lines, dtype=np.int64) if len(lines) else np.zeros((0, 1), dtype=np.int64))
    geom._brackets = dict(brackets or {})
    return geom
