"""Chevalley structure constants, Chevalley algebras and the recognition map."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .algebra import Algebra, Subspace, homomorphism_witness
from .fields import Field
from .linalg import VerificationError
from .roots import RootSystem


class StructureError(VerificationError):
    pass


class StructureTable:
    """Signs A[alpha, beta] = +-1 for all root pairs whose sum is a root."""

    def __init__(self, rs: RootSystem, pairs, A):
        self.rs = rs
        self.pairs = pairs
        self.A = A

    def __call__(self, a, b) -> int:
        return self.A.get((tuple(a), tuple(b)), 0)

    def __eq__(self, other):
        return isinstance(other, StructureTable) and self.A == other.A

    def with_flipped(self, a, b) -> "StructureTable":
        """Copy with the single entry A[a, b] negated (for negative controls)."""
        A = dict(self.A)
        A[(tuple(a), tuple(b))] = -A[(tuple(a), tuple(b))]
        return StructureTable(self.rs, self.pairs, A)

    def to_json(self):
        """Roots, defining pairs and the nonzero constants as (index a, index b, sign)."""
        idx = self.rs.index
        return {"type": str(self.rs.spec),
                "roots": [list(r) for r in self.rs.roots],
                "defining_pairs": sorted([idx[g], idx[p[0]], idx[p[1]]] for g, p in self.pairs.items()),
                "constants": sorted([idx[a], idx[b], v] for (a, b), v in self.A.items())}


# --- height recursion -----------------------------------------------------

def _positive_constant(rs, pairs, memo, a, b):
    key = (a, b)
    if key in memo:
        return memo[key]
    g = rs.add(a, b)
    g1, g2 = pairs[g]
    if (a, b) == (g1, g2):
        val = 1
    elif (b, a) == (g1, g2):
        val = -1
    else:
        # {a, b, g1, g2} spans an A_3 with highest root g.  Exactly one root of
        # each pair is simple in that A_3; the two simple ones are orthogonal
        # and leave a positive third simple root kappa = g - s - t.
        val = None
        for s, other_s in ((a, b), (b, a)):
            for t in (g1, g2):
                if rs.inner(s, t) != 0:
                    continue
                kappa = tuple(x - y - z for x, y, z in zip(g, s, t))
                if not (rs.is_root(kappa) and sum(kappa) > 0):
                    continue
                A = lambda u, v: _positive_constant(rs, pairs, memo, u, v)
                if t == g2:
                    # other_s = kappa + g2, g1 = s + kappa
                    v = A(kappa, g2) * A(s, kappa)
                else:
                    # other_s = kappa + g1, g2 = s + kappa
                    v = A(g1, kappa) * A(s, kappa)
                val = v if s == a else -v
                break
            if val is not None:
                break
        if val is None:
            raise StructureError(f"no A_3 reduction for pair {a}, {b}")
    memo[key] = val
    return val


def _constant(rs, pairs, memo, a, b):
    """Reduce an arbitrary pair to a positive one around the A_2 hexagon."""
    w = tuple(-x - y for x, y in zip(a, b))
    trip = (a, b, w)
    pos = [r for r in trip if sum(r) > 0]
    if len(pos) == 1:
        # two negatives: A[a,b] = -A[-a,-b]
        return -_constant(rs, pairs, memo, rs.neg(a), rs.neg(b))
    # the cyclic constants A[a,b] = A[b,w] = A[w,a] agree, and the two
    # positive roots are cyclically consecutive in one direction
    for k in range(3):
        u, v = trip[k], trip[(k + 1) % 3]
        if sum(u) > 0 and sum(v) > 0:
            return _positive_constant(rs, pairs, memo, u, v)
    raise StructureError("unreachable hexagon case")


def build_structure_constants(rs: RootSystem, pairs=None, verify=True) -> StructureTable:
    pairs = rs.defining_pairs() if pairs is None else pairs
    memo = {}
    A = {}
    for a in rs.roots:
        for b in rs.roots:
            if rs.inner(a, b) == -1:
                A[(a, b)] = _constant(rs, pairs, memo, a, b)
    table = StructureTable(rs, pairs, A)
    if verify:
        verify_structure_table(table)
    return table


def verify_structure_table(table: StructureTable, jacobi=True):
    rs = table.rs
    for a in rs.roots:
        for b in rs.roots:
            s = rs.add(a, b)
            v = table(a, b)
            if rs.is_root(s) != (v != 0):
                raise StructureError(f"A{a, b} = {v} but sum-is-root = {rs.is_root(s)}", (a, b))
            if v not in (-1, 0, 1):
                raise StructureError(f"A{a, b} = {v} is not +-1", (a, b))
    for g, (g1, g2) in table.pairs.items():
        if table(g1, g2) != 1:
            raise StructureError(f"defining pair {g1, g2} has A = {table(g1, g2)}", (g1, g2))
    for a in rs.roots:
        for b in rs.roots:
            if rs.inner(a, b) == -1:
                circle_closure(table, a, b)
    if jacobi:
        L = integral_algebra(table)
        w = L.jacobi_witness()
        if w is not None:
            raise StructureError(f"Jacobi fails over Z on {w}", w)


def circle_closure(table: StructureTable, a, b):
    """The six hexagon constants for a 2pi/3 pair, checked to agree.

    Returns (A[a,b], A[b,-a-b], A[-a-b,a], A[b,a], A[-a,-b], A[-b,a+b]).
    """
    rs = table.rs
    if rs.inner(a, b) != -1:
        raise ValueError(f"roots {a}, {b} are not at angle 2pi/3")
    neg = rs.neg
    s = rs.add(a, b)
    A = lambda u, v: Fraction(table(u, v))
    base = A(a, b)
    checks = {
        "A[a,b] = -A[b,a]": -A(b, a),
        "A[a,b] = -1/A[a+b,-a]": -1 / A(s, neg(a)) if A(s, neg(a)) else None,
        "A[a,b] = A[b,-a-b]": A(b, neg(s)),
        "A[a,b] = -1/A[-a,-b]": -1 / A(neg(a), neg(b)) if A(neg(a), neg(b)) else None,
        "A[a,b] = A[-a-b,a]": A(neg(s), a),
        "A[a,b] = -1/A[-b,a+b]": -1 / A(neg(b), s) if A(neg(b), s) else None,
    }
    for name, v in checks.items():
        if v != base:
            raise StructureError(f"circle identity {name} fails for {a}, {b}", (a, b))
    return [int(x) for x in (A(a, b), A(b, neg(s)), A(neg(s), a), A(b, a), A(neg(a), neg(b)), A(neg(b), s))]


# --- algebras --------------------------------------------------------------

def chevalley_labels(rs: RootSystem):
    def lab(r):
        return "x[" + ",".join(str(c) for c in r) + "]"
    return [lab(r) for r in rs.roots] + [f"h{i + 1}" for i in range(rs.n)]


def chevalley_table(table: StructureTable):
    """Integral bracket table on the basis x_alpha (canonical order), h_1..h_n."""
    rs = table.rs
    N = len(rs.roots)
    idx = rs.index
    out = {}
    for i, a in enumerate(rs.roots):
        for j in range(i + 1, N):
            b = rs.roots[j]
            s = rs.add(a, b)
            if all(c == 0 for c in s):
                out[(i, j)] = {N + t: c for t, c in enumerate(a) if c}
            elif s in idx:
                out[(i, j)] = {idx[s]: table(a, b)}
        for t in range(rs.n):
            k = rs.inner(rs.simple[t], a)
            if k:
                out[(i, N + t)] = {i: -k}  # [x_a, h_t] = -(alpha_t|a) x_a
    return out


def integral_algebra(table: StructureTable) -> Algebra:
    """The Z-form, realized over Q with integer constants."""
    return Algebra(Field.rationals(), chevalley_labels(table.rs), chevalley_table(table),
                   provenance={"kind": "chevalley", "type": str(table.rs.spec), "field": "Z"})


def build_chevalley_algebra(table: StructureTable, field, verify=True) -> Algebra:
    field = Field.parse(field)
    L = Algebra(field, chevalley_labels(table.rs), chevalley_table(table),
                provenance={"kind": "chevalley", "type": str(table.rs.spec), "field": str(field)})
    L.root_system = table.rs
    L.structure_table = table
    if verify:
        L.verify_jacobi()
    return L


@dataclass
class SpanningSet:
    """Elements x_alpha (keyed by root) and h_alpha = [x_alpha, x_-alpha] in some algebra."""

    algebra: Algebra
    rs: RootSystem
    x: dict
    h: dict


def canonical_spanning_set(L: Algebra, rs: RootSystem) -> SpanningSet:
    x = {a: L.basis_vector(i) for i, a in enumerate(rs.roots)}
    return SpanningSet(L, rs, x, {a: L.bracket(x[a], x[rs.neg(a)]) for a in rs.roots})


def _multiple(field, v, w):
    """c with v = c*w, or None."""
    piv = next((k for k in range(len(w)) if w[k] != 0), None)
    if piv is None:
        return 0 if field.is_zero(v) else None
    c = field.div(v[piv], w[piv])
    return c if field.equal(v, field.scale(w, c)) else None


def spanning_set_constants(S: SpanningSet):
    """Check the Chevalley relations on ``S`` and return the constants A[a, b].

    (i) [h_a, h_b] = 0, (ii) [h_a, x_b] = (a|b) x_b, (iii) h_a = [x_a, x_-a],
    (iv) [x_a, x_b] is a nonzero multiple of x_{a+b} or zero as appropriate.
    """
    L, rs, f = S.algebra, S.rs, S.algebra.field
    for a in rs.roots:
        if f.is_zero(S.x[a]):
            raise StructureError(f"x{a} is zero", a)
        if not f.equal(S.h[a], L.bracket(S.x[a], S.x[rs.neg(a)])):
            raise StructureError(f"(iii) fails at {a}", a)
    for a in rs.roots:
        for b in rs.roots:
            if f.is_zero(L.bracket(S.h[a], S.h[b])) is False:
                raise StructureError(f"(i) fails at {a}, {b}", (a, b))
            if not f.equal(L.bracket(S.h[a], S.x[b]), f.scale(S.x[b], rs.inner(a, b))):
                raise StructureError(f"(ii) fails at {a}, {b}", (a, b))
    A = {}
    for a in rs.roots:
        for b in rs.roots:
            s = rs.add(a, b)
            if all(c == 0 for c in s):
                continue
            v = L.bracket(S.x[a], S.x[b])
            if rs.is_root(s):
                c = _multiple(f, v, S.x[s])
                if c is None or c == 0:
                    raise StructureError(f"(iv) fails at {a}, {b}: bracket not a nonzero multiple", (a, b))
                A[(a, b)] = c
            elif not f.is_zero(v):
                raise StructureError(f"(iv) fails at {a}, {b}: bracket should vanish", (a, b))
    return A


def normalize_spanning_set(S: SpanningSet, pairs=None) -> SpanningSet:
    """Rescale so that A = 1 on every defining pair, inversely on negatives."""
    L, rs, f = S.algebra, S.rs, S.algebra.field
    spanning_set_constants(S)
    pairs = rs.defining_pairs() if pairs is None else pairs
    x = dict(S.x)
    for g in rs.positive:
        if g not in pairs:
            continue
        g1, g2 = pairs[g]
        c = _multiple(f, L.bracket(x[g1], x[g2]), x[g])
        x[g] = f.scale(x[g], c)
        x[rs.neg(g)] = f.scale(x[rs.neg(g)], f.inv(c))
    out = SpanningSet(L, rs, x, {a: L.bracket(x[a], x[rs.neg(a)]) for a in rs.roots})
    A = spanning_set_constants(out)
    for g, (g1, g2) in pairs.items():
        if A[(g1, g2)] != 1:
            raise StructureError(f"normalization failed at {g}", g)
    return out


def spanning_set_table(S: SpanningSet) -> StructureTable:
    f = S.algebra.field
    A = spanning_set_constants(S)
    # over F_2 the residue 1 is also -1; report signs as integers in {-1, 1}
    A = {k: (1 if v == f(1) else -1) for k, v in A.items()}
    return StructureTable(S.rs, S.rs.defining_pairs(), A)


@dataclass
class Recognition:
    matrix: np.ndarray       # L.dim x dim(g_F)
    source: Algebra          # the Chevalley algebra g_F
    kernel: Subspace
    surjective: bool
    image_dim: int


def recognize_chevalley(rs: RootSystem, L: Algebra, S: SpanningSet, table=None) -> Recognition:
    """The map g_F -> L sending x^_a to x_a and h^_i to h_{alpha_i}.

    Raises if it is not a homomorphism; surjectivity is reported, not required.
    """
    f = L.field
    table = build_structure_constants(rs) if table is None else table
    G = build_chevalley_algebra(table, f, verify=False)
    M = f.zeros((L.dim, G.dim))
    for i, a in enumerate(rs.roots):
        M[:, i] = S.x[a]
    for t in range(rs.n):
        M[:, len(rs.roots) + t] = S.h[rs.simple[t]]
    w = homomorphism_witness(G, L, M)
    if w is not None:
        raise StructureError(f"recognition map fails on {G.labels[w[0]]}, {G.labels[w[1]]}", w)
    K = linalg.kernel(f, M)
    kern = Subspace(G, K.T)
    image_dim = linalg.rank(f, M)
    return Recognition(M, G, kern, image_dim == L.dim, image_dim)


def verify_h_identities(S: SpanningSet):
    """h_-a = -h_a, h_{a+b} = h_a + h_b, and h_a = sum c_i h_{alpha_i}."""
    L, rs, f = S.algebra, S.rs, S.algebra.field
    for a in rs.roots:
        if not f.is_zero(f.reduce(S.h[rs.neg(a)] + S.h[a])):
            raise StructureError(f"h_-a != -h_a at {a}", a)
        comb = f.zeros(L.dim)
        for t, c in enumerate(a):
            comb = f.reduce(comb + S.h[rs.simple[t]] * c)
        if not f.equal(comb, S.h[a]):
            raise StructureError(f"h_a is not the simple-coroot combination at {a}", a)
        for b in rs.roots:
            s = rs.add(a, b)
            if rs.is_root(s) and not f.equal(S.h[s], S.h[a] + S.h[b]):
                raise StructureError(f"h_(a+b) != h_a + h_b at {a}, {b}", (a, b))
