"""Finite-dimensional Lie algebras over exact fields, stored as sparse bracket tables.

The bracket table is kept in coordinate form: parallel arrays ``(I, J, K, V)``
meaning ``[b_I, b_J]`` has coefficient ``V`` on ``b_K``.  Both orders of every
pair are stored; diagonal pairs never are (the table is alternating by
construction).  Most heavy operations go through :func:`bracket_families`,
which brackets two families of vectors by a sparse join against the table.
"""
from __future__ import annotations

import random
from fractions import Fraction
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .fields import Field
from .linalg import VerificationError


class AlgebraError(ValueError):
    pass


def _join(left_key, right_key):
    """All index pairs (l, r) with left_key[l] == right_key[r]."""
    left_key = np.asarray(left_key, dtype=np.int64)
    right_key = np.asarray(right_key, dtype=np.int64)
    order = np.argsort(right_key, kind="stable")
    srt = right_key[order]
    starts = np.searchsorted(srt, left_key, "left")
    counts = np.searchsorted(srt, left_key, "right") - starts
    total = int(counts.sum())
    li = np.repeat(np.arange(left_key.size), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    ri = order[np.repeat(starts, counts) + offs]
    return li, ri


def _entries(field, m):
    """Nonzero entries of a 2-d field array as (rows, cols, values)."""
    m = np.asarray(m)
    if m.dtype == object:
        mask = np.array([v != 0 for v in m.ravel()], dtype=bool).reshape(m.shape)
    else:
        mask = m != 0
    r, c = np.nonzero(mask)
    return r, c, m[r, c]


class Algebra:
    """A Lie algebra with basis ``labels`` over ``field``.

    ``table`` maps ``(i, j)`` with ``i < j`` to ``{k: coeff}``.  Entries for
    ``(j, i)`` are filled in by antisymmetry.
    """

    def __init__(self, field: Field, labels, table, provenance=None):
        self.field = field
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.provenance = provenance or {"kind": "ad-hoc"}
        I, J, K, V = [], [], [], []
        for (i, j), row in table.items():
            if i == j:
                if any(field(c) != 0 for c in row.values()):
                    raise AlgebraError(f"[b{i}, b{i}] must vanish")
                continue
            if i > j:
                raise AlgebraError("table keys must satisfy i < j")
            for k, c in row.items():
                c = field(c)
                if c == 0:
                    continue
                I += [i, j]
                J += [j, i]
                K += [k, k]
                V += [c, field.neg(c)]
        self.I = np.array(I, dtype=np.int64)
        self.J = np.array(J, dtype=np.int64)
        self.K = np.array(K, dtype=np.int64)
        self.V = field.reduce(np.array(V, dtype=object)) if V else field.zeros(0)

    def __repr__(self):
        return f"Algebra(dim={self.dim}, field={self.field}, {self.provenance.get('kind')})"

    @classmethod
    def from_structure(cls, field, labels, C, provenance=None):
        """Build from a dense structure tensor ``C[i, j, k]``."""
        C = np.asarray(C)
        table = {}
        n = len(labels)
        for i in range(n):
            for j in range(i + 1, n):
                row = {int(k): C[i, j, k] for k in np.flatnonzero([v != 0 for v in C[i, j]])}
                if row:
                    table[(i, j)] = row
        alg = cls(field, labels, table, provenance)
        if not field.equal(alg.dense, field.reduce(C)):
            raise AlgebraError("structure tensor is not alternating")
        return alg

    @property
    def nnz(self):
        return self.I.size

    def table(self):
        out = {}
        for i, j, k, v in zip(self.I, self.J, self.K, self.V):
            if i < j:
                out.setdefault((int(i), int(j)), {})[int(k)] = v
        return out

    def to_json(self):
        """Field, labels and the bracket table as sorted (i, j, [[k, c], ...]) triples with i < j."""
        enc = (lambda c: int(c)) if self.field.is_finite else (lambda c: str(c))
        tab = self.table()
        return {"field": str(self.field), "labels": [str(l) for l in self.labels],
                "brackets": [[i, j, [[k, enc(c)] for k, c in sorted(tab[(i, j)].items())]]
                             for (i, j) in sorted(tab)]}

    @classmethod
    def from_json(cls, data) -> "Algebra":
        field = Field.parse(data["field"])
        conv = int if field.is_finite else Fraction
        table = {(int(i), int(j)): {int(k): field(conv(c)) for k, c in row} for i, j, row in data["brackets"]}
        return cls(field, data["labels"], table, provenance={"kind": "json"})

    # -- vectors ---------------------------------------------------------
    def vector(self, values):
        v = self.field.array(values)
        if v.shape != (self.dim,):
            raise AlgebraError(f"expected a vector of length {self.dim}")
        return v

    def basis_vector(self, i):
        v = self.field.zeros(self.dim)
        v[i] = self.field(1)
        return v

    def element(self, values) -> "Element":
        return Element(self, self.vector(values))

    def basis_element(self, i) -> "Element":
        return Element(self, self.basis_vector(i))

    def identity(self):
        return self.field.eye(self.dim)

    # -- brackets ----------------------------------------------------------
    def bracket_families(self, U, W):
        """``out[a, b] = [U[:, a], W[:, b]]`` for column families U, W."""
        f = self.field
        U = np.asarray(U)
        W = np.asarray(W)
        if f.p is None and self.int_V is not None:
            su, sw = f.scaled_integers(U), f.scaled_integers(W)
            if su is not None and sw is not None:
                out = self.integer_bracket_families(su[0], sw[0])
                if out is not None:
                    return f.from_scaled(out, su[1] * sw[1])
        out = f.zeros((U.shape[1], W.shape[1], self.dim))
        if self.nnz == 0:
            return out
        ur, uc, uv = _entries(f, U)
        wr, wc, wv = _entries(f, W)
        ci, ui = _join(self.I, ur)
        if ci.size == 0:
            return out
        t, wi = _join(self.J[ci], wr)
        if t.size == 0:
            return out
        c = ci[t]
        vals = self.V[c] * uv[ui[t]]
        if f.int_backed:
            vals = np.mod(vals, f.p)
        vals = vals * wv[wi]
        if f.int_backed:
            vals = np.mod(vals, f.p)
        np.add.at(out, (uc[ui[t]], wc[wi], self.K[c]), vals)
        return f.reduce(out)

    @cached_property
    def int_V(self):
        """Structure constants as int64 (residues for F_p), or None if not integral."""
        f = self.field
        if f.int_backed:
            return self.V
        return f.integral(self.V) if self.nnz else np.zeros(0, dtype=np.int64)

    def integer_bracket_families(self, U, W):
        """Bracket of int64 column families using the integral constants.

        Reduced mod p over F_p; exact integers over Q.  None if the constants
        are not integral or the result could overflow.
        """
        V = self.int_V
        mod = self.field.p if self.field.int_backed else None
        out = np.zeros((U.shape[1], W.shape[1], self.dim), dtype=np.int64)
        if V is None:
            return None
        if self.nnz == 0:
            return out
        ur, uc = np.nonzero(U)
        wr, wc = np.nonzero(W)
        uv, wv = U[ur, uc], W[wr, wc]
        if mod is None and uv.size and wv.size:
            bound = int(np.abs(V).max()) * int(np.abs(uv).max()) * int(np.abs(wv).max()) * self.nnz
            if bound >= 2**62:
                return None
        ci, ui = _join(self.I, ur)
        if ci.size == 0:
            return out
        t, wi = _join(self.J[ci], wr)
        if t.size == 0:
            return out
        c = ci[t]
        vals = V[c] * uv[ui[t]]
        if mod is not None:
            vals = np.mod(vals, mod)
        vals = vals * wv[wi]
        np.add.at(out, (uc[ui[t]], wc[wi], self.K[c]), vals)
        return out if mod is None else np.mod(out, mod)

    def bracket(self, u, v):
        return self.bracket_families(np.asarray(u).reshape(-1, 1), np.asarray(v).reshape(-1, 1))[0, 0]

    def ad(self, u):
        """Matrix of ``y -> [u, y]`` (columns are images of basis vectors)."""
        return self.bracket_families(np.asarray(u).reshape(-1, 1), self.identity())[0].T.copy()

    @cached_property
    def dense(self):
        C = self.field.zeros((self.dim, self.dim, self.dim))
        if self.nnz:
            C[self.I, self.J, self.K] = self.V
        return C

    @cached_property
    def adjoint_stack(self):
        """Rows ``(i, k)``: coefficient of b_k in [b_i, y], as a (dim*dim, dim) matrix."""
        d = self.dim
        M = self.field.zeros((d * d, d))
        if self.nnz:
            M[self.I * d + self.K, self.J] = self.V
        return M

    # -- verification ------------------------------------------------------
    def jacobi_witness(self):
        """First basis triple violating Jacobi as ``(i, j, m)``, or None."""
        f = self.field
        d = self.dim
        if self.nnz == 0:
            return None
        V = self.V if f.int_backed else f.integral(self.V)
        mod = f.p if f.int_backed else None
        if V is None:
            return self._jacobi_witness_slow()
        # T[a, b, c, n] = [b_a, [b_b, b_c]]: join (b, c -> k) with (a, k -> n)
        e1, e2 = _join(self.K, self.J)
        a, b, c, n = self.I[e2], self.I[e1], self.J[e1], self.K[e2]
        vals = V[e1] * V[e2]
        key = lambda x, y, z: ((x * d + y) * d + z) * d + n
        keys = np.concatenate([key(a, b, c), key(c, a, b), key(b, c, a)])
        vals = np.concatenate([vals, vals, vals])
        order = np.argsort(keys, kind="stable")
        keys, vals = keys[order], vals[order]
        uniq, starts = np.unique(keys, return_index=True)
        sums = np.add.reduceat(vals, starts)
        if mod is not None:
            sums = np.mod(sums, mod)
        bad = np.flatnonzero(sums)
        if bad.size == 0:
            return None
        k = int(uniq[bad[0]]) // d
        return (k // (d * d), (k // d) % d, k % d)

    def _jacobi_witness_slow(self):
        f = self.field
        C = self.dense
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for m in range(j + 1, self.dim):
                    e = [self.basis_vector(t) for t in (i, j, m)]
                    s = (self.bracket(e[0], self.bracket(e[1], e[2]))
                         + self.bracket(e[1], self.bracket(e[2], e[0]))
                         + self.bracket(e[2], self.bracket(e[0], e[1])))
                    if not f.is_zero(f.reduce(s)):
                        return (i, j, m)
        return None

    def verify_jacobi(self):
        w = self.jacobi_witness()
        if w is not None:
            raise VerificationError(f"Jacobi identity fails on basis triple {w}", w)


def homomorphism_witness(src: Algebra, dst: Algebra, M):
    """First basis pair (a, b) of ``src`` with M[a,b] != [Ma, Mb], or None.

    ``M`` is a ``dst.dim x src.dim`` matrix.
    """
    f = dst.field
    M = f.reduce(M)
    rhs = dst.bracket_families(M, M)  # (src.dim, src.dim, dst.dim)
    lhs_src = src.bracket_families(src.identity(), src.identity())
    lhs = f.reduce(np.einsum("abk,jk->abj", lhs_src, M)) if src.dim else lhs_src
    diff = f.reduce(lhs - rhs)
    if diff.dtype == object:
        mask = np.array([v != 0 for v in diff.ravel()]).reshape(diff.shape).any(axis=2)
    else:
        mask = diff.any(axis=2)
    bad = np.argwhere(mask)
    return None if bad.size == 0 else tuple(int(x) for x in bad[0])


@dataclass(eq=False)
class Element:
    algebra: Algebra
    coeffs: np.ndarray

    def _same(self, other):
        if not isinstance(other, Element) or other.algebra is not self.algebra:
            raise AlgebraError("elements live in different algebras")

    def __add__(self, other):
        self._same(other)
        return Element(self.algebra, self.algebra.field.reduce(self.coeffs + other.coeffs))

    def __sub__(self, other):
        self._same(other)
        return Element(self.algebra, self.algebra.field.reduce(self.coeffs - other.coeffs))

    def __neg__(self):
        return Element(self.algebra, self.algebra.field.reduce(-self.coeffs))

    def __rmul__(self, c):
        return Element(self.algebra, self.algebra.field.scale(self.coeffs, c))

    def __eq__(self, other):
        return (isinstance(other, Element) and other.algebra is self.algebra
                and self.algebra.field.equal(self.coeffs, other.coeffs))

    def is_zero(self):
        return self.algebra.field.is_zero(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*{l}" for c, l in zip(self.coeffs, self.algebra.labels) if c != 0]
        return " + ".join(terms) or "0"


def bracket(a: Element, b: Element) -> Element:
    a._same(b)
    return Element(a.algebra, a.algebra.bracket(a.coeffs, b.coeffs))


class Subspace:
    """Subspace of an algebra held as a canonical rref basis (rows)."""

    def __init__(self, algebra: Algebra, vectors=None):
        self.algebra = algebra
        f = algebra.field
        rows = f.zeros((0, algebra.dim)) if vectors is None or len(vectors) == 0 \
            else f.reduce(np.asarray(vectors).reshape(-1, algebra.dim))
        self.basis, self.pivots = linalg.row_basis(f, rows)

    @property
    def dim(self):
        return len(self.pivots)

    def __len__(self):
        return self.dim

    def __contains__(self, v):
        return linalg.in_span(self.algebra.field, self.basis, self.pivots, v)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and other.dim == self.dim
                and self.algebra.field.equal(self.basis, other.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.algebra.dim})"

    def reduce(self, v):
        return linalg.reduce_vector(self.algebra.field, self.basis, self.pivots, v)

    def is_ideal(self):
        if self.dim == 0:
            return True
        L = self.algebra
        br = L.bracket_families(L.identity(), self.basis.T)
        return all(v in self for v in br.reshape(-1, L.dim))


def center(L: Algebra) -> Subspace:
    """{z : [b, z] = 0 for all basis b} as the kernel of the stacked ad operators."""
    if L.dim == 0:
        return Subspace(L)
    k = linalg.kernel(L.field, L.adjoint_stack)
    return Subspace(L, k.T)


def ideal_closure(L: Algebra, seed) -> Subspace:
    """Smallest ad-stable subspace containing ``seed`` (a Subspace or vectors)."""
    f = L.field
    if isinstance(seed, Subspace):
        seed = seed.basis
    S = Subspace(L, seed)
    frontier = S.basis
    while len(frontier):
        br = L.bracket_families(L.identity(), np.asarray(frontier).T).reshape(-1, L.dim)
        fresh = [v for v in br if v not in S]
        if not fresh:
            break
        S = Subspace(L, np.vstack([S.basis, np.asarray(fresh)]))
        frontier = Subspace(L, fresh).basis
    return S


@dataclass
class Quotient:
    algebra: Algebra
    projection: np.ndarray  # quotient.dim x L.dim
    representatives: list   # basis indices of L used as coset representatives


def quotient(L: Algebra, ideal: Subspace) -> Quotient:
    f = L.field
    if not ideal.is_ideal():
        raise AlgebraError("subspace is not an ideal")
    if ideal.dim == L.dim:
        raise AlgebraError("cannot quotient by the whole algebra")
    reps = [i for i in range(L.dim) if i not in set(ideal.pivots)]
    P = f.zeros((len(reps), L.dim))
    for j in range(L.dim):
        r = ideal.reduce(L.basis_vector(j))
        P[:, j] = r[reps]
    table = {}
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            v = P @ L.bracket(L.basis_vector(reps[a]), L.basis_vector(reps[b]))
            v = f.reduce(v)
            row = {k: v[k] for k in range(len(reps)) if v[k] != 0}
            if row:
                table[(a, b)] = row
    Q = Algebra(f, [L.labels[i] for i in reps], table,
                provenance={"kind": "quotient", "parent": L.provenance, "ideal_dim": ideal.dim})
    w = homomorphism_witness(L, Q, P)
    if w is not None:
        raise VerificationError(f"projection is not a homomorphism at {w}", w)
    if linalg.rank(f, P) != Q.dim:
        raise VerificationError("projection is not surjective")
    return Quotient(Q, P, reps)


@dataclass
class SimplicityReport:
    certified: bool
    witness: Subspace | None = None
    reason: str = ""


def simplicity_probe(L: Algebra, trials: int = 8, seed: int = 0) -> SimplicityReport:
    """Semi-decision: every basis vector and ``trials`` random vectors generate L."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    f = L.field
    Z = center(L)
    if Z.dim:
        if Z.dim < L.dim:
            return SimplicityReport(False, Z, "nonzero center")
        if L.dim > 1:
            return SimplicityReport(False, Subspace(L, [L.basis_vector(0)]), "abelian")
        return SimplicityReport(False, None, "one-dimensional abelian")
    rng = random.Random(seed)
    cands = [L.basis_vector(i) for i in range(L.dim)]
    for _ in range(trials):
        if f.is_finite:
            v = f.array([rng.randrange(f.p) for _ in range(L.dim)])
        else:
            v = f.array([rng.randint(-3, 3) for _ in range(L.dim)])
        if not f.is_zero(v):
            cands.append(v)
    for v in cands:
        S = ideal_closure(L, [v])
        if S.dim != L.dim:
            return SimplicityReport(False, S, "proper ideal generated")
    return SimplicityReport(True)
