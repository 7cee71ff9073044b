"""Extremal elements, sandwiches, the g-form, the relations E_-2..E_2 and exp maps."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import Algebra, Subspace, homomorphism_witness
from .linalg import VerificationError

E_M2, E_M1, E_0, E_1, E_2 = -2, -1, 0, 1, 2
RELATION_NAMES = {E_M2: "E-2", E_M1: "E-1", E_0: "E0", E_1: "E1", E_2: "E2"}

# ratios tested for E_-1 over Q; degree <= 2 conditions vanishing at 5 ratios vanish
_Q_RATIOS = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)]

# char 2 tie-break enumerates the solution coset when it has at most this many elements
_MAX_COSET = 2**12


class NotExtremal(VerificationError):
    pass


class ExtremalError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GFunctional:
    algebra: Algebra
    x: np.ndarray
    values: np.ndarray
    unique: bool = True

    def __call__(self, y):
        f = self.algebra.field
        return f(f.reduce(np.dot(self.values, np.asarray(y))))

    @property
    def is_zero(self):
        return self.algebra.field.is_zero(self.values)


def _integer_data(L: Algebra, x, g):
    """``(X, dx, Gv, dg, mod)`` with x = X/dx, g = Gv/dg as int64, or None."""
    f = L.field
    if L.int_V is None:
        return None
    if f.int_backed:
        return f.reduce(x), 1, f.reduce(g), 1, f.p
    if f.p is not None:
        return None
    sx, sg = f.scaled_integers(x), f.scaled_integers(g)
    if sx is None or sg is None:
        return None
    return sx[0], sx[1], sg[0], sg[1], None


def _ad_int(L, X):
    return L.integer_bracket_families(X.reshape(-1, 1), np.eye(L.dim, dtype=np.int64))[0].T.copy()


def _nonzero(m, mod):
    return np.mod(m, mod) != 0 if mod is not None else m != 0


def eq1_witness(L: Algebra, x, g):
    """First basis b with [x,[x,b]] != 2 g(b) x, or None."""
    f = L.field
    data = _integer_data(L, x, g)
    if data is not None:
        X, dx, Gv, dg, mod = data
        A = _ad_int(L, X)
        if mod is not None:
            lhs = np.mod(A @ A, mod)
        else:
            lhs = A @ A
        diff = lhs * dg - 2 * np.outer(X, Gv) * dx
        bad = np.flatnonzero(_nonzero(diff, mod).any(axis=0))
        return None if bad.size == 0 else int(bad[0])
    A = L.ad(x)
    lhs = f.matmul(A, A)
    rhs = f.reduce(np.outer(x, f.reduce(2 * np.asarray(g))))
    bad = np.flatnonzero(_col_nonzero(f, f.reduce(lhs - rhs)))
    return None if bad.size == 0 else int(bad[0])


def _col_nonzero(f, m):
    if m.dtype == object:
        return np.array([any(v != 0 for v in m[:, j]) for j in range(m.shape[1])], dtype=bool)
    return m.any(axis=0)


def _g_of_brackets(L: Algebra, g, V=None):
    """Matrix G2[y, z] = g([b_y, b_z])."""
    V = L.V if V is None else V
    G2 = np.zeros((L.dim, L.dim), dtype=V.dtype) if V.dtype != object else L.field.zeros((L.dim, L.dim))
    if L.nnz:
        np.add.at(G2, (L.I, L.J), V * np.asarray(g)[L.K])
    return G2


def eq2_witness(L: Algebra, x, g):
    """First basis pair (y, z) violating [[x,y],[x,z]] = g([y,z])x + g(z)[x,y] - g(y)[x,z].

    Checked exhaustively.  Both sides are alternating in (y, z); pairs where
    neither [x, b] nor g(b) is nonzero on either side reduce to g([y,z]) = 0.
    """
    f = L.field
    d = L.dim
    x = f.reduce(np.asarray(x))
    g = f.reduce(np.asarray(g))
    data = _integer_data(L, x, g)
    if data is not None:
        X, dx, Gv, dg, mod = data
        A = _ad_int(L, X)
        G2 = _g_of_brackets(L, Gv, L.int_V)
        nz = lambda m: _nonzero(m, mod)
        supp = np.flatnonzero(nz(A).any(axis=0) | nz(Gv))
        bracket = L.integer_bracket_families
    else:
        mod = None
        X, dx, Gv, dg = x, 1, g, 1
        A = L.ad(x)
        G2 = f.reduce(_g_of_brackets(L, g))
        nz = lambda m: np.array([v != 0 for v in np.ravel(f.reduce(m))], dtype=bool).reshape(np.shape(m))
        supp = np.flatnonzero(nz(A).any(axis=0) | nz(g))
        bracket = L.bracket_families
    rest = np.setdiff1d(np.arange(d), supp)
    if rest.size:
        bad = np.argwhere(nz(G2[np.ix_(rest, rest)]))
        if bad.size:
            return (int(rest[bad[0][0]]), int(rest[bad[0][1]]))
    if supp.size == 0:
        return None
    lhs = bracket(A[:, supp], A)                   # (s, d, d) scaled by dx^2
    rhs = (G2[supp][:, :, None] * X[None, None, :]
           + Gv[None, :, None] * A.T[supp][:, None, :]
           - Gv[supp][:, None, None] * A.T[None, :, :])   # scaled by dg*dx
    bad = np.argwhere(nz(lhs * dg - rhs * dx).any(axis=2))
    if bad.size == 0:
        return None
    a, b = bad[0]
    return (int(supp[a]), int(b))


def _min_weight(f, base, null_basis):
    """Solution of least support in base + span(null_basis), ties to the first found."""
    k = null_basis.shape[1]
    if k == 0 or f.p ** k > _MAX_COSET:
        return base
    best, best_w = base, int(np.count_nonzero(base))
    for coeffs in itertools.product(range(f.p), repeat=k):
        v = f.reduce(base + null_basis @ np.array(coeffs, dtype=np.int64))
        w = int(np.count_nonzero(v))
        if w < best_w:
            best, best_w = v, w
    return best


def _solve_char2(L: Algebra, x, chunk=256):
    """Solve the linear system the double-bracket identity imposes on g.

    Equation (y, z, k) reads sum_m x_k C[y,z,m] g_m + A[k,y] g_z - A[k,z] g_y
    = [[x,y],[x,z]]_k with A = ad x.  Pairs with [b_y, b_z] = 0 and both
    [x, b_y] = [x, b_z] = 0 give only trivial rows and are skipped.
    Returns ``(g, unique)``, or None when the system is inconsistent.
    """
    f = L.field
    d = L.dim
    A = L.ad(x)
    C = L.dense
    sa = np.flatnonzero(A.any(axis=0))
    touch = np.zeros((d, d), dtype=bool)
    touch[L.I, L.J] = True
    touch[sa, :] = True
    touch[:, sa] = True
    py, pz = np.nonzero(np.triu(touch, 1))
    pos = np.full(d, -1)
    pos[sa] = np.arange(sa.size)
    inner = L.bracket_families(A[:, sa], A[:, sa])
    basis = f.zeros((0, d + 1))
    for s in range(0, py.size, chunk):
        y, z = py[s:s + chunk], pz[s:s + chunk]
        n = y.size
        coef = np.zeros((n, d, d + 1), dtype=np.int64)        # (pair, k, m | rhs)
        coef[:, :, :d] = C[y, z][:, None, :] * x[None, :, None]
        coef[np.arange(n), :, z] += A[:, y].T
        coef[np.arange(n), :, y] -= A[:, z].T
        both = (pos[y] >= 0) & (pos[z] >= 0)
        coef[both, :, d] = inner[pos[y[both]], pos[z[both]]]
        rows = f.reduce(coef.reshape(-1, d + 1))
        rows = rows[rows.any(axis=1)]
        if rows.size == 0:
            continue
        rows = np.unique(rows, axis=0)
        basis, piv = linalg.row_basis(f, np.vstack([basis, rows]))
        if piv and piv[-1] == d:
            return None
    M, b = basis[:, :d], basis[:, d]
    sol = linalg.solve(f, M, b) if len(basis) else linalg.Solution(f.zeros(d), d)
    if sol is None:
        return None
    if sol.unique:
        return sol.x, True
    if f.is_zero(b):
        return f.zeros(d), False
    K = linalg.kernel(f, M) if len(basis) else f.eye(d)
    return _min_weight(f, sol.x, K), False


def extremal_functional(L: Algebra, x, g=None) -> GFunctional:
    """g_x for an extremal ``x``; raises :class:`NotExtremal` with the first failure.

    With ``g`` given it is only verified.
    """
    f = L.field
    x = f.reduce(np.asarray(x))
    if f.is_zero(x):
        raise ExtremalError("x = 0")
    unique = True
    A = L.ad(x)
    A2 = f.matmul(A, A)
    if g is None:
        if f.characteristic == 2:
            bad = np.flatnonzero(_col_nonzero(f, A2))
            if bad.size:
                raise NotExtremal(f"[x,[x,b]] != 0 for b = {L.labels[bad[0]]} in characteristic 2",
                                  ("eq1", int(bad[0])))
            res = _solve_char2(L, x)
            if res is None:
                raise NotExtremal("the system for g_x is inconsistent", ("eq2", None))
            g, unique = res
        else:
            piv = int(np.flatnonzero([v != 0 for v in x])[0])
            g = f.zeros(L.dim)
            half = f.inv(2)
            for b in range(L.dim):
                col = A2[:, b]
                c = f.div(col[piv], x[piv])
                if not f.equal(col, f.scale(x, c)):
                    raise NotExtremal(f"[x,[x,b]] not in Fx for b = {L.labels[b]}", ("eq1", b))
                g[b] = f.mul(c, half)
    g = f.reduce(np.asarray(g))
    w = eq1_witness(L, x, g)
    if w is not None:
        raise NotExtremal(f"[x,[x,b]] = 2g(b)x fails at b = {L.labels[w]}", ("eq1", w))
    w = eq2_witness(L, x, g)
    if w is not None:
        raise NotExtremal(f"double-bracket identity fails at {L.labels[w[0]]}, {L.labels[w[1]]}", ("eq2", w))
    return GFunctional(L, x, g, unique)


def is_extremal(L: Algebra, x) -> bool:
    try:
        extremal_functional(L, x)
    except NotExtremal:
        return False
    return True


def in_E(L: Algebra, x) -> bool:
    """Extremal and not a sandwich (the elements that give geometry points)."""
    try:
        gx = extremal_functional(L, x)
    except NotExtremal:
        return False
    return not gx.is_zero and not is_sandwich(L, x)


def is_sandwich(L: Algebra, x) -> bool:
    f = L.field
    x = f.reduce(np.asarray(x))
    A = L.ad(x)
    if not f.is_zero(f.matmul(A, A)):
        return False
    return eq2_witness(L, x, f.zeros(L.dim)) is None


# --- the g-form ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GForm:
    algebra: Algebra
    matrix: np.ndarray      # G[i, j] = g(b_i, b_j)
    gens: list

    def __call__(self, u, v):
        f = self.algebra.field
        return f(f.reduce(np.asarray(u) @ self.matrix @ np.asarray(v)))

    def functional(self, x):
        """g(x, .) as a value vector."""
        f = self.algebra.field
        return f.reduce(np.asarray(x) @ self.matrix)


class GFormError(VerificationError):
    pass


def invariance_witness(L: Algebra, G):
    """First basis triple (a, b, c) with g([a,b],c) != g(a,[b,c]), or None."""
    f = L.field
    d = L.dim
    lhs = f.zeros((d, d, d))
    rhs = f.zeros((d, d, d))
    if L.nnz:
        np.add.at(lhs, (L.I, L.J), L.V[:, None] * G[L.K, :])
        # g(a, [b, c]) = sum_k G[a, k] C[b, c, k]
        np.add.at(rhs.transpose(1, 2, 0), (L.I, L.J), L.V[:, None] * G[:, L.K].T)
    diff = f.reduce(lhs - rhs)
    bad = np.argwhere(diff != 0) if diff.dtype != object else \
        np.argwhere(np.array([v != 0 for v in diff.ravel()]).reshape(diff.shape))
    return None if bad.size == 0 else tuple(int(t) for t in bad[0])


def g_form(L: Algebra, gens, functionals=None) -> GForm:
    """The invariant form with g(x, .) = g_x on the extremal generators ``gens``.

    Built by closing the generators under brackets, using g_[x,e](z) = g_x([e, z]).
    """
    f = L.field
    d = L.dim
    gens = [f.reduce(np.asarray(v)) for v in gens]
    if functionals is None:
        functionals = [extremal_functional(L, v).values for v in gens]
    functionals = [f.reduce(np.asarray(v)) for v in functionals]
    span = Subspace(L)
    elems, funcs = [], []
    for v, gv in zip(gens, functionals):
        if v not in span:
            span = Subspace(L, np.vstack([span.basis, v]))
            elems.append(v)
            funcs.append(gv)
    frontier = list(range(len(elems)))
    while frontier and span.dim < d:
        nxt = []
        for e_i in frontier:
            e = elems[e_i]
            Ae = L.ad(e)
            for x, gx in zip(gens, functionals):
                v = L.bracket(x, e)
                if v in span:
                    continue
                span = Subspace(L, np.vstack([span.basis, v]))
                elems.append(v)
                funcs.append(f.matmul(gx, Ae))
                nxt.append(len(elems) - 1)
        frontier = nxt
    if span.dim < d:
        raise GFormError(f"generators span a subalgebra of dimension {span.dim} < {d}")
    P = np.array(elems)
    F = np.array(funcs)
    Pinv = _inverse(f, P)
    G = f.matmul(Pinv, F)
    if not f.equal(G, G.T):
        i, j = np.argwhere(np.array([[v != 0 for v in r] for r in f.reduce(G - G.T)]))[0]
        raise GFormError(f"g-form is not symmetric at {L.labels[i]}, {L.labels[j]}", (int(i), int(j)))
    w = invariance_witness(L, G)
    if w is not None:
        raise GFormError(f"g-form is not invariant at basis triple {w}", w)
    for x, gx in zip(gens, functionals):
        if not f.equal(f.matmul(x, G), gx):
            raise GFormError("g(x, .) differs from g_x on a generator")
        for y in gens:
            if f.is_zero(L.bracket(x, y)) and f(f.reduce(x @ G @ y)) != 0:
                raise GFormError("g(x, y) != 0 for commuting generators")
    return GForm(L, G, gens)


def _inverse(f, P):
    n = P.shape[0]
    R, piv = linalg.rref(f, np.hstack([f.reduce(P), f.eye(n)]))
    if piv[:n] != list(range(n)):
        raise GFormError("element family is singular")
    return R[:, n:]


# --- relations -------------------------------------------------------------

def _ratios(f):
    if not f.is_finite:
        return _Q_RATIOS
    return [(1, m) for m in range(f.p)] + [(0, 1)]


def relation(L: Algebra, x, y, gx: GFunctional | None = None) -> int:
    """Relation label in {-2, -1, 0, 1, 2} between extremal x and y."""
    f = L.field
    x = f.reduce(np.asarray(x))
    y = f.reduce(np.asarray(y))
    gx = extremal_functional(L, x) if gx is None else gx
    extremal_functional(L, y)
    if linalg.rank(f, np.vstack([x, y])) < 2:
        return E_M2
    if gx(y) != 0:
        return E_2
    if not f.is_zero(L.bracket(x, y)):
        return E_1
    for lam, mu in _ratios(f):
        if not in_E(L, f.reduce(x * f(lam) + y * f(mu))):
            return E_0
    return E_M1


# --- exp maps --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExpMap:
    algebra: Algebra
    x: np.ndarray
    lam: object
    matrix: np.ndarray

    def __call__(self, y):
        return self.algebra.field.matmul(self.matrix, y)


def exp_matrix(L: Algebra, x, g, lam):
    f = L.field
    lam = f(lam)
    A = L.ad(x)
    M = L.identity() + A * lam + np.outer(x, np.asarray(g)) * f.mul(lam, lam)
    return f.reduce(M)


def exp_map(L: Algebra, x, g: GFunctional, lam, verify=True) -> ExpMap:
    f = L.field
    x = f.reduce(np.asarray(x))
    if not f.equal(g.x, x) or g.algebra is not L:
        raise ExtremalError("g does not belong to x")
    M = exp_matrix(L, x, g.values, lam)
    if verify:
        w = homomorphism_witness(L, L, M)
        if w is not None:
            raise VerificationError(f"exp map is not an automorphism at {w}", w)
        inv = exp_matrix(L, x, g.values, f.neg(lam))
        if not f.equal(f.matmul(M, inv), L.identity()):
            raise VerificationError("exp(x, -lam) is not the inverse")
        mus = f.elements() if f.is_finite else [f(m) for m in (1, -1, 2)]
        for mu in mus:
            lhs = f.matmul(M, exp_matrix(L, x, g.values, mu))
            if not f.equal(lhs, exp_matrix(L, x, g.values, f.add(lam, mu))):
                raise VerificationError(f"one-parameter law fails at mu = {mu}", mu)
    return ExpMap(L, x, f(lam), M)


def exp_rescaling_law(L: Algebra, x, mu, lam, g_scaled=None) -> bool:
    """exp(mu x, lam) == exp(x, mu lam).  ``g_scaled`` overrides g_{mu x}."""
    f = L.field
    mu = f(mu)
    if mu == 0:
        raise ExtremalError("mu must be nonzero")
    x = f.reduce(np.asarray(x))
    gx = extremal_functional(L, x)
    y = f.scale(x, mu)
    gy = extremal_functional(L, y).values if g_scaled is None else f.reduce(np.asarray(g_scaled))
    return f.equal(exp_matrix(L, y, gy, lam), exp_matrix(L, x, gx.values, f.mul(mu, lam)))
