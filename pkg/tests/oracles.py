"""Independent reference constructions used by the tests.

Nothing here calls the package's structure-constant code: root elements are
explicit integer matrices and constants come from matrix commutators.
"""
from __future__ import annotations

import itertools

import numpy as np


def epsilon_coords(family, n, root):
    """Root given in simple-root coordinates, as a vector in the standard epsilon basis."""
    if family == "A":
        v = np.zeros(n + 1, dtype=np.int64)
        for i, c in enumerate(root):
            v[i] += c
            v[i + 1] -= c
        return v
    if family == "D":
        v = np.zeros(n, dtype=np.int64)
        for i, c in enumerate(root[:-1]):
            v[i] += c
            v[i + 1] -= c
        v[n - 2] += root[-1]
        v[n - 1] += root[-1]
        return v
    raise ValueError(family)


def _unit(m, i, j):
    E = np.zeros((m, m), dtype=np.int64)
    E[i, j] = 1
    return E


def root_matrix(family, n, root):
    """A nonzero matrix spanning the root space of ``root`` in sl_{n+1} or so_{2n}."""
    e = epsilon_coords(family, n, root)
    if family == "A":
        i, j = int(np.flatnonzero(e == 1)[0]), int(np.flatnonzero(e == -1)[0])
        return _unit(n + 1, i, j)
    m = 2 * n
    bar = lambda k: m - 1 - k
    pos, neg = np.flatnonzero(e == 1).tolist(), np.flatnonzero(e == -1).tolist()
    if len(pos) == 1 and len(neg) == 1:                  # e_i - e_j
        i, j = pos[0], neg[0]
        return _unit(m, i, j) - _unit(m, bar(j), bar(i))
    if len(pos) == 2:                                    # e_i + e_j
        i, j = pos
        return _unit(m, i, bar(j)) - _unit(m, j, bar(i))
    i, j = neg                                           # -e_i - e_j
    return _unit(m, bar(j), i) - _unit(m, bar(i), j)


def cartan_diagonal(family, n, t):
    """Diagonal Cartan element with parameters t (one per epsilon)."""
    if family == "A":
        return np.diag(np.asarray(t, dtype=np.int64))
    return np.diag(np.concatenate([t, -np.asarray(t)[::-1]]).astype(np.int64))


def in_so(X):
    m = X.shape[0]
    J = np.fliplr(np.eye(m, dtype=np.int64))
    return not (X.T @ J + J @ X).any()


def _coefficient(V, W):
    """c with V = c W (integers), or None."""
    k = np.flatnonzero(W)
    c = V.flat[k[0]] // W.flat[k[0]] if W.flat[k[0]] else 0
    if c * W.flat[k[0]] != V.flat[k[0]] or (V != c * W).any():
        return None
    return int(c)


def matrix_structure_constants(family, n, roots, pairs):
    """Constants A[a, b] of root matrices normalized so A = 1 on defining pairs.

    Positive roots are processed by height; x_g is rescaled by the coefficient
    c of [x_g1, x_g2] on x_g and x_-g by 1/c (c = +-1 for these realizations),
    then every constant is read off a commutator.
    """
    neg = lambda r: tuple(-c for c in r)
    X = {r: root_matrix(family, n, r) for r in roots}
    for g in sorted(pairs, key=sum):
        g1, g2 = pairs[g]
        c = _coefficient(X[g1] @ X[g2] - X[g2] @ X[g1], X[g])
        assert c in (1, -1)
        X[g] = c * X[g]
        X[neg(g)] = c * X[neg(g)]
    A = {}
    rootset = set(roots)
    for a, b in itertools.product(roots, roots):
        s = tuple(x + y for x, y in zip(a, b))
        if not any(s):
            continue
        C = X[a] @ X[b] - X[b] @ X[a]
        if s in rootset:
            A[(a, b)] = _coefficient(C, X[s])
        else:
            assert not C.any()
    return A, X


def heisenberg(field):
    """Basis a, b, c with [a, b] = c central."""
    from extremal_lie.algebra import Algebra
    return Algebra(field, ["a", "b", "c"], {(0, 1): {2: 1}})


def abelian(field, n=2):
    from extremal_lie.algebra import Algebra
    return Algebra(field, [f"e{i}" for i in range(n)], {})


def rank_one_nilpotents(n, p):
    """Projective classes of v w^T with w^T v = 0 in gl_{n+1}(F_p), one matrix per class."""
    m = n + 1
    vecs = [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=m)
            if any(v) and v[next(i for i in range(m) if v[i])] == 1]
    out = {}
    for v in vecs:
        for w in vecs:
            if int(w @ v) % p:
                continue
            M = np.outer(v, w) % p
            out[M.tobytes()] = M
    return list(out.values())


def chevalley_coordinates(X, roots, simple, field, M):
    """Coordinates of matrix M in the basis x_a (all roots), h_i = [x_ai, x_-ai]."""
    from extremal_lie import linalg
    neg = lambda r: tuple(-c for c in r)
    basis = [X[r] for r in roots] + [X[a] @ X[neg(a)] - X[neg(a)] @ X[a] for a in simple]
    B = field.reduce(np.stack([b.ravel() for b in basis], axis=1))
    sol = linalg.solve(field, B, field.reduce(M.ravel()))
    assert sol is not None and sol.unique
    return sol.x


def _solvable_mod_p(M, b, p):
    """Whether M g = b has a solution mod p (plain Gaussian elimination)."""
    A = np.concatenate([M, b[:, None]], axis=1) % p
    weights = p ** np.arange(A.shape[1], dtype=np.int64 if p ** A.shape[1] < 2**62 else object)
    _, first = np.unique(A @ weights, return_index=True)
    A = A[first]
    r = 0
    for c in range(M.shape[1]):
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        A = (A - np.outer(col, A[r])) % p
        r += 1
        if r == A.shape[0]:
            break
    return not A[r:, -1].any()


def dense_extremal_points(C, p):
    """Projective points x (first nonzero coordinate 1) that are extremal and not sandwiches.

    ``C[i, j, k]`` is the coefficient of b_k in [b_i, b_j].  Extremal means
    [x,[x,y]] = 2 g(y) x and [x,[y,[x,z]]] = g([y,z]) x - g(z)[x,y] - g(y)[x,z]
    for some linear g and all y, z; a sandwich admits g = 0.
    """
    C = np.asarray(C, dtype=np.int64) % p
    d = C.shape[0]
    X = np.array(list(itertools.product(range(p), repeat=d)), dtype=np.int64)
    lead = np.argmax(X != 0, axis=1)
    X = X[X[np.arange(len(X)), lead] == 1]
    # cheap necessary condition first: every [x,[x,b]] is a multiple of x
    keep = []
    for s in range(0, len(X), 2048):
        Y = X[s:s + 2048]
        A2 = np.einsum("nkj,nji->nki", *(2 * [np.einsum("ni,ijk->nkj", Y, C) % p])) % p
        top = A2[np.arange(len(Y)), np.argmax(Y != 0, axis=1)]
        keep.append(Y[((A2 - Y[:, :, None] * top[:, None, :]) % p == 0).all(axis=(1, 2))])
    out = []
    for x in np.concatenate(keep):
        nz = np.flatnonzero(x)
        ad = np.einsum("i,ijk->kj", x, C) % p          # ad[k, j]: b_k coefficient of [x, b_j]
        A2 = ad @ ad % p
        if p == 2:
            if A2.any():
                continue
        else:
            g = A2[nz[0]] * pow(2, -1, p) % p
            if ((A2 - 2 * np.outer(x, g)) % p).any() or not g.any():
                continue
        ady = np.transpose(C, (0, 2, 1))               # ady[y, k, j]
        T = np.einsum("ak,ykm,mz->yza", ad, ady, ad) % p  # [x,[y,[x,z]]]
        if p != 2:
            rhs = (np.einsum("yzm,m,a->yza", C, g, x) - np.einsum("z,ay->yza", g, ad)
                   - np.einsum("y,az->yza", g, ad)) % p
            if not (T == rhs).all():
                continue
        else:
            if not T.any():
                continue                               # g = 0 works: sandwich
            eye = np.eye(d, dtype=np.int64)
            M = (np.einsum("yzm,a->yzam", C, x) - np.einsum("zm,ay->yzam", eye, ad)
                 - np.einsum("ym,az->yzam", eye, ad)) % p
            if not _solvable_mod_p(M.reshape(-1, d), T.reshape(-1), p):
                continue
        out.append(tuple(int(v) for v in x))
    return set(out)
