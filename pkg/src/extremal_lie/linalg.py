"""Exact Gaussian elimination over a :class:`~extremal_lie.fields.Field`.

Matrices are numpy arrays in the field's dtype.  The pivot in each column is
the first row (from the top of the unreduced block) with a nonzero entry, so
results are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Field

# Re-verify kernel/solve results by multiplication.  Cheap at desk scale.
SELF_CHECK = True


class VerificationError(AssertionError):
    """An exact identity that must hold failed; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _nonzero_mask(col):
    if col.dtype == object:
        return np.array([v != 0 for v in col], dtype=bool)
    return col != 0


def rref(field: Field, m):
    """Reduced row echelon form.  Returns ``(R, pivots)``; ``R`` has all rows."""
    a = field.reduce(np.array(m, copy=True))
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(_nonzero_mask(a[r:, c]))
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = field.inv(a[r, c])
        if inv != 1:
            a[r] = field.reduce(a[r] * inv)
        f = a[:, c].copy()
        f[r] = 0
        idx = np.flatnonzero(_nonzero_mask(f))
        if idx.size:
            a[idx] = field.reduce(a[idx] - f[idx, None] * a[r])
        pivots.append(c)
        r += 1
    return a, pivots


def rank(field: Field, m) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(field, m)[1])


def row_basis(field: Field, m):
    """Canonical basis (nonzero rref rows) of the row space, plus pivots."""
    m = np.asarray(m)
    if m.size == 0:
        cols = m.shape[1] if m.ndim == 2 else 0
        return field.zeros((0, cols)), []
    r, piv = rref(field, m)
    return r[: len(piv)], piv


def kernel(field: Field, m):
    """Basis of the null space as the columns of a ``cols x k`` matrix."""
    m = np.asarray(m)
    rows, cols = m.shape
    if rows == 0:
        return field.eye(cols)
    r, piv = rref(field, m)
    free = [c for c in range(cols) if c not in set(piv)]
    k = field.zeros((cols, len(free)))
    for j, f in enumerate(free):
        k[f, j] = field(1)
        for i, pc in enumerate(piv):
            k[pc, j] = field.neg(r[i, f])
    if SELF_CHECK and free:
        if not field.is_zero(field.matmul(m, k)):
            raise VerificationError("kernel self-check failed")
    return k


@dataclass
class Solution:
    x: np.ndarray
    nullity: int

    @property
    def unique(self) -> bool:
        return self.nullity == 0


def solve(field: Field, m, b):
    """Solve ``m x = b``.  Returns a :class:`Solution` or ``None`` if inconsistent."""
    m = np.asarray(m)
    rows, cols = m.shape
    b = field.reduce(np.asarray(b).reshape(rows, 1))
    aug = np.hstack([field.reduce(m), b]) if rows else field.zeros((0, cols + 1))
    if rows == 0:
        return Solution(field.zeros(cols), cols)
    r, piv = rref(field, aug)
    if piv and piv[-1] == cols:
        return None
    x = field.zeros(cols)
    for i, pc in enumerate(piv):
        x[pc] = r[i, cols]
    if SELF_CHECK and not field.equal(field.matmul(m, x), b[:, 0]):
        raise VerificationError("solve self-check failed")
    return Solution(x, cols - len(piv))


def reduce_vector(field: Field, basis, pivots, v):
    """Residual of ``v`` after eliminating the pivot coordinates of an rref basis."""
    v = field.reduce(np.array(v, copy=True))
    for i, pc in enumerate(pivots):
        c = v[pc]
        if c != 0:
            v = field.reduce(v - c * basis[i])
    return v


def in_span(field: Field, basis, pivots, v) -> bool:
    return field.is_zero(reduce_vector(field, basis, pivots, v))


def same_span(field: Field, a, b) -> bool:
    ra, _ = row_basis(field, a)
    rb, _ = row_basis(field, b)
    return ra.shape == rb.shape and field.equal(ra, rb)
