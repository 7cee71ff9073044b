"""Exact scalar fields: prime fields F_p and the rationals Q.

Scalars are plain Python values (``int`` residues in ``[0, p)`` for F_p,
``fractions.Fraction`` for Q).  Vectors and matrices are numpy arrays whose
dtype is chosen by the field: ``int64`` for small primes, ``object`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from fractions import Fraction

import numpy as np

# int64 matmul stays exact while dim * p**2 < 2**63
_INT64_PRIME_LIMIT = 2**25


class FieldArithmeticError(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """A prime field (``p`` set) or the rationals (``p is None``)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(int(p))

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @classmethod
    def parse(cls, text) -> "Field":
        if isinstance(text, Field):
            return text
        s = str(text).strip()
        if s.upper() in ("Q", "QQ"):
            return cls(None)
        if s.upper().startswith("F"):
            s = s[1:]
        return cls(int(s))

    def __str__(self):
        return "Q" if self.p is None else f"F{self.p}"

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def order(self) -> int | None:
        return self.p

    @property
    def dtype(self):
        if self.p is not None and self.p < _INT64_PRIME_LIMIT:
            return np.int64
        return object

    @property
    def int_backed(self) -> bool:
        return self.dtype is np.int64

    # -- scalars ---------------------------------------------------------
    def __call__(self, v):
        if isinstance(v, np.ndarray):
            v = v.item()
        if self.p is None:
            return Fraction(v)
        if isinstance(v, Fraction):
            return self.div(v.numerator, v.denominator)
        return int(v) % self.p

    def add(self, a, b):
        return self(self(a) + self(b))

    def sub(self, a, b):
        return self(self(a) - self(b))

    def mul(self, a, b):
        return self(self(a) * self(b))

    def neg(self, a):
        return self(-self(a))

    def inv(self, a):
        a = self(a)
        if a == 0:
            raise FieldArithmeticError(f"division by zero in {self}")
        if self.p is None:
            return 1 / a
        return pow(a, -1, self.p)

    def div(self, a, b):
        if self.p is None:
            return self(a) * self.inv(b)
        b = int(b) % self.p
        if b == 0:
            raise FieldArithmeticError(f"division by zero in {self}")
        return (int(a) * pow(b, -1, self.p)) % self.p

    def elements(self):
        if self.p is None:
            raise ValueError("Q is infinite")
        return list(range(self.p))

    def nonzero_elements(self):
        return self.elements()[1:]

    # -- arrays ----------------------------------------------------------
    def reduce(self, arr):
        """Canonicalize an array of integers/fractions in place of a copy."""
        arr = np.asarray(arr)
        if self.p is None:
            out = np.empty(arr.shape, dtype=object)
            flat = arr.ravel()
            out.ravel()[:] = [Fraction(v) for v in flat]
            return out
        if self.int_backed:
            if arr.dtype == object:
                arr = np.array([self(v) for v in arr.ravel()], dtype=np.int64).reshape(arr.shape)
            return np.mod(arr.astype(np.int64, copy=False), self.p)
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = [self(v) for v in arr.ravel()]
        return out

    def array(self, values):
        return self.reduce(np.asarray(values, dtype=object) if self.p is None else values)

    def zeros(self, shape):
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0) if self.p is None else 0)
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self(1)
        return out

    def matmul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if self.p is None and a.size and b.size:
            sa, sb = self.scaled_integers(a), self.scaled_integers(b)
            if sa is not None and sb is not None:
                (ia, da), (ib, db) = sa, sb
                bound = int(np.abs(ia).max()) * int(np.abs(ib).max()) * max(a.shape[-1], 1)
                if bound < 2**62:
                    return self.from_scaled(ia @ ib, da * db)
        return self.reduce(a @ b)

    def scaled_integers(self, arr):
        """``(M, d)`` with ``arr == M / d``, ``M`` int64, for rational ``arr``; None on overflow."""
        arr = np.asarray(arr)
        if arr.dtype != object:
            return arr.astype(np.int64), 1
        flat = arr.ravel()
        den = 1
        for v in flat:
            q = getattr(v, "denominator", 1)
            if den % q:
                den = den * q // math.gcd(den, q)
        ints = [int(v * den) for v in flat] if den != 1 else [int(v) for v in flat]
        if ints and max(abs(v) for v in ints) >= 2**31:
            return None
        return np.array(ints, dtype=np.int64).reshape(arr.shape), den

    def from_scaled(self, m, den):
        """Field array ``m / den`` for an integer array ``m``."""
        if self.p is not None:
            return self.scale(self.reduce(m), self.inv(den))
        out = np.empty(m.shape, dtype=object)
        if den == 1:
            out.ravel()[:] = [Fraction(int(v)) for v in m.ravel()]
        else:
            out.ravel()[:] = [Fraction(int(v), den) for v in m.ravel()]
        return out

    def scale(self, arr, c):
        return self.reduce(np.asarray(arr) * self(c))

    def is_zero(self, arr) -> bool:
        arr = np.asarray(arr)
        if arr.dtype == object:
            return all(v == 0 for v in arr.ravel())
        return not arr.any()

    def equal(self, a, b) -> bool:
        return self.is_zero(self.reduce(np.asarray(a) - np.asarray(b)))

    def integral(self, arr):
        """int64 view of ``arr`` when every entry is an integer small enough, else None.

        Lets verification kernels run over Z for rational data with unit denominators.
        """
        arr = np.asarray(arr)
        if arr.dtype != object:
            return arr.astype(np.int64)
        if any(getattr(v, "denominator", 1) != 1 or abs(int(v)) > 2**20 for v in arr.ravel()):
            return None
        return np.array([int(v) for v in arr.ravel()], dtype=np.int64).reshape(arr.shape)
