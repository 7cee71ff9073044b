"""Simply-laced root systems in simple-root coordinates (Bourbaki labelling)."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

Root = tuple  # integer coefficient tuple over the simple roots


class RootSystemError(ValueError):
    pass


@dataclass(frozen=True)
class DiagramSpec:
    family: str
    rank: int

    def __post_init__(self):
        f, n = self.family, self.rank
        ok = (f == "A" and n >= 1) or (f == "D" and n >= 4) or (f == "E" and n in (6, 7, 8))
        if not ok:
            raise RootSystemError(f"invalid diagram {f}{n}")

    @classmethod
    def parse(cls, text) -> "DiagramSpec":
        if isinstance(text, DiagramSpec):
            return text
        m = re.fullmatch(r"\s*([A-Za-z])_?(\d+)\s*", str(text))
        if not m:
            raise RootSystemError(f"cannot parse diagram {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    def __str__(self):
        return f"{self.family}{self.rank}"


def _edges(spec: DiagramSpec):
    n = spec.rank
    if spec.family == "A":
        return [(i, i + 1) for i in range(1, n)]
    if spec.family == "D":
        return [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
    # E_n: 1-3-4-5-...-n with 2 attached to 4
    return [(1, 3), (3, 4), (2, 4)] + [(i, i + 1) for i in range(4, n)]


def cartan_matrix(spec: DiagramSpec) -> np.ndarray:
    n = spec.rank
    c = 2 * np.eye(n, dtype=np.int64)
    for i, j in _edges(spec):
        c[i - 1, j - 1] = c[j - 1, i - 1] = -1
    return c


# angles are stored as rational multiples of pi
_ANGLE_OF_INNER = {2: Fraction(0), 1: Fraction(1, 3), 0: Fraction(1, 2),
                   -1: Fraction(2, 3), -2: Fraction(1)}


def angle_name(theta: Fraction) -> str:
    if theta == 0:
        return "0"
    if theta == 1:
        return "pi"
    return f"{'' if theta.numerator == 1 else theta.numerator}pi/{theta.denominator}"


@dataclass(frozen=True)
class DictionaryRow:
    angle: Fraction
    distance: int
    common_neighbours: str  # 'n/a' | '>1' | 'unique' | '0'
    relation: int           # expected E_i label
    neighbour_is_sum: bool = False


_TABLE = {
    Fraction(0): DictionaryRow(Fraction(0), 0, "n/a", -2),
    Fraction(1, 3): DictionaryRow(Fraction(1, 3), 1, "n/a", -1),
    Fraction(1, 2): DictionaryRow(Fraction(1, 2), 2, ">1", 0),
    Fraction(2, 3): DictionaryRow(Fraction(2, 3), 2, "unique", 1, neighbour_is_sum=True),
    Fraction(1): DictionaryRow(Fraction(1), 3, "0", 2),
}


class RootSystem:
    """Roots of a simply-laced diagram, canonically ordered.

    Positive roots come by height, then by decreasing coefficient tuple (so the
    simple roots appear as alpha_1, ..., alpha_n); negatives follow in the same
    order.
    """

    def __init__(self, spec):
        self.spec = DiagramSpec.parse(spec)
        self.n = self.spec.rank
        self.cartan = cartan_matrix(self.spec)
        pos = self._positive_roots()
        pos.sort(key=lambda r: (sum(r), tuple(-c for c in r)))
        self.positive = pos
        self.roots = pos + [tuple(-c for c in r) for r in pos]
        self.index = {r: i for i, r in enumerate(self.roots)}
        self.simple = [tuple(int(i == j) for j in range(self.n)) for i in range(self.n)]

    def _positive_roots(self):
        # height induction: beta + alpha_i is a root iff (beta|alpha_i) = -1
        simple = [tuple(int(i == j) for j in range(self.n)) for i in range(self.n)]
        found = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for b in layer:
                for i in range(self.n):
                    if self.inner(b, simple[i]) == -1:
                        c = list(b)
                        c[i] += 1
                        c = tuple(c)
                        if c not in found:
                            found.add(c)
                            nxt.append(c)
            layer = nxt
        return list(found)

    def __len__(self):
        return len(self.roots)

    def __repr__(self):
        return f"RootSystem({self.spec})"

    def is_root(self, r) -> bool:
        return tuple(r) in self.index

    def _check(self, *rs):
        for r in rs:
            if tuple(r) not in self.index:
                raise RootSystemError(f"{r} is not a root of {self.spec}")

    def inner(self, a, b) -> int:
        return int(np.asarray(a) @ self.cartan @ np.asarray(b))

    def checked_inner(self, a, b) -> int:
        self._check(a, b)
        return self.inner(a, b)

    @staticmethod
    def height(r) -> int:
        return sum(r)

    @staticmethod
    def neg(r):
        return tuple(-c for c in r)

    @staticmethod
    def add(a, b):
        return tuple(x + y for x, y in zip(a, b))

    def is_positive(self, r) -> bool:
        return sum(r) > 0

    def reflect(self, a, b):
        """s_a(b) = b - (a|b) a."""
        k = self.inner(a, b)
        return tuple(y - k * x for x, y in zip(a, b))

    def angle_class(self, a, b) -> Fraction:
        return _ANGLE_OF_INNER[self.checked_inner(a, b)]

    @cached_property
    def _highest(self):
        return max(self.positive, key=sum)

    def highest_root(self):
        return self._highest

    def root_set_J(self):
        th = self.highest_root()
        return {i + 1 for i in range(self.n) if self.inner(th, self.simple[i]) != 0}

    @cached_property
    def _pairs(self):
        table = {}
        for g in self.positive:
            if sum(g) == 1:
                continue
            for g1 in self.positive:
                if sum(g1) >= sum(g):
                    break
                g2 = tuple(x - y for x, y in zip(g, g1))
                if g2 in self.index and sum(g2) > 0:
                    table[g] = (g1, g2)
                    break
        return table

    def defining_pairs(self):
        """Non-simple positive root -> (g1, g2): g1 minimal in canonical order."""
        return dict(self._pairs)

    def dictionary(self, a, b) -> DictionaryRow:
        return _TABLE[self.angle_class(a, b)]

    def to_json(self):
        return {
            "type": str(self.spec),
            "cartan": self.cartan.tolist(),
            "roots": [list(r) for r in self.roots],
            "highest_root": list(self.highest_root()),
            "J": sorted(self.root_set_J()),
            "defining_pairs": [[list(g), list(p[0]), list(p[1])] for g, p in self._pairs.items()],
        }


def dictionary_table():
    return dict(_TABLE)
