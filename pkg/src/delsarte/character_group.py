"""The character group L of a Delsarte surface and its Lefschetz number.

For an exponent matrix ``A`` with rows the exponent vectors of the four
monomials, the generators are ``v = e1 A^-1``, ``w = e2 A^-1`` and
``u = e3 A^-1`` with ``e_r = (unit_r) - (0, 0, 0, 1)``, read in (Q/Z)^4.

Internally every element of L is stored as four integer numerators over the
common denominator ``D = |det A|``; the public :class:`CharacterVector` is
only built at the edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exact_arith import (
    RationalMod1,
    SingularMatrixError,
    adjugate4,
    det4,
    kernel_mod,
    lattice_index,
    reduce_mod1,
    unit_group_generators,
    units,
)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class CharacterVector:
    """A point of V: four elements of Q/Z summing to zero."""

    coords: Tuple[RationalMod1, RationalMod1, RationalMod1, RationalMod1]

    def __post_init__(self):
        coords = tuple(RationalMod1.of(c) for c in self.coords)
        if len(coords) != 4:
            raise ValueError("a character vector has four coordinates")
        if sum(coords, RationalMod1(0, 1)):
            raise ValueError(f"coordinates {coords} do not sum to 0 in Q/Z")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *xs) -> "CharacterVector":
        if len(xs) == 1:
            xs = tuple(xs[0])
        return cls(tuple(RationalMod1.of(x) for x in xs))

    @classmethod
    def parse(cls, text: str) -> "CharacterVector":
        return cls.of(*(RationalMod1.parse(p) for p in text.strip().strip("()").split(",")))

    @classmethod
    def from_numerators(cls, nums: Sequence[int], denom: int) -> "CharacterVector":
        return cls(tuple(reduce_mod1(int(a), denom) for a in nums))

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other: "CharacterVector") -> "CharacterVector":
        return CharacterVector(tuple(a + b for a, b in zip(self, other)))

    def __neg__(self) -> "CharacterVector":
        return CharacterVector(tuple(-a for a in self))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, t: int) -> "CharacterVector":
        return CharacterVector(tuple(a * t for a in self))

    __rmul__ = __mul__

    @property
    def order(self) -> int:
        out = 1
        for a in self:
            out = _lcm(out, a.denominator)
        return out

    def numerators(self, denom: Optional[int] = None) -> Tuple[int, ...]:
        """Numerators over ``denom`` (default: the order of the vector)."""
        d = self.order if denom is None else denom
        return tuple(a.numerator * (d // a.denominator) for a in self)

    def fr_sum(self) -> Fraction:
        return sum((a.fr() for a in self), Fraction(0))

    def has_zero(self) -> bool:
        return any(a.numerator == 0 for a in self)

    def permuted(self, perm: Sequence[int]) -> "CharacterVector":
        return CharacterVector(tuple(self.coords[p] for p in perm))

    def __str__(self):
        return ",".join(str(a) for a in self)

    def __repr__(self):
        return f"CharacterVector({self})"


@dataclass(frozen=True)
class DelsarteMatrix:
    """Exponent matrix of a four-monomial surface of degree ``degree``."""

    matrix: Tuple[Tuple[int, ...], ...]
    degree: int

    def __post_init__(self):
        M = tuple(tuple(int(a) for a in row) for row in self.matrix)
        object.__setattr__(self, "matrix", M)
        if len(M) != 4 or any(len(r) != 4 for r in M):
            raise ValueError("exponent matrix must be 4x4")
        if any(a < 0 for r in M for a in r):
            raise ValueError("exponents must be non-negative")
        if any(sum(r) != self.degree for r in M):
            raise ValueError(f"every monomial must have degree {self.degree}")
        if det4(M) == 0:
            raise SingularMatrixError("exponent matrix is singular; not a Delsarte surface")

    @classmethod
    def from_rows(cls, rows) -> "DelsarteMatrix":
        rows = tuple(tuple(r) for r in rows)
        return cls(rows, sum(rows[0]))

    def permute_columns(self, perm: Sequence[int]) -> "DelsarteMatrix":
        return DelsarteMatrix(tuple(tuple(r[p] for p in perm) for r in self.matrix), self.degree)


def _generator_numerators(A: DelsarteMatrix) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
    """(D, B) with generator r equal to B[r] / D in (Q/Z)^4."""
    d = det4(A.matrix)
    D = abs(d)
    sign = 1 if d > 0 else -1
    adj = adjugate4(A.matrix)
    B = tuple(
        tuple(sign * (adj[r][c] - adj[3][c]) % D for c in range(4)) for r in range(3)
    )
    return D, B


def generators(A: DelsarteMatrix) -> Tuple[CharacterVector, CharacterVector, CharacterVector]:
    D, B = _generator_numerators(A)
    return tuple(CharacterVector.from_numerators(b, D) for b in B)


def kernel_lattice(A: DelsarteMatrix):
    """Lattice of (i, j, k) with i v + j w + k u = 0, in lower-triangular HNF."""
    D, B = _generator_numerators(A)
    return kernel_mod(B, D)


@dataclass
class CharacterGroup:
    """The finite module L, with coset representatives of Z^3 / kernel."""

    matrix: DelsarteMatrix
    denom: int
    numerators: Tuple[Tuple[int, ...], ...]
    kernel: Tuple[Tuple[int, ...], ...]
    cardinality: int
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, A: DelsarteMatrix) -> "CharacterGroup":
        D, B = _generator_numerators(A)
        K = kernel_mod(B, D)
        return cls(A, D, B, K, lattice_index(K))

    @property
    def generators(self):
        return tuple(CharacterVector.from_numerators(b, self.denom) for b in self.numerators)

    @property
    def box(self) -> Tuple[int, int, int]:
        return tuple(self.kernel[i][i] for i in range(3))

    @property
    def exponent(self) -> int:
        out = 1
        for b in self.numerators:
            out = _lcm(out, self.denom // gcd(self.denom, *b))
        return out

    def reps(self) -> np.ndarray:
        """Coset representatives (i, j, k) in lexicographic order, shape (#L, 3)."""
        if "reps" not in self._cache:
            a, b, c = self.box
            grid = np.indices((a, b, c)).reshape(3, -1).T
            self._cache["reps"] = grid.astype(np.int64)
        return self._cache["reps"]

    def element_array(self) -> np.ndarray:
        """All elements as numerators over ``denom``, shape (#L, 4)."""
        if "elements" not in self._cache:
            D = self.denom
            if D >= 3 * 10**9:
                raise OverflowError("denominator too large for int64 enumeration")
            B = np.array(self.numerators, dtype=np.int64)
            R = self.reps()
            X = np.zeros((len(R), 4), dtype=np.int64)
            for r in range(3):
                X = (X + (R[:, r:r + 1] * B[r]) % D) % D
            self._cache["elements"] = X
        return self._cache["elements"]

    def reduce_coords(self, ijk: np.ndarray) -> np.ndarray:
        """Index of the coset of each row of ``ijk`` in the enumeration order."""
        H = np.array(self.kernel, dtype=np.int64)
        m = ijk.astype(np.int64).copy()
        for r in (2, 1, 0):
            q = np.floor_divide(m[:, r], H[r, r])
            m -= q[:, None] * H[r]
        a, b, c = self.box
        return (m[:, 0] * b + m[:, 1]) * c + m[:, 2]

    def __len__(self):
        return self.cardinality

    def __iter__(self) -> Iterator[CharacterVector]:
        D = self.denom
        for row in self.element_array():
            yield CharacterVector.from_numerators(row, D)


def build_group(A: DelsarteMatrix) -> CharacterGroup:
    return CharacterGroup.build(A)


def enumerate_group(G: CharacterGroup) -> list:
    """All elements of L, in lexicographic order of the HNF coset coordinates."""
    out = list(G)
    if len(set(out)) != G.cardinality:
        raise AssertionError("duplicate elements in coset enumeration")
    return out


def in_L0(x: CharacterVector) -> bool:
    return x.has_zero()


def in_lambda(x: CharacterVector) -> bool:
    """Whether some t preserving all coordinate orders has fractional sum != 2.

    Order preservation for every coordinate is the same as ``gcd(t, ord x) = 1``,
    so only units modulo the order are tried.
    """
    if x.has_zero():
        raise ValueError(f"{x} has a zero coordinate; Lambda is defined on L1 only")
    d = x.order
    nums = x.numerators(d)
    for t in units(d):
        if sum(t * a % d for a in nums) != 2 * d:
            return True
    return False


def _lambda_mask(G: CharacterGroup) -> Tuple[np.ndarray, np.ndarray]:
    """(L1 mask, Lambda mask) over the enumeration of G.

    Lambda is a union of orbits of the unit group acting on L1, so the orbits
    are found as connected components of the graph x -> g x for generators g
    of (Z/exponent)^*, and an orbit is in Lambda when any member has a
    fractional sum different from 2.
    """
    X = G.element_array()
    D = G.denom
    L1 = (X != 0).all(axis=1)
    witness = L1 & (X.sum(axis=1) != 2 * D)
    gens = unit_group_generators(G.exponent)
    N = len(X)
    if not gens:
        return L1, witness
    R = G.reps()
    src = np.arange(N)
    rows, cols = [], []
    for g in gens:
        rows.append(src)
        cols.append(G.reduce_coords(R * g))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
    _, labels = connected_components(graph, directed=True, connection="weak")
    hit = np.zeros(labels.max() + 1, dtype=bool)
    hit[labels[witness]] = True
    return L1, L1 & hit[labels]


def lefschetz(A: DelsarteMatrix, group: Optional[CharacterGroup] = None) -> int:
    G = group or CharacterGroup.build(A)
    _, lam = _lambda_mask(G)
    return int(lam.sum())


def betti2(n: int) -> int:
    return n**3 - 4 * n**2 + 6 * n - 2


def hodge11(n: int) -> int:
    """h^{1,1} = b2 - 2 p_g of a degree-n surface with only ADE points."""
    num = 2 * n**3 - 6 * n**2 + 7 * n
    if num % 3:
        raise ArithmeticError(f"h11 not integral at n={n}")
    return num // 3


def picard(A: DelsarteMatrix, group: Optional[CharacterGroup] = None) -> int:
    return betti2(A.degree) - lefschetz(A, group)


def is_maximal(A: DelsarteMatrix, group: Optional[CharacterGroup] = None) -> bool:
    return picard(A, group) == hodge11(A.degree)
