"""Exact arithmetic in Q/Z and small exact integer linear algebra.

Everything here works on Python integers and :class:`fractions.Fraction`;
there is no floating point anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence, Tuple

IntMatrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True, order=True)
class RationalMod1:
    """An element of Q/Z stored as a reduced fraction with 0 <= p < q."""

    numerator: int
    denominator: int

    def __post_init__(self):
        p, q = self.numerator, self.denominator
        if q <= 0 or not 0 <= p < q or gcd(p, q) != 1:
            raise ValueError(f"non-canonical Q/Z element {p}/{q}; use reduce_mod1")

    @classmethod
    def of(cls, x) -> "RationalMod1":
        """Reduce an int, Fraction or RationalMod1 into canonical form."""
        if isinstance(x, RationalMod1):
            return x
        x = Fraction(x)
        return reduce_mod1(x.numerator, x.denominator)

    @classmethod
    def parse(cls, text: str) -> "RationalMod1":
        return cls.of(Fraction(text.strip()))

    def __add__(self, other):
        other = RationalMod1.of(other)
        return RationalMod1.of(self.fr() + other.fr())

    __radd__ = __add__

    def __neg__(self):
        return reduce_mod1(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-RationalMod1.of(other))

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return reduce_mod1(k * self.numerator, self.denominator)

    __rmul__ = __mul__

    def __bool__(self):
        return self.numerator != 0

    def fr(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"

    def __repr__(self):
        return f"RationalMod1({self.numerator}/{self.denominator})"


ZERO = RationalMod1(0, 1)


def reduce_mod1(p: int, q: int) -> RationalMod1:
    """Canonical representative of p/q in Q/Z."""
    if q == 0:
        raise ZeroDivisionError("reduce_mod1 with zero denominator")
    if q < 0:
        p, q = -p, -q
    p %= q
    g = gcd(p, q)
    return RationalMod1(p // g, q // g)


def fr(x: RationalMod1) -> Fraction:
    """The representative of x in [0, 1)."""
    return x.fr()


def ord_plus(x: RationalMod1) -> int:
    """Order of x in the additive group Q/Z."""
    return x.denominator


# ---------------------------------------------------------------------------
# 4x4 matrices
# ---------------------------------------------------------------------------

def _as_matrix(A) -> IntMatrix:
    M = tuple(tuple(int(a) for a in row) for row in A)
    if len(M) != 4 or any(len(r) != 4 for r in M):
        raise ValueError("expected a 4x4 matrix")
    return M


def _det(M) -> int:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = 0
    for c in range(n):
        if M[0][c] == 0:
            continue
        minor = [row[:c] + row[c + 1:] for row in M[1:]]
        total += (-1) ** c * M[0][c] * _det(minor)
    return total


def det4(A) -> int:
    """Exact determinant by cofactor expansion."""
    return _det(_as_matrix(A))


def adjugate4(A) -> IntMatrix:
    """Integer adjugate, so that A @ adj(A) = det(A) * I."""
    M = _as_matrix(A)
    adj = [[0] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            adj[j][i] = (-1) ** (i + j) * _det(minor)
    return tuple(tuple(r) for r in adj)


class SingularMatrixError(ValueError):
    """The exponent matrix is not invertible, so this is not a Delsarte surface."""


def inverse_rational(A) -> Tuple[Tuple[Fraction, ...], ...]:
    d = det4(A)
    if d == 0:
        raise SingularMatrixError("exponent matrix is singular")
    adj = adjugate4(A)
    return tuple(tuple(Fraction(a, d) for a in row) for row in adj)


def matmul(A, B):
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0])))
        for i in range(len(A))
    )


# ---------------------------------------------------------------------------
# Integer lattices
# ---------------------------------------------------------------------------

def echelon(rows: Sequence[Sequence[int]]) -> list:
    """Upper row-style Hermite normal form of the row lattice.

    Returns the nonzero rows only. Pivots are positive and every entry above a
    pivot is reduced into ``[0, pivot)``.
    """
    M = [list(r) for r in rows]
    ncols = len(M[0]) if M else 0
    out = []
    r0 = 0
    for c in range(ncols):
        active = [r for r in M[r0:] if r[c] != 0]
        rest = [r for r in M[r0:] if r[c] == 0]
        if not active:
            continue
        # Euclid on column c among the active rows
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[c]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[c] // piv[c]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[c] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        piv = active[0]
        if piv[c] < 0:
            piv = [-a for a in piv]
        M = M[:r0] + [piv] + rest
        r0 += 1
    M = [r for r in M[:r0]]
    # reduce above pivots
    pivots = []
    for r in M:
        pivots.append(next(c for c, a in enumerate(r) if a != 0))
    for i in range(len(M)):
        c = pivots[i]
        for k in range(i):
            q = M[k][c] // M[i][c]
            if q:
                M[k] = [a - q * b for a, b in zip(M[k], M[i])]
    out.extend(tuple(r) for r in M)
    return out


def hnf(basis: Sequence[Sequence[int]]) -> IntMatrix:
    """Lower-triangular canonical basis of a full-rank lattice in Z^3.

    Row i has its last nonzero entry on the diagonal; entries to the left of
    a diagonal entry are reduced into ``[0, diagonal)`` of their column.
    """
    rows = [tuple(int(a) for a in r) for r in basis]
    k = len(rows[0])
    rev = [r[::-1] for r in rows]
    E = echelon(rev)
    if len(E) != k or len(rows) < k:
        raise ArithmeticError("lattice basis is not of full rank")
    return tuple(r[::-1] for r in reversed(E))


def lattice_index(basis: Sequence[Sequence[int]]) -> int:
    """Index of the lattice in Z^k, i.e. |det(basis)| for a square basis."""
    H = hnf(basis)
    out = 1
    for i, row in enumerate(H):
        out *= row[i]
    return out


def kernel_mod(images: Sequence[Sequence[int]], modulus: int) -> IntMatrix:
    """Basis of {m in Z^k : sum_r m_r * images[r] == 0 (mod modulus)}.

    ``images[r]`` is the image of the r-th unit vector in (Z/modulus)^c.
    """
    k = len(images)
    c = len(images[0])
    rows = []
    for r, img in enumerate(images):
        rows.append(tuple(img) + tuple(int(r == s) for s in range(k)))
    for j in range(c):
        rows.append(tuple(modulus * int(j == s) for s in range(c)) + (0,) * k)
    E = echelon(rows)
    ker = [r[c:] for r in E if not any(r[:c])]
    return hnf(ker)


# ---------------------------------------------------------------------------
# Unit groups (Z/m)^*
# ---------------------------------------------------------------------------

def factorize(m: int) -> dict:
    out = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def units(m: int) -> list:
    """All t in [1, m] with gcd(t, m) = 1 (just [1] for m = 1)."""
    if m == 1:
        return [1]
    return [t for t in range(1, m) if gcd(t, m) == 1]


def _multiplicative_order(a: int, m: int) -> int:
    k, x = 1, a % m
    while x != 1:
        x = x * a % m
        k += 1
    return k


def unit_group_generators(m: int) -> list:
    """A generating set of (Z/m)^*, built prime power by prime power via CRT."""
    gens = []
    for p, e in sorted(factorize(m).items()):
        q = p ** e
        rest = m // q
        if p == 2:
            local = [] if e == 1 else ([q - 1] if e == 2 else [q - 1, 5])
        else:
            phi = q - q // p
            local = [next(g for g in range(2, q) if gcd(g, p) == 1
                          and _multiplicative_order(g, q) == phi)]
        for g in local:
            # g mod q, 1 mod rest
            if rest == 1:
                gens.append(g % m)
            else:
                inv = pow(rest, -1, q)
                gens.append((1 + rest * ((g - 1) * inv % q)) % m)
    return gens
