"""Degree-parametric Delsarte surfaces with only isolated ADE points.

Candidates have the shape ``X^(n-2) Mx + Y^(n-2) My + Z^(n-2) Mz + U^(n-2) Mu``
with quadratic monomials M. Exponents are affine forms ``c*n + k``, and every
predicate in the pipeline is decided on those forms, uniformly for n >= 6.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .character_group import DelsarteMatrix
from .exact_arith import det4

VARS = "XYZU"
PERMUTATIONS = tuple(itertools.permutations(range(4)))


@dataclass(frozen=True, order=True)
class SymbolicExponent:
    """The affine form ``n_coefficient * n + offset``."""

    n_coefficient: int
    offset: int

    def __call__(self, n: int) -> int:
        return self.n_coefficient * n + self.offset

    def __add__(self, other):
        other = _affine(other)
        return SymbolicExponent(self.n_coefficient + other.n_coefficient, self.offset + other.offset)

    def __neg__(self):
        return SymbolicExponent(-self.n_coefficient, -self.offset)

    def __sub__(self, other):
        return self + (-_affine(other))

    def is_zero(self) -> bool:
        return self.n_coefficient == 0 and self.offset == 0

    def positive(self, n_min: int = 6) -> bool:
        """Positive for every n >= n_min."""
        if self.n_coefficient < 0:
            return False
        return self(n_min) > 0

    def __str__(self):
        c, k = self.n_coefficient, self.offset
        if c == 0:
            return str(k)
        head = "n" if c == 1 else ("-n" if c == -1 else f"{c}n")
        if k == 0:
            return head
        return f"{head}{k:+d}"

    @classmethod
    def parse(cls, text: str) -> "SymbolicExponent":
        m = re.fullmatch(r"\s*(?:(-?\d*)n)?\s*([+-]?\s*\d+)?\s*", text)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"bad affine exponent {text!r}")
        c = m.group(1)
        if c is None:
            coef = 0
        elif c in ("", "+"):
            coef = 1
        elif c == "-":
            coef = -1
        else:
            coef = int(c)
        k = int(m.group(2).replace(" ", "")) if m.group(2) else 0
        return cls(coef, k)


def _affine(x) -> SymbolicExponent:
    if isinstance(x, SymbolicExponent):
        return x
    return SymbolicExponent(0, int(x))


N = SymbolicExponent(1, 0)
Row = Tuple[SymbolicExponent, SymbolicExponent, SymbolicExponent, SymbolicExponent]


def format_row(row: Row) -> str:
    return ",".join(str(e) for e in row)


def parse_row(text: str) -> Row:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"a monomial row needs four exponents: {text!r}")
    return tuple(SymbolicExponent.parse(p) for p in parts)


def monomial_str(row: Row) -> str:
    out = []
    for v, e in zip(VARS, row):
        if e.is_zero():
            continue
        if e == SymbolicExponent(0, 1):
            out.append(v)
        elif e.n_coefficient == 0 or e.offset == 0:
            out.append(f"{v}^{e}")
        else:
            out.append(f"{v}^({e})")
    return "".join(out) or "1"


@dataclass(frozen=True)
class SingularPoint:
    """A singular point, or a family of them, with at least two zero coordinates.

    Corners have three zero coordinates. Edge points have two nonzero
    coordinates ``eta`` and ``1`` at ``slots`` with ``eta**k = -1`` for each
    ``k`` in ``roots``.
    """

    kind: str
    zeros: FrozenSet[int]
    roots: Tuple[SymbolicExponent, ...] = ()
    eta_slot: Optional[int] = None

    def key(self):
        return (self.kind, tuple(sorted(self.zeros)), self.roots)

    def __eq__(self, other):
        return isinstance(other, SingularPoint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        coords = []
        nonzero = [i for i in range(4) if i not in self.zeros]
        eta = self.eta_slot if self.eta_slot is not None else nonzero[0]
        for i in range(4):
            if i in self.zeros:
                coords.append("0")
            elif self.kind == "edge" and i == eta:
                coords.append("".join(f"root({k})" for k in self.roots))
            else:
                coords.append("1")
        return "(" + ":".join(coords) + ")"

    @classmethod
    def parse(cls, text: str) -> "SingularPoint":
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"bad point {text!r}")
        coords = body[1:-1].split(":")
        if len(coords) != 4:
            raise ValueError(f"bad point {text!r}")
        zeros = frozenset(i for i, c in enumerate(coords) if c.strip() == "0")
        roots, eta = [], None
        for i, c in enumerate(coords):
            found = re.findall(r"root\(([^)]*)\)", c)
            if found:
                eta = i
                roots = [SymbolicExponent.parse(f) for f in found]
        if len(zeros) == 3:
            return cls("corner", zeros)
        if len(zeros) == 2 and roots:
            return cls("edge", zeros, tuple(sorted(roots)), eta)
        raise ValueError(f"bad point {text!r}")


@dataclass(frozen=True)
class SymbolicSurface:
    rows: Tuple[Row, Row, Row, Row]
    case_id: Optional[int] = field(default=None, compare=False)
    fixed_degree: Optional[int] = field(default=None, compare=False)

    @classmethod
    def from_strings(cls, rows: Sequence[str], case_id=None, fixed_degree=None):
        return cls(tuple(parse_row(r) for r in rows), case_id, fixed_degree)

    def exponent_rows(self, n: int) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(e(n) for e in row) for row in self.rows)

    def matrix(self, n: int) -> DelsarteMatrix:
        if self.fixed_degree is not None and n != self.fixed_degree:
            raise ValueError(f"this surface only exists in degree {self.fixed_degree}")
        return DelsarteMatrix(self.exponent_rows(n), n)

    def equation(self) -> str:
        return "+".join(monomial_str(r) for r in self.rows)

    def permuted(self, perm: Sequence[int]) -> "SymbolicSurface":
        """Relabel variables: new column j is old column perm[j]."""
        return SymbolicSurface(tuple(tuple(r[p] for p in perm) for r in self.rows), self.case_id,
                               self.fixed_degree)

    def canonical_form(self) -> Tuple[Row, ...]:
        return min(tuple(sorted(tuple(r[p] for p in perm) for r in self.rows)) for perm in PERMUTATIONS)

    def divisible_by_variable(self) -> bool:
        return any(all(not r[v].is_zero() for r in self.rows) for v in range(4))

    def quadratic_parts(self) -> Optional[Tuple[Tuple[int, ...], ...]]:
        """The monomials M_v with row v = v^(n-2) M_v, if the surface has that shape."""
        parts = [None] * 4
        for row in self.rows:
            for v in range(4):
                if row[v].n_coefficient == 1 and row[v].offset >= -2:
                    m = [e.offset if i != v else e.offset + 2 for i, e in enumerate(row)]
                    if any(row[i].n_coefficient for i in range(4) if i != v):
                        continue
                    if parts[v] is None:
                        parts[v] = tuple(m)
                    break
        return tuple(parts) if all(p is not None for p in parts) else None


# ---------------------------------------------------------------------------
# determinant as a polynomial in n
# ---------------------------------------------------------------------------

def symbolic_det(s: SymbolicSurface) -> Tuple[Fraction, ...]:
    """Coefficients (constant first) of det A(n), a polynomial of degree <= 4."""
    xs = list(range(6, 11))
    ys = [det4(s.exponent_rows(x)) for x in xs]
    coeffs = [Fraction(0)] * 5
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        denom = 1
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k in range(5):
            coeffs[k] += yi * basis[k] / denom
    return tuple(coeffs)


def det_nonzero_for_large_n(s: SymbolicSurface, n_min: int = 6) -> bool:
    coeffs = list(symbolic_det(s))
    if not any(coeffs):
        return False
    while coeffs[0] == 0:
        coeffs.pop(0)
    const = abs(int(coeffs[0]))
    # an integer root divides the constant term
    for r in range(n_min, const + 1):
        if const % r == 0 and sum(c * r**k for k, c in enumerate(coeffs)) == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# classification pipeline
# ---------------------------------------------------------------------------

def _quadratics():
    out = []
    for i in range(4):
        for j in range(i, 4):
            m = [0, 0, 0, 0]
            m[i] += 1
            m[j] += 1
            out.append(tuple(m))
    return out


QUADRATICS = tuple(_quadratics())


def slot_monomials(v: int) -> List[Tuple[int, ...]]:
    """The 7 quadratic M_v that do not rule out an ADE point at the v-corner."""
    return [m for m in QUADRATICS if not (m[v] == 0 and max(m) == 2)]


def row_for(v: int, m: Sequence[int]) -> Row:
    return tuple(SymbolicExponent(int(i == v), m[i] - 2 * int(i == v)) for i in range(4))


def generate_candidates() -> List[SymbolicSurface]:
    out = []
    for ms in itertools.product(*(slot_monomials(v) for v in range(4))):
        out.append(SymbolicSurface(tuple(row_for(v, m) for v, m in enumerate(ms))))
    return out


def dedupe_and_prune(candidates: Sequence[SymbolicSurface]) -> List[SymbolicSurface]:
    seen = {}
    for s in candidates:
        if s.divisible_by_variable():
            continue
        key = s.canonical_form()
        if key not in seen:
            seen[key] = SymbolicSurface(key)
    return [seen[k] for k in sorted(seen)]


def _corner_monomials(s: SymbolicSurface):
    parts = s.quadratic_parts()
    if parts is None:
        raise ValueError("surface is not of the form sum of v^(n-2) M_v")
    return parts


def non_ade_corners(s: SymbolicSurface) -> List[int]:
    """Corners v where M_v = ab (a, b != v) and the remaining variable c has M_c = ab."""
    parts = _corner_monomials(s)
    bad = []
    for v in range(4):
        m = parts[v]
        if m[v] == 0:
            others = [i for i in range(4) if i != v and m[i] == 0]
            (c,) = others
            if parts[c] == m:
                bad.append(v)
    return bad


def corner_ade_filter(surfaces: Sequence[SymbolicSurface]) -> List[SymbolicSurface]:
    return [s for s in surfaces if not non_ade_corners(s)]


def classify_surfaces():
    """Run the whole pipeline; returns (candidates, pruned, final)."""
    cands = generate_candidates()
    pruned = dedupe_and_prune(cands)
    final = corner_ade_filter(pruned)
    return cands, pruned, final


# ---------------------------------------------------------------------------
# singular points
# ---------------------------------------------------------------------------

class NonIsolatedSingularityError(ValueError):
    pass


ONE = SymbolicExponent(0, 1)


def singular_points(s: SymbolicSurface, n: Optional[int] = None) -> List[SingularPoint]:
    """Corner and edge singular points, decided on the affine exponents.

    ``n`` only selects the degree used to decide signs for fixed-degree
    surfaces; for the parametric catalog the result is uniform in n >= 6.
    """
    n_min = s.fixed_degree or (n if n is not None else 6)
    rows = s.rows

    def present(e: SymbolicExponent) -> bool:
        return e(n_min) > 0 if s.fixed_degree else e.positive(n_min)

    pts = []
    for v in range(4):
        on_surface = all(any(present(r[i]) for i in range(4) if i != v) for r in rows)
        if not on_surface:
            continue
        # smooth when some monomial is v^(deg-1) * w
        linear = any(
            sorted(present(r[i]) and (2 if r[i] != ONE else 1) for i in range(4) if i != v) == [0, 0, 1]
            for r in rows
        )
        if not linear:
            pts.append(SingularPoint("corner", frozenset(i for i in range(4) if i != v)))
    for a, b in itertools.combinations(range(4), 2):
        c, d = [i for i in range(4) if i not in (a, b)]
        if not all(present(r[a]) or present(r[b]) for r in rows):
            continue
        roots = []
        isolated = False
        for x, y in ((a, b), (b, a)):
            lin = [r for r in rows if r[x] == ONE and not present(r[y])]
            if not lin:
                continue
            isolated = True
            if len(lin) == 1:
                roots = None
                break
            if len(lin) > 2:
                raise NotImplementedError("more than two monomials linear in one variable")
            k = lin[0][c] - lin[1][c]
            if k.is_zero():
                roots = None
                break
            if not present(k):
                k = -k
            roots.append(k)
        if roots is None:
            continue
        if not isolated:
            raise NonIsolatedSingularityError(f"line {{x{a}=x{b}=0}} is singular on {s.equation()}")
        pts.append(SingularPoint("edge", frozenset((a, b)), tuple(sorted(roots)), c))
    return pts
