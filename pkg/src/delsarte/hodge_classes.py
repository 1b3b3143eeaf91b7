"""Decomposable, regular and exceptional elements of L1 outside Lambda.

The structural count ``#Lambda = #L - #(L0 u D) - #I - #R`` is computed here
from template matching and the exceptional set alone, without touching the
unit-orbit search in :mod:`delsarte.character_group`, so the two counts can be
checked against each other.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .character_group import CharacterGroup, CharacterVector, DelsarteMatrix, _lambda_mask, in_lambda
from .exact_arith import RationalMod1, kernel_mod, lattice_index

EXCEPTIONAL_COUNT = 22080
DEFAULT_MAX_ORDER = 180

PERMUTATIONS = tuple(itertools.permutations(range(4)))

# slot k of a template is c*a + num/den
FAMILIES: Dict[str, Tuple[Tuple[int, int, int], ...]] = {
    "F1": ((1, 0, 1), (0, 1, 2), (1, 1, 2), (-2, 0, 1)),
    "F2": ((1, 0, 1), (1, 1, 2), (2, 1, 2), (-4, 0, 1)),
    "F3": ((1, 0, 1), (1, 1, 3), (1, 2, 3), (-3, 0, 1)),
}


class HodgeClassLabel(enum.Enum):
    IN_LAMBDA = "lambda"
    IN_L0 = "L0"
    DECOMPOSABLE = "D"
    REGULAR = "R"
    EXCEPTIONAL = "I"


class UnclassifiableError(RuntimeError):
    """An element of L1 outside Lambda that is neither D, R nor exceptional."""


@dataclass(frozen=True)
class RegularFamily:
    family: str
    permutation: Tuple[int, int, int, int]
    a: RationalMod1

    def instantiate(self) -> CharacterVector:
        coords = [None] * 4
        for k, (c, num, den) in enumerate(FAMILIES[self.family]):
            coords[self.permutation[k]] = self.a * c + RationalMod1.of(Fraction(num, den))
        return CharacterVector(tuple(coords))

    def __str__(self):
        return f"{self.family}(a={self.a}, perm={self.permutation})"


def is_decomposable(x: CharacterVector) -> bool:
    return any(not (x[0] + x[j]) for j in (1, 2, 3))


def is_regular(x: CharacterVector) -> Optional[RegularFamily]:
    """First matching (family, permutation, a), or None.

    Decomposable vectors and vectors with a zero coordinate never match.
    """
    if x.has_zero() or is_decomposable(x):
        return None
    for fam, template in FAMILIES.items():
        for perm in PERMUTATIONS:
            a = x[perm[0]]
            if all(
                x[perm[k]] == a * c + RationalMod1.of(Fraction(num, den))
                for k, (c, num, den) in enumerate(template)
            ):
                return RegularFamily(fam, perm, a)
    return None


# ---------------------------------------------------------------------------
# vectorized predicates on numerator arrays over a common denominator d
# ---------------------------------------------------------------------------

def decomposable_mask(X: np.ndarray, d: int) -> np.ndarray:
    return ((X[:, 0] + X[:, 1]) % d == 0) | ((X[:, 0] + X[:, 2]) % d == 0) | (
        (X[:, 0] + X[:, 3]) % d == 0
    )


def template_mask(X: np.ndarray, d: int) -> np.ndarray:
    """Rows that are a permutation of one of the three regular templates."""
    hit = np.zeros(len(X), dtype=bool)
    for template in FAMILIES.values():
        if any(d % den for _, _, den in template):
            continue
        for perm in PERMUTATIONS:
            a = X[:, perm[0]]
            ok = np.ones(len(X), dtype=bool)
            for k in (1, 2, 3):
                c, num, den = template[k]
                ok &= X[:, perm[k]] == (c * a + num * (d // den)) % d
            hit |= ok
    return hit


def _sorted_candidates(d: int) -> np.ndarray:
    """Sorted 4-tuples in [1, d) with sum exactly 2d and exact order d."""
    chunks = []
    for a1 in range(1, d):
        if 4 * a1 > 2 * d:
            break
        rng = np.arange(a1, d, dtype=np.int64)
        a2, a3 = np.meshgrid(rng, rng, indexing="ij")
        a2, a3 = a2.ravel(), a3.ravel()
        a4 = 2 * d - a1 - a2 - a3
        keep = (a3 >= a2) & (a4 >= a3) & (a4 < d)
        if keep.any():
            chunks.append(np.stack([np.full(int(keep.sum()), a1), a2[keep], a3[keep], a4[keep]], 1))
    if not chunks:
        return np.zeros((0, 4), dtype=np.int64)
    X = np.concatenate(chunks)
    g = np.gcd.reduce(np.concatenate([X, np.full((len(X), 1), d)], axis=1), axis=1)
    return X[g == 1]


def _exceptional_of_order(d: int) -> np.ndarray:
    X = _sorted_candidates(d)
    # t = 1 is built into the candidates and t = -1 maps a sum of 2 to 4 - 2
    for t in range(2, d - 1):
        if not len(X):
            break
        if gcd(t, d) == 1:
            X = X[(t * X % d).sum(axis=1) == 2 * d]
    X = X[~decomposable_mask(X, d)]
    X = X[~template_mask(X, d)]
    if not len(X):
        return X
    return np.unique(np.concatenate([X[:, p] for p in PERMUTATIONS]), axis=0)


@lru_cache(maxsize=4)
def _exceptional_table(max_order: int) -> Tuple[Tuple[int, np.ndarray], ...]:
    return tuple((d, X) for d in range(2, max_order + 1) for X in [_exceptional_of_order(d)] if len(X))


def _key(d, X, base):
    return ((d * base + X[:, 0]) * base + X[:, 1]) * base + X[:, 2]


@lru_cache(maxsize=4)
def exceptional_keys(max_order: int = DEFAULT_MAX_ORDER) -> np.ndarray:
    base = max_order + 1
    keys = [_key(d, X, base) for d, X in _exceptional_table(max_order)]
    out = np.sort(np.concatenate(keys)) if keys else np.zeros(0, dtype=np.int64)
    if max_order == DEFAULT_MAX_ORDER and len(out) != EXCEPTIONAL_COUNT:
        raise AssertionError(f"exceptional search found {len(out)} vectors, expected {EXCEPTIONAL_COUNT}")
    return out


def build_exceptional_set(max_order: int = DEFAULT_MAX_ORDER) -> frozenset:
    """All exceptional vectors of order at most ``max_order``."""
    if max_order < 2:
        raise ValueError("max_order must be at least 2")
    exceptional_keys(max_order)  # count guard
    return frozenset(
        CharacterVector.from_numerators(row, d) for d, X in _exceptional_table(max_order) for row in X
    )


def sorted_exceptional(max_order: int = DEFAULT_MAX_ORDER) -> list:
    """Exceptional vectors in a canonical order (order, then numerators)."""
    exceptional_keys(max_order)
    return [
        CharacterVector.from_numerators(row, d) for d, X in _exceptional_table(max_order) for row in X
    ]


def format_exceptional(vectors: Iterable[CharacterVector]) -> str:
    return "".join(f"{x}\n" for x in vectors)


def parse_exceptional(text: str) -> list:
    return [CharacterVector.parse(line) for line in text.splitlines() if line.strip()]


def exceptional_mask(X: np.ndarray, D: int, max_order: int = DEFAULT_MAX_ORDER) -> np.ndarray:
    """Rows of the numerator array (over D) that are exceptional vectors."""
    g = np.gcd.reduce(np.concatenate([X, np.full((len(X), 1), D, dtype=np.int64)], axis=1), axis=1)
    order = D // g
    small = order <= max_order
    out = np.zeros(len(X), dtype=bool)
    if not small.any():
        return out
    Y = X[small] // g[small, None]
    keys = _key(order[small], Y, max_order + 1)
    out[small] = np.isin(keys, exceptional_keys(max_order))
    return out


def is_exceptional(x: CharacterVector, max_order: int = DEFAULT_MAX_ORDER) -> bool:
    d = x.order
    if d > max_order:
        return False
    X = np.array([x.numerators(d)], dtype=np.int64)
    return bool(exceptional_mask(X, d, max_order)[0])


def classify(x: CharacterVector, max_order: int = DEFAULT_MAX_ORDER) -> HodgeClassLabel:
    if x.has_zero():
        return HodgeClassLabel.IN_L0
    if in_lambda(x):
        return HodgeClassLabel.IN_LAMBDA
    if is_decomposable(x):
        return HodgeClassLabel.DECOMPOSABLE
    if is_regular(x):
        return HodgeClassLabel.REGULAR
    if is_exceptional(x, max_order):
        return HodgeClassLabel.EXCEPTIONAL
    raise UnclassifiableError(f"{x} is outside Lambda but neither D, R nor exceptional")


# ---------------------------------------------------------------------------
# counts over a whole group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Census:
    L: int
    L0: int
    L0_or_D: int
    D: int
    R: int
    I: int
    structural_lambda: int


def census(A: DelsarteMatrix, group: Optional[CharacterGroup] = None,
           max_order: int = DEFAULT_MAX_ORDER) -> Census:
    G = group or CharacterGroup.build(A)
    X = G.element_array()
    D = G.denom
    L0 = (X == 0).any(axis=1)
    dec = ~L0 & decomposable_mask(X, D)
    reg = ~L0 & ~dec & template_mask(X, D)
    exc = ~L0 & ~dec & ~reg & exceptional_mask(X, D, max_order)
    n_L0_D = int((L0 | dec).sum())
    lam = G.cardinality - n_L0_D - int(exc.sum()) - int(reg.sum())
    return Census(G.cardinality, int(L0.sum()), n_L0_D, int(dec.sum()), int(reg.sum()), int(exc.sum()), lam)


def structural_lefschetz(A: DelsarteMatrix, group: Optional[CharacterGroup] = None) -> int:
    return census(A, group).structural_lambda


def label_counts(A: DelsarteMatrix, group: Optional[CharacterGroup] = None,
                 max_order: int = DEFAULT_MAX_ORDER) -> Dict[HodgeClassLabel, int]:
    """Label every element of L; raises if some element fits no label."""
    G = group or CharacterGroup.build(A)
    X = G.element_array()
    D = G.denom
    L1, lam = _lambda_mask(G)
    rest = L1 & ~lam
    dec = rest & decomposable_mask(X, D)
    reg = rest & ~dec & template_mask(X, D)
    exc = rest & ~dec & ~reg & exceptional_mask(X, D, max_order)
    stray = rest & ~dec & ~reg & ~exc
    if stray.any():
        x = CharacterVector.from_numerators(X[np.argmax(stray)], D)
        raise UnclassifiableError(f"{x} is outside Lambda but neither D, R nor exceptional")
    return {
        HodgeClassLabel.IN_L0: int((~L1).sum()),
        HodgeClassLabel.IN_LAMBDA: int(lam.sum()),
        HodgeClassLabel.DECOMPOSABLE: int(dec.sum()),
        HodgeClassLabel.REGULAR: int(reg.sum()),
        HodgeClassLabel.EXCEPTIONAL: int(exc.sum()),
    }


def regular_elements(A: DelsarteMatrix, group: Optional[CharacterGroup] = None) -> list:
    G = group or CharacterGroup.build(A)
    X = G.element_array()
    D = G.denom
    L0 = (X == 0).any(axis=1)
    reg = ~L0 & ~decomposable_mask(X, D) & template_mask(X, D)
    return sorted((CharacterVector.from_numerators(r, D) for r in X[reg]), key=lambda v: v.coords)


def count_L0_inclusion_exclusion(A: DelsarteMatrix, group: Optional[CharacterGroup] = None) -> int:
    """#L0 from the sizes of the subgroups N_S = {x in L : x_i = 0 for i in S}."""
    G = group or CharacterGroup.build(A)
    D, B = G.denom, G.numerators
    total = 0
    for size in range(1, 5):
        for S in itertools.combinations(range(4), size):
            images = [tuple(b[i] for i in S) for b in B]
            K_S = kernel_mod(images, D)
            n_S = G.cardinality // lattice_index(K_S)
            total += (-1) ** (size + 1) * n_S
    return total
