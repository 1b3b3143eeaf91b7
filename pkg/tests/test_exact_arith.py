import random
from fractions import Fraction

import pytest

from delsarte.exact_arith import (
    RationalMod1,
    SingularMatrixError,
    adjugate4,
    det4,
    echelon,
    fr,
    hnf,
    inverse_rational,
    kernel_mod,
    lattice_index,
    matmul,
    ord_plus,
    reduce_mod1,
    unit_group_generators,
    units,
)

CASE26_7 = ((7, 0, 0, 0), (0, 7, 0, 0), (0, 0, 6, 1), (1, 1, 0, 5))


def case26(n):
    return ((n, 0, 0, 0), (0, n, 0, 0), (0, 0, n - 1, 1), (1, 1, 0, n - 2))


@pytest.mark.parametrize("p,q,expected", [(7, 4, (3, 4)), (-1, 3, (2, 3)), (6, 3, (0, 1)), (5, -10, (1, 2))])
def test_reduce_mod1(p, q, expected):
    x = reduce_mod1(p, q)
    assert (x.numerator, x.denominator) == expected


def test_reduce_mod1_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        reduce_mod1(1, 0)


def test_non_canonical_rejected():
    with pytest.raises(ValueError):
        RationalMod1(2, 4)
    with pytest.raises(ValueError):
        RationalMod1(5, 4)


def test_fr_and_order():
    assert fr(RationalMod1(3, 4)) == Fraction(3, 4)
    assert fr(RationalMod1(0, 1)) == 0
    xs = [RationalMod1.parse(s) for s in ("1/12", "7/12", "2/3", "2/3")]
    assert sum(fr(x) for x in xs) == 2
    assert ord_plus(RationalMod1(1, 2)) == 2
    assert ord_plus(RationalMod1(0, 1)) == 1
    assert ord_plus(RationalMod1(19, 24)) == 24


def test_group_operations():
    a, b = RationalMod1(3, 4), RationalMod1(1, 2)
    assert a + b == RationalMod1(1, 4)
    assert -a == RationalMod1(1, 4)
    assert a - a == RationalMod1(0, 1)
    assert a * 6 == RationalMod1(1, 2)
    assert str(a) == "3/4"


def test_det4():
    eye = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
    assert det4(eye) == 1
    assert det4(tuple(tuple(6 * int(i == j) for j in range(4)) for i in range(4))) == 1296
    assert det4(CASE26_7) == 1470
    with pytest.raises(ValueError):
        det4(((1, 2), (3, 4)))


def test_adjugate_identity():
    rng = random.Random(3)
    for _ in range(20):
        A = tuple(tuple(rng.randint(-5, 5) for _ in range(4)) for _ in range(4))
        d = det4(A)
        prod = matmul(A, adjugate4(A))
        assert prod == tuple(tuple(d * int(i == j) for j in range(4)) for i in range(4))


def test_inverse_rational():
    diag = tuple(tuple(6 * int(i == j) for j in range(4)) for i in range(4))
    assert inverse_rational(diag) == tuple(tuple(Fraction(int(i == j), 6) for j in range(4)) for i in range(4))
    for n in (6, 7, 11):
        inv = inverse_rational(case26(n))
        row = tuple(a - b for a, b in zip(inv[2], inv[3]))
        m = (n - 1) * (n - 2)
        assert row == (Fraction(1, m), Fraction(1, m), Fraction(1, n - 1), Fraction(-n, m))
    with pytest.raises(SingularMatrixError):
        inverse_rational(((1, 1, 0, 0), (1, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))


def test_hnf_triangular_and_diagonal():
    H = ((2, 0, 0), (1, 3, 0), (1, 2, 5))
    assert hnf(H) == H
    assert hnf(((0, 0, 2), (0, 3, 0), (5, 0, 0))) == ((5, 0, 0), (0, 3, 0), (0, 0, 2))
    assert hnf(((2, 0, 0), (1, 3, 0), (4, 2, 5))) == ((2, 0, 0), (1, 3, 0), (0, 2, 5))
    with pytest.raises(ArithmeticError):
        hnf(((1, 0, 0), (2, 0, 0), (0, 1, 0)))


def _random_unimodular(rng):
    U = [[int(i == j) for j in range(3)] for i in range(3)]
    for _ in range(8):
        i, j = rng.sample(range(3), 2)
        k = rng.randint(-3, 3)
        U[i] = [a + k * b for a, b in zip(U[i], U[j])]
        if rng.random() < 0.3:
            U[i], U[j] = U[j], U[i]
    return U


def test_hnf_canonical_under_unimodular_change():
    rng = random.Random(11)
    for _ in range(40):
        B = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
        if det4([r + [0] for r in B] + [[0, 0, 0, 1]]) == 0:
            continue
        U = _random_unimodular(rng)
        assert hnf(matmul(U, B)) == hnf(B)


def test_lattice_index():
    assert lattice_index(((1, 0, 0), (0, 1, 0), (0, 0, 1))) == 1
    assert lattice_index(((3, 0, 0), (0, 4, 0), (0, 0, 5))) == 60


def test_echelon_reduces_above_pivots():
    E = echelon([(4, 6), (2, 5), (0, 0)])
    assert E == [(2, 1), (0, 4)]


def test_kernel_mod():
    # x + 2y == 0 mod 4 in one coordinate
    K = kernel_mod([(1,), (2,)], 4)
    assert lattice_index(K) == 4
    for row in K:
        assert (row[0] + 2 * row[1]) % 4 == 0


def test_units_and_generators():
    assert units(1) == [1]
    assert units(12) == [1, 5, 7, 11]
    for m in (2, 4, 8, 9, 12, 16, 30, 60, 180, 343, 1470):
        seen = {1}
        frontier = [1]
        gens = unit_group_generators(m)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = x * g % m
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        assert seen == set(units(m)) or (m == 2 and seen == {1})
