import pytest

from delsarte.character_group import (
    CharacterGroup,
    CharacterVector,
    DelsarteMatrix,
    betti2,
    enumerate_group,
    generators,
    hodge11,
    in_L0,
    in_lambda,
    is_maximal,
    kernel_lattice,
    lefschetz,
    picard,
)
from delsarte.exact_arith import RationalMod1, SingularMatrixError, lattice_index
from fractions import Fraction


def fermat(n):
    return DelsarteMatrix(tuple(tuple(n * int(i == j) for j in range(4)) for i in range(4)), n)


def case26(n):
    return DelsarteMatrix(((n, 0, 0, 0), (0, n, 0, 0), (0, 0, n - 1, 1), (1, 1, 0, n - 2)), n)


def vec(text):
    return CharacterVector.parse(text)


def test_vector_must_sum_to_zero():
    with pytest.raises(ValueError):
        vec("1/2,1/2,1/2,0")
    x = vec("1/24,19/24,1/3,5/6")
    assert x.order == 24
    assert str(x) == "1/24,19/24,1/3,5/6"
    assert x.numerators() == (1, 19, 8, 20)
    assert -x + x == vec("0,0,0,0")
    assert x.fr_sum() == 2


def test_matrix_validation():
    with pytest.raises(ValueError):
        DelsarteMatrix(((6, 0, 0, 0), (0, 6, 0, 0), (0, 0, 6, 0), (0, 0, 0, 5)), 6)
    with pytest.raises(ValueError):
        DelsarteMatrix(((7, -1, 0, 0), (0, 6, 0, 0), (0, 0, 6, 0), (0, 0, 0, 6)), 6)
    with pytest.raises(SingularMatrixError):
        DelsarteMatrix(((3, 3, 0, 0), (3, 3, 0, 0), (0, 0, 6, 0), (0, 0, 0, 6)), 6)


def test_generators_fermat():
    for n in (5, 6, 9):
        v, w, u = generators(fermat(n))
        assert v == CharacterVector.of(Fraction(1, n), 0, 0, Fraction(n - 1, n))
        assert w == CharacterVector.of(0, Fraction(1, n), 0, Fraction(n - 1, n))


def test_generators_case26():
    for n in (6, 7, 10, 16):
        v, w, u = generators(case26(n))
        m = (n - 1) * (n - 2)
        assert v == CharacterVector.of(
            Fraction(n - 1, n * (n - 2)), Fraction(1, n * (n - 2)), 0, Fraction(n - 3, n - 2))
        assert u == CharacterVector.of(Fraction(1, m), Fraction(1, m), Fraction(1, n - 1), Fraction(-n, m))


def test_kernel_index():
    for n in (5, 6, 7):
        K = kernel_lattice(fermat(n))
        assert lattice_index(K) == n**3
        assert K == ((n, 0, 0), (0, n, 0), (0, 0, n))
    assert lattice_index(kernel_lattice(case26(7))) == 210
    assert lattice_index(kernel_lattice(case26(6))) == 120


def test_enumeration():
    G = CharacterGroup.build(case26(7))
    elems = enumerate_group(G)
    assert len(elems) == 210 == len(set(elems))
    assert elems[0] == vec("0,0,0,0")
    tiny = DelsarteMatrix(tuple(tuple(2 * int(i == j) for j in range(4)) for i in range(4)), 2)
    assert len(enumerate_group(CharacterGroup.build(tiny))) == 8


def test_enumeration_closed_under_addition():
    G = CharacterGroup.build(case26(8))
    elems = set(G)
    gens = G.generators
    for x in list(elems)[:50]:
        for g in gens:
            assert x + g in elems


def test_in_L0():
    assert in_L0(vec("1/2,1/2,0,0"))
    assert not in_L0(vec("1/12,7/12,2/3,2/3"))
    assert in_L0(vec("0,0,0,0"))


def test_in_lambda():
    assert in_lambda(vec("1/5,1/5,1/5,2/5"))
    assert not in_lambda(vec("1/2,1/2,1/2,1/2"))
    assert not in_lambda(vec("1/12,7/12,2/3,2/3"))
    with pytest.raises(ValueError):
        in_lambda(vec("1/2,1/2,0,0"))


def test_lefschetz_values():
    assert lefschetz(case26(7)) == 164
    assert lefschetz(fermat(6)) == 20
    assert picard(case26(7)) == 23
    assert picard(case26(16)) == 48
    assert picard(fermat(6)) == 86
    assert is_maximal(fermat(6))
    assert not is_maximal(fermat(7))


def test_lefschetz_zero_when_L1_empty():
    # degree 2 Fermat: every element has a zero coordinate or is (1/2,...)
    tiny = DelsarteMatrix(tuple(tuple(2 * int(i == j) for j in range(4)) for i in range(4)), 2)
    assert lefschetz(tiny) == 0


@pytest.mark.parametrize("n,b2,h11", [(4, 22, 20), (5, 53, 45), (6, 106, 86), (7, 187, 147)])
def test_betti_and_hodge(n, b2, h11):
    assert betti2(n) == b2
    assert hodge11(n) == h11
    p_g = (n - 1) * (n - 2) * (n - 3) // 6
    assert hodge11(n) == betti2(n) - 2 * p_g


def test_rational_mod1_roundtrip_through_vectors():
    x = vec("3/7,4/7,1/2,1/2")
    assert CharacterVector.from_numerators(x.numerators(14), 14) == x
    assert x[0] == RationalMod1(3, 7)
