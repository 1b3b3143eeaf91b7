from fractions import Fraction
from math import gcd

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from delsarte.character_group import (
    CharacterGroup,
    CharacterVector,
    _lambda_mask,
    betti2,
    hodge11,
    in_lambda,
    lefschetz,
    picard,
)
from delsarte.exact_arith import RationalMod1, reduce_mod1
from delsarte.formula_table import load_table
from delsarte.hodge_classes import PERMUTATIONS, structural_lefschetz

TABLE = load_table()
_GROUPS = {}

cases = st.integers(min_value=1, max_value=83)
degrees = st.integers(min_value=6, max_value=13)
slow = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def group(case, n):
    key = (case, n)
    if key not in _GROUPS:
        G = CharacterGroup.build(TABLE[case].surface.matrix(n))
        _GROUPS[key] = (G, _lambda_mask(G))
    return _GROUPS[key]


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_reduce_mod1_is_canonical(p, q):
    x = reduce_mod1(p, q)
    assert x.fr() == Fraction(p, q) - (Fraction(p, q).numerator // Fraction(p, q).denominator)
    assert (x + (-x)).numerator == 0


@given(st.integers(2, 400))
def test_hodge_integral(n):
    assert (2 * n**3 - 6 * n**2 + 7 * n) % 3 == 0
    assert hodge11(n) <= betti2(n)


@slow
@given(cases, degrees, st.data())
def test_element_properties(case, n, data):
    G, (L1, lam) = group(case, n)
    X = G.element_array()
    D = G.denom
    idx = data.draw(st.lists(st.integers(0, len(X) - 1), min_size=5, max_size=25))
    elems = {tuple(r) for r in X.tolist()}
    for i in idx:
        x = CharacterVector.from_numerators(X[i], D)
        neg = tuple((-X[i]) % D)
        assert neg in elems
        if not L1[i]:
            continue
        assert x.fr_sum() in (1, 2, 3)
        assert in_lambda(x) == bool(lam[i])
        d = x.order
        t = data.draw(st.sampled_from([u for u in range(1, max(d, 2)) if gcd(u, d) == 1]))
        assert in_lambda(x * t) == bool(lam[i])
        assert in_lambda(-x) == bool(lam[i])


@slow
@given(cases, degrees, st.sampled_from(PERMUTATIONS))
def test_lambda_permutation_equivariant(case, n, perm):
    A = TABLE[case].surface.matrix(n)
    assert lefschetz(A.permute_columns(perm)) == lefschetz(A)


@slow
@given(cases, degrees)
def test_lambda_plus_rho(case, n):
    A = TABLE[case].surface.matrix(n)
    assert lefschetz(A) + picard(A) == betti2(n)
    assert structural_lefschetz(A) == lefschetz(A)
