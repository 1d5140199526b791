import random
from fractions import Fraction

import pytest

from ehall.errors import (
    DegenerateSpecialization,
    DivisionByZero,
    InvalidIndex,
    PoleAtPoint,
)
from ehall.kfield import (
    FieldElem,
    K_SIGMA,
    K_SIGMABAR,
    LaurentPoly2,
    RationalDomain,
    SymbolicDomain,
    alpha,
    equals_probabilistic,
    field_arith,
    random_nondegenerate_point,
    specialize,
)

S = K_SIGMA
T = K_SIGMABAR
ONE = FieldElem(1)


def random_poly(rng, size=4, span=3):
    terms = {}
    for _ in range(rng.randint(1, size)):
        e = (rng.randint(-span, span), rng.randint(-span, span))
        terms[e] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return LaurentPoly2(terms)


def random_elem(rng):
    num = random_poly(rng)
    den = random_poly(rng)
    while den.is_zero():
        den = random_poly(rng)
    return FieldElem(num, den)


def test_polynomial_identity_quotient():
    # (s^2 - 1)/(s - 1) == s + 1
    num = S * S - ONE
    den = S - ONE
    assert num / den == S + ONE


def test_additive_identity_and_inverse_cancellation():
    rng = random.Random(1)
    x = random_elem(rng)
    assert x + FieldElem(0) == x
    y = ONE / (ONE - S)
    assert y * (ONE - S) == ONE


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        field_arith(ONE, FieldElem(0), "div")


def test_field_axioms_random():
    rng = random.Random(7)
    for _ in range(25):
        x, y, z = (random_elem(rng) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + y == y + x
        assert x * y == y * x


def test_alpha_formula_examples():
    a1 = alpha(1)
    expected = (ONE - S) * (ONE - T) * (ONE - ONE / (S * T))
    assert a1 == expected
    # alpha_2 vanishes at sigma = sigmabar = 1 is a pole-free statement:
    assert specialize(alpha(2), 1, 1) == 0
    with pytest.raises(InvalidIndex):
        alpha(0)


def test_alpha_3_specialization_bignum_oracle():
    # direct substitution oracle computed with plain Fractions
    sv, tv = Fraction(2), Fraction(3)
    oracle = (1 - sv ** 3) * (1 - tv ** 3) * (1 - (sv * tv) ** -3) / 3
    assert specialize(alpha(3), 2, 3) == oracle


def test_alpha_invariant_at_random_points():
    rng = random.Random(11)
    for i in range(1, 9):
        ai = alpha(i)
        for _ in range(20):
            sv, tv = random_nondegenerate_point(rng)
            direct = (1 - sv ** i) * (1 - tv ** i) * (1 - (sv * tv) ** -i) / i
            assert specialize(ai, sv, tv) == direct


def test_specialize_examples():
    assert specialize(S + T, 2, 3) == 5
    with pytest.raises(PoleAtPoint):
        specialize(ONE / (ONE - S), 1, 5)
    assert specialize(alpha(1), 2, 3) == Fraction(5, 3)
    with pytest.raises(PoleAtPoint):
        specialize(S, 0, 1)
    with pytest.raises(DegenerateSpecialization):
        specialize(S, 2, Fraction(1, 2), nondegenerate=True)


def test_equality_cross_multiplication():
    # (s^2 - t^2)/(s - t) == s + t
    assert (S * S - T * T) / (S - T) == S + T
    assert not (S == T)


def test_equals_probabilistic():
    assert equals_probabilistic(S, S, 5, seed=3)
    assert not equals_probabilistic(S, T, 5, seed=3)
    assert equals_probabilistic((S * S - T * T) / (S - T), S + T, 8, seed=5)


def test_equals_probabilistic_never_false_on_equal_pairs():
    rng = random.Random(23)
    for k in range(200):
        x = random_elem(rng)
        scale = random_elem(rng)
        while scale.is_zero():
            scale = random_elem(rng)
        y = (x * scale) / scale
        exact = x == y
        assert exact
        assert equals_probabilistic(x, y, 3, seed=k)


def test_domains_share_interface():
    sym = SymbolicDomain()
    rat = RationalDomain(2, 3)
    assert specialize(sym.alpha(2), 2, 3) == rat.alpha(2)
    assert specialize(sym.e1, 2, 3) == rat.e1
    assert specialize(sym.e2, 2, 3) == rat.e2
    with pytest.raises(DegenerateSpecialization):
        RationalDomain(1, 7)
    with pytest.raises(DegenerateSpecialization):
        RationalDomain(2, Fraction(1, 2))
