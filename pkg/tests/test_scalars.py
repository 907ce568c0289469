from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_gradings.errors import ConductorOverflow, DivisionByZero, InsufficientRoots, ParseError
from incidence_gradings.scalars import (
    CyclotomicField,
    CyclotomicScalar,
    PrimeField,
    PrimeFieldScalar,
    conductor_max,
    cyclotomic_polynomial,
    euler_phi,
    poly_crt_split,
    root_of_unity,
    set_conductor_max,
)


def embed(value, n=None):
    """Complex value under zeta_N -> exp(2 pi i / N)."""
    if isinstance(value, (int, Fraction)):
        return complex(value)
    z = cmath.exp(2j * cmath.pi / value.conductor)
    return sum(complex(c) * z**k for k, c in enumerate(value.coeffs))


def close(a: complex, b: complex) -> bool:
    return abs(a - b) < 1e-9 * max(1.0, abs(a), abs(b))


@pytest.mark.parametrize("n", range(1, 37))
def test_cyclotomic_polynomial_matches_sympy(n):
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(n).coeffs) == [int(c) for c in expected]
    assert euler_phi(n) == sympy.totient(n)


def test_small_identities():
    assert root_of_unity(4) ** 2 == -1
    z6 = root_of_unity(6)
    assert z6 + z6**5 == 1
    w = root_of_unity(3)
    assert 1 + w + w**2 == 0
    assert root_of_unity(12, 3) == root_of_unity(4)
    assert hash(root_of_unity(12, 3)) == hash(root_of_unity(4))
    assert root_of_unity(8) ** 8 == 1


def test_cross_conductor_equality_and_rationals():
    assert root_of_unity(6, 3) == -1
    assert root_of_unity(2) == Fraction(-1)
    half = CyclotomicScalar.rational(Fraction(1, 2), 5)
    assert half == Fraction(1, 2)
    assert hash(half) == hash(CyclotomicScalar.rational(Fraction(1, 2), 7))


scalars = st.builds(
    lambda n, cs: CyclotomicScalar(n, cs[: euler_phi(n)]),
    st.sampled_from([1, 3, 4, 5, 8, 12]),
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=1, max_size=4),
)


@settings(max_examples=150, deadline=None)
@given(scalars, scalars, scalars)
def test_field_operations_agree_with_complex_embedding(a, b, c):
    # embeddings at different conductors are compatible: zeta_N = exp(2 pi i/N)
    assert close(embed(a + b), embed(a) + embed(b))
    assert close(embed(a * b), embed(a) * embed(b))
    assert close(embed(a - c), embed(a) - embed(c))
    assert (a + b) * c == a * c + b * c
    if a:
        assert close(embed(1 / a), 1 / embed(a))
        assert a * a.inverse() == 1


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        CyclotomicScalar(5, [0]).inverse()


def test_conductor_bound():
    old = conductor_max()
    try:
        set_conductor_max(10)
        with pytest.raises(ConductorOverflow):
            CyclotomicField(12)
    finally:
        set_conductor_max(old)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_poly_crt_split_is_an_idempotent_lift(m):
    """p(0) = 0, p(1) = 1 and p - p^2 is divisible by (x(1-x))^m."""
    x = sympy.Symbol("x")
    p = poly_crt_split(m)
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(map(Fraction, p.coeffs)))
    assert expr.subs(x, 0) == 0 and expr.subs(x, 1) == 1
    q, r = sympy.div(sympy.expand(expr - expr**2), sympy.expand((x * (1 - x)) ** m), x)
    assert r == 0


def test_known_split_polynomials():
    assert [Fraction(c) for c in poly_crt_split(2).coeffs] == [0, 0, 3, -2]
    assert [Fraction(c) for c in poly_crt_split(3).coeffs] == [0, 0, 0, 10, -15, 6]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100), st.integers(1, 100))
def test_prime_field_matches_modular_integers(a, b):
    p = 101
    x, y = PrimeFieldScalar(p, a), PrimeFieldScalar(p, b)
    assert (x * y).residue == a * b % p
    assert (x - y).residue == (a - b) % p
    assert (x / y * y) == x


def test_prime_field_roots():
    f = PrimeField(13, 4)
    z = f.zeta(4)
    assert z**4 == 1 and z**2 != 1
    assert f.has_roots(12) and not f.has_roots(5)
    with pytest.raises(InsufficientRoots):
        PrimeField(7, 4)


def test_parse_and_format_round_trip():
    f = CyclotomicField(3)
    v = f.parse_scalar("2*z^2 - 1/3")
    assert f.parse_scalar(f.format(v)) == v
    with pytest.raises(ParseError):
        f.parse_scalar("2*q")
