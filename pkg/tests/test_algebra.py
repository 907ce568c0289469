from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_gradings.algebra import (
    Grading,
    IncidenceElement,
    conjugate_grading,
    diagonalize_idempotent,
    element_inverse,
    ia_mul,
    idempotent_from,
    is_idempotent,
    simultaneous_diagonalize,
    verify_grading,
    verify_radical_graded,
)
from incidence_gradings.errors import (
    BadSpectrum,
    NotIdempotent,
    NotInvertible,
    NotOrthogonal,
    ParseError,
    PosetMismatch,
)
from incidence_gradings.fileformats import format_grading, parse_grading
from incidence_gradings.groups import AbelianGroup
from incidence_gradings.poset import chain, from_covers

from _support import dense, dense_mul, fixture, random_invertible, random_poset

FIXTURES = ["vee", "klein_antichain", "eight_point", "s3_chains", "crown"]


def random_element(rng, poset, diag=True):
    entries = {}
    for x, y in poset.pairs:
        if x == y and not diag:
            continue
        c = rng.randint(-3, 3)
        if c:
            entries[(x, y)] = Fraction(c, rng.choice([1, 1, 2]))
    return IncidenceElement(poset, entries)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_product_matches_dense_matrices(seed):
    rng = random.Random(seed)
    p = random_poset(rng, rng.randint(1, 7), 0.4)
    a, b = random_element(rng, p), random_element(rng, p)
    assert dense(ia_mul(a, b)) == dense_mul(dense(a), dense(b))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_inverse_is_two_sided(seed):
    rng = random.Random(seed)
    p = random_poset(rng, rng.randint(1, 7), 0.5)
    m = random_invertible(rng, p, spread=3)
    one = IncidenceElement.identity(p)
    inv = element_inverse(m)
    assert ia_mul(m, inv) == one and ia_mul(inv, m) == one


def test_singular_and_mismatched_elements():
    p = chain(2)
    with pytest.raises(NotInvertible):
        element_inverse(IncidenceElement(p, {(0, 0): 1, (0, 1): 1}))
    with pytest.raises(PosetMismatch):
        ia_mul(IncidenceElement.identity(p), IncidenceElement.identity(chain(3)))


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_verify(name):
    g = fixture(name)
    report = verify_grading(g)
    assert report.ok, report.message
    assert sum(len(v) for v in g.components.values()) == len(g.poset.pairs)


def test_corrupted_degree_is_caught_with_witness():
    text = open(fixture("vee").name).read().replace("deg (1,1) : e[1,2] + e[1,3]", "deg (0,1) : e[1,2] + e[1,3]")
    report = verify_grading(parse_grading(text))
    assert not report.ok
    assert report.checks["multiplicative closure"] is False
    g, h, u, v = report.witness
    assert ia_mul(u, v)


def test_non_direct_sum_is_rejected():
    p = chain(2)
    z2 = AbelianGroup([2])
    g = Grading(p, z2, fixture("vee").field, [((0,), IncidenceElement.unit(p, 0, 0)), ((1,), IncidenceElement.unit(p, 0, 0))])
    assert not verify_grading(g).ok


@pytest.mark.parametrize("name", ["vee", "eight_point", "crown"])
def test_radical_basis_is_homogeneous_and_strictly_upper(name):
    g = fixture(name)
    ok, basis = verify_radical_graded(g)
    assert ok and len(basis) == len(g.poset.strict_pairs)
    for deg, v in basis:
        assert not v.diagonal()
        assert g.degree_of(v) == deg


@pytest.mark.parametrize("seed", range(10))
def test_conjugation_preserves_validity_and_dimensions(seed):
    rng = random.Random(seed)
    g = fixture(rng.choice(["vee", "eight_point"]))
    m = random_invertible(rng, g.poset)
    h = conjugate_grading(g, m)
    assert verify_grading(h).ok
    assert {d: len(v) for d, v in g.components.items()} == {d: len(v) for d, v in h.components.items()}
    back = conjugate_grading(h, element_inverse(m))
    assert back.components == g.components


def test_idempotent_tools():
    p = from_covers(3, [(1, 2), (1, 3)])
    e = IncidenceElement(p, {(0, 0): 1, (0, 1): 5, (0, 2): -2})
    assert is_idempotent(e)
    m = diagonalize_idempotent(e)
    d = ia_mul(ia_mul(element_inverse(m), e), m)
    assert d.is_diagonal() and d.diagonal() == {0: 1}
    f = IncidenceElement(p, {(1, 1): 1})
    with pytest.raises(NotOrthogonal):
        simultaneous_diagonalize([e, f])
    with pytest.raises(NotIdempotent):
        simultaneous_diagonalize([e.scale(2)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_idempotent_from_has_matching_diagonal(seed):
    rng = random.Random(seed)
    p = random_poset(rng, rng.randint(2, 6), 0.6)
    diag = {x: rng.choice([0, 1]) for x in range(p.n)}
    diag[0] = 1
    x = random_element(rng, p, diag=False) + IncidenceElement(p, {(k, k): v for k, v in diag.items() if v})
    e = idempotent_from(x)
    assert is_idempotent(e)
    assert e.diagonal() == {k: 1 for k, v in diag.items() if v}


def test_idempotent_from_rejects_bad_spectrum():
    with pytest.raises(BadSpectrum):
        idempotent_from(IncidenceElement(chain(2), {(0, 0): 2}))


@pytest.mark.parametrize("name", FIXTURES)
def test_format_round_trip(name):
    g = fixture(name)
    again = parse_grading(format_grading(g))
    assert again.components == g.components


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as info:
        parse_grading("group=Z2\nn=2\ncovers=(1,2)\ndeg (0) : e[1,2] + q\n")
    assert info.value.line == 4
    with pytest.raises(ParseError):
        parse_grading("group=Z2\nn=2\ncovers=(1,2)\ndeg (0) : e[2,1]\n")


def test_prime_field_backend():
    text = """prime=13
conductor=4
group=Z4
n=4
covers=
deg (0) : e[1,1] + e[2,2] + e[3,3] + e[4,4]
deg (1) : e[1,1] + 5*e[2,2] + 12*e[3,3] + 8*e[4,4]
deg (2) : e[1,1] + 12*e[2,2] + e[3,3] + 12*e[4,4]
deg (3) : e[1,1] + 8*e[2,2] + 12*e[3,3] + 5*e[4,4]
"""
    g = parse_grading(text)
    assert verify_grading(g).ok
    broken = text.replace("8*e[4,4]\n", "7*e[4,4]\n", 1)
    assert not verify_grading(parse_grading(broken)).ok
