from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_gradings.errors import NotASubgroup, ParseError
from incidence_gradings.groups import (
    AbelianGroup,
    Character,
    Subgroup,
    characters_of,
    coset_equal,
    extend_character,
    parse_group,
    parse_group_table,
    subgroup_join,
    subgroup_meet,
)
from incidence_gradings.scalars import CyclotomicField

from _support import subgroups_of

FINITE = [AbelianGroup([2, 2]), AbelianGroup([4, 2]), AbelianGroup([3, 3]), AbelianGroup([6]), AbelianGroup([2, 4])]


def closure(group, gens):
    """Brute-force generated subgroup of a finite group."""
    seen = {group.identity()}
    frontier = [group.identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


@pytest.mark.parametrize("group", FINITE, ids=str)
def test_subgroup_elements_and_lattice_against_sets(group):
    subs = subgroups_of(group)
    for a in subs:
        assert set(a.elements) == closure(group, list(a.generators))
        assert a.order == len(a.elements)
        for b in subs:
            sa, sb = set(a.elements), set(b.elements)
            assert set(subgroup_meet(a, b).elements) == sa & sb
            assert set(subgroup_join(a, b).elements) == closure(group, list(sa | sb))
            assert a.is_subgroup_of(b) == sa.issubset(sb)


@pytest.mark.parametrize("group", FINITE, ids=str)
def test_invariant_factors_match_element_order_statistics(group):
    for sub in subgroups_of(group):
        inv = sub.invariant_factors
        # the number of elements killed by k determines the invariant factors
        for k in range(1, 13):
            killed = sum(1 for h in sub.elements if group.power(h, k) == group.identity())
            expected = 1
            for m in inv:
                expected *= math.gcd(k, m)
            assert killed == expected
        for a, b in zip(inv, inv[1:]):
            assert b % a == 0


@pytest.mark.parametrize("group", FINITE, ids=str)
def test_characters_are_all_homomorphisms(group):
    field = CyclotomicField(12)
    for sub in subgroups_of(group):
        chars = characters_of(sub, field)
        assert len(chars) == sub.order
        assert len({c for c in chars}) == sub.order
        assert chars[0].is_trivial()
        for c in chars:
            for a in sub.elements:
                for b in sub.elements:
                    assert c.phase(group.mul(a, b)) == (c.phase(a) + c.phase(b)) % 1
                assert c.value(a, field) ** sub.exponent == 1
        # brute force: every assignment of phases on a generating pair that is a homomorphism
        gens = list(sub.invariant_generators)
        count = 0
        e = sub.exponent
        for phases in itertools.product(range(e), repeat=len(gens)):
            ok = all((p * group.order_of(g)) % e == 0 for p, g in zip(phases, gens))
            count += ok
        assert count == sub.order


def test_character_products_and_restriction():
    g = AbelianGroup([4, 2])
    whole = g.whole()
    chars = characters_of(whole)
    for a in chars:
        for b in chars:
            assert (a * b) in chars
        assert (a * a.inverse()).is_trivial()
    small = Subgroup(g, [(2, 0)])
    for c in chars:
        r = c.restrict(small)
        assert r.phase((2, 0)) == c.phase((2, 0))
    with pytest.raises(NotASubgroup):
        characters_of(small)[1].restrict(whole)


@pytest.mark.parametrize("group", FINITE, ids=str)
def test_extension_restricts_back(group):
    subs = subgroups_of(group)
    for a in subs:
        for b in subs:
            if not a.is_subgroup_of(b):
                continue
            for chi in characters_of(a):
                ext = extend_character(a, b, chi)
                assert ext.domain == b
                assert ext.restrict(a) == chi


def test_z4_extension_uses_primitive_root():
    g = AbelianGroup([4])
    h = Subgroup(g, [(2,)])
    sign = characters_of(h)[1]
    ext = extend_character(h, g.whole(), sign)
    assert ext.exponents == (1,)
    assert ext.value((1,), CyclotomicField(4)) == CyclotomicField(4).zeta(4)


def test_infinite_factor_and_cosets():
    g = parse_group("Z2 x Z2 x Z")
    assert g.moduli == (2, 2, 0)
    h = Subgroup(g, [(1, 0, 0), (0, 1, 0)])
    assert h.is_finite and h.order == 4
    assert coset_equal((1, 1, 3), (0, 0, 3), h)
    assert not coset_equal((1, 1, 3), (0, 0, 2), h)
    assert not Subgroup(g, [(0, 0, 1)]).is_finite


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-7, 7), st.integers(-7, 7)), min_size=0, max_size=3))
def test_canonical_basis_is_generator_independent(gens):
    g = AbelianGroup([4, 0])
    s = Subgroup(g, gens)
    shuffled = Subgroup(g, list(reversed(gens)) + [g.mul(a, b) for a, b in zip(gens, gens[1:])])
    assert s == shuffled


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_group("Z2 x Y3")
    with pytest.raises(ParseError):
        parse_group_table("2; 0 1 1 1")


def test_table_group_s3_laws():
    from incidence_gradings.fileformats import load_grading
    from incidence_gradings import fixture_path

    s3 = load_grading(fixture_path("s3_chains.grading")).group
    assert s3.n == 6 and not s3.is_abelian
    e = s3.identity()
    for a in s3.elements():
        assert s3.mul(a, s3.inv(a)) == e
        for b in s3.elements():
            for c in s3.elements():
                assert s3.mul(s3.mul(a, b), c) == s3.mul(a, s3.mul(b, c))


def test_character_constructor_normalizes_phases():
    g = AbelianGroup([2])
    c = Character(g.whole(), {(0,): 0, (1,): Fraction(3, 2)})
    assert c.phase((1,)) == Fraction(1, 2)
