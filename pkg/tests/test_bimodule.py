from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_gradings.algebra import verify_grading
from incidence_gradings.bimodule import (
    bimodule_iso_check,
    cyclic_block,
    decompose_form,
    format_tag,
    realize_blocks,
    realize_two_block,
    tensor_iso_data,
    triangular_iso_check,
    verify_cyclic_block,
    verify_distinct_characters,
)
from incidence_gradings.canonical import canonicalize
from incidence_gradings.errors import DuplicateCharacter, NonAbelianGroup, TagTooLarge
from incidence_gradings.groups import (
    AbelianGroup,
    Subgroup,
    characters_of,
    subgroup_join,
    subgroup_meet,
)

from _support import fixture, random_conjugate, subgroups_of

Z4Z2 = AbelianGroup([4, 2])
SUBS = subgroups_of(Z4Z2)


def brute_iso(tag_a, tag_b, h1, h2):
    """Oracle: some bijection matching characters exactly and degrees modulo H1H2 as element sets."""
    join = set(subgroup_join(h1, h2).elements)
    group = h1.ambient
    if len(tag_a) != len(tag_b):
        return False

    def same_coset(a, b):
        return group.mul(a, group.inv(b)) in join

    for perm in itertools.permutations(range(len(tag_b))):
        if all(ca == tag_b[k][0] and same_coset(ha, tag_b[k][1]) for (ca, ha), k in zip(tag_a, perm)):
            return True
    return False


def random_tag(rng, h1, h2, size=None):
    inter = subgroup_meet(h1, h2)
    chars = characters_of(inter)
    size = rng.randint(0, len(chars)) if size is None else size
    picked = rng.sample(chars, size)
    return [(chi, rng.choice(Z4Z2.elements())) for chi in picked]


def test_vee_tag():
    cf = canonicalize(fixture("vee"))
    dec = decompose_form(cf)[(0, 1)]
    assert dec.s == 1
    chi, h = dec.tag[0]
    assert chi.domain.order == 1
    # (1,0) and (1,1) are one coset of H1H2 = <(0,1)>
    assert h in [(1, 0), (1, 1)]
    assert dec.join.contains((0, 1))


def test_eight_point_tags():
    cf = canonicalize(fixture("eight_point"))
    decs = decompose_form(cf)
    s = {(i + 1, j + 1): d.s for (i, j), d in decs.items()}
    assert s == {(1, 2): 1, (1, 3): 1, (1, 4): 2, (2, 4): 1, (3, 4): 1}
    d14 = decs[(0, 3)]
    assert d14.intersection.order == 2
    assert sorted(chi.exponents for chi, _ in d14.tag) == [(0,), (1,)]
    assert verify_distinct_characters(cf).ok


@pytest.mark.parametrize("seed", range(8))
def test_pieces_satisfy_eigen_relation_and_dimension_law(seed):
    g, _ = random_conjugate(random.Random(seed), fixture("eight_point"))
    cf = canonicalize(g)
    for (i, j), dec in decompose_form(cf).items():
        assert dec.dim == dec.s * dec.join.order
        for chi, h, m in dec.pairs:
            pieces = cyclic_block(m, h, cf.blocks[i], cf.blocks[j], g.group)
            ok, msg = verify_cyclic_block(pieces, chi, h, cf.blocks[i], cf.blocks[j], cf.grading, m)
            assert ok, msg


@pytest.mark.parametrize("h1,h2", [(a, b) for a in SUBS for b in SUBS][::3])
def test_realization_round_trip(h1, h2):
    rng = random.Random(hash((h1.canonical_basis, h2.canonical_basis)) & 0xFFFF)
    tag = random_tag(rng, h1, h2, size=max(1, rng.randint(0, subgroup_meet(h1, h2).order)))
    poset, g = realize_two_block(h1, h2, tag)
    assert verify_grading(g).ok
    cf = canonicalize(g)
    assert [b.subgroup for b in cf.blocks] == [h1, h2]
    got = decompose_form(cf)[(0, 1)].tag
    assert brute_iso(tag, got, h1, h2)
    assert bimodule_iso_check(tag, got, h1, h2) is not None


def test_realize_errors():
    h = Subgroup(Z4Z2, [(0, 1)])
    chars = characters_of(h)
    with pytest.raises(DuplicateCharacter):
        realize_two_block(h, h, [(chars[0], (1, 0)), (chars[0], (2, 0))])
    trivial = Subgroup(Z4Z2, [])
    one = characters_of(trivial)[0]
    with pytest.raises(TagTooLarge):
        realize_two_block(trivial, h, [(one, (1, 0)), (one, (2, 0))])


def test_trivial_intersection_allows_one_piece():
    h1 = Subgroup(Z4Z2, [(0, 1)])
    h2 = Subgroup(Z4Z2, [(2, 0)])
    inter = subgroup_meet(h1, h2)
    assert inter.order == 1
    _, g = realize_two_block(h1, h2, [(characters_of(inter)[0], (1, 0))])
    cf = canonicalize(g)
    dec = decompose_form(cf)[(0, 1)]
    assert dec.s == 1 and dec.dim == 4


@pytest.mark.parametrize(
    "h1,h2",
    [
        (Subgroup(Z4Z2, []), Subgroup(Z4Z2, [(0, 1)])),
        (Subgroup(Z4Z2, [(0, 1)]), Subgroup(Z4Z2, [(0, 1)])),
        (Subgroup(Z4Z2, [(1, 0)]), Subgroup(Z4Z2, [(2, 0)])),
        (Subgroup(Z4Z2, [(1, 0)]), Subgroup(Z4Z2, [(1, 1)])),
        (Z4Z2.whole(), Z4Z2.whole()),
    ],
)
def test_tensor_product_of_group_algebras(h1, h2):
    inter = subgroup_meet(h1, h2)
    for chi1 in characters_of(inter):
        for chi2 in characters_of(inter):
            data = tensor_iso_data(h1, h2, chi1, chi2)
            assert data["well_defined"] and data["bijective"]
            assert data["quotient_dim"] == subgroup_join(h1, h2).order
            assert data["chi_bar_1"].restrict(inter) == chi1.inverse()
            assert data["chi_bar_2"].restrict(inter) == chi2.inverse()


tag_pairs = st.tuples(st.sampled_from(SUBS), st.sampled_from(SUBS), st.integers(0, 10**6))


@settings(max_examples=80, deadline=None)
@given(tag_pairs)
def test_iso_check_is_an_equivalence_matching_the_oracle(data):
    h1, h2, seed = data
    rng = random.Random(seed)
    size = rng.randint(0, subgroup_meet(h1, h2).order)
    a = random_tag(rng, h1, h2, size)
    join = subgroup_join(h1, h2)
    # b: a shuffled copy with degrees moved inside their cosets
    b = [(chi, Z4Z2.mul(h, rng.choice(join.elements))) for chi, h in a]
    rng.shuffle(b)
    c = random_tag(rng, h1, h2, size)
    for x, y in [(a, a), (a, b), (b, a), (a, c), (c, b)]:
        assert (bimodule_iso_check(x, y, h1, h2) is not None) == brute_iso(x, y, h1, h2)
    sigma = bimodule_iso_check(a, b, h1, h2)
    assert sigma is not None and sorted(sigma) == list(range(size))
    if bimodule_iso_check(a, c, h1, h2) is not None:
        assert bimodule_iso_check(b, c, h1, h2) is not None


def test_triangular_twist():
    h = Subgroup(Z4Z2, [(2, 0)])
    triv, sign = characters_of(h)
    a = [(triv, (1, 0))]
    b = [(sign, (1, 0))]
    assert bimodule_iso_check(a, b, h, h) is None
    chi, sigma = triangular_iso_check(a, b, h, h)
    assert chi == sign and sigma == (0,)
    assert triangular_iso_check(a, [(sign, (0, 1))], h, h) is None


def test_format_tag():
    h = Subgroup(Z4Z2, [(2, 0)])
    tag = [(characters_of(h)[1], (1, 0))]
    assert format_tag(tag, Z4Z2) == "[(chi=(1), h=(1,0))]"


def test_multi_block_realization_is_a_grading():
    g = AbelianGroup([2, 0])
    h = Subgroup(g, [(1, 0)])
    triv, sign = characters_of(h)
    tags = {(0, 1): [(triv, (0, 1))], (1, 2): [(triv, (0, 1))], (0, 2): [(triv, (0, 2))]}
    _, grading = realize_blocks([h, h, h], tags)
    assert verify_grading(grading).ok
    cf = canonicalize(grading)
    assert cf.t == 3


def test_nonabelian_group_is_rejected():
    cf = canonicalize(fixture("s3_chains"))
    with pytest.raises(NonAbelianGroup):
        decompose_form(cf)
