from __future__ import annotations

import random

import pytest

from incidence_gradings.algebra import IncidenceElement, conjugate_grading, ia_mul, is_idempotent, verify_grading
from incidence_gradings.canonical import (
    MINIMAL,
    assoc_dot,
    canonicalize,
    format_canonical,
    link_check,
    split_degree_one,
)
from incidence_gradings.errors import LinkMismatch
from incidence_gradings.poset import from_covers

from _support import fixture, random_conjugate


def summary(cf):
    return (
        cf.t,
        [b.subgroup for b in cf.blocks],
        [b.size for b in cf.blocks],
        cf.assoc_poset.covers,
        {k: cf.bimodule_dim(*k) for k in cf.bimodules},
        {k: sorted(len(v) for v in comps.values()) for k, comps in cf.bimodules.items()},
    )


def test_vee_form():
    cf = canonicalize(fixture("vee"))
    assert cf.t == 2
    assert [b.support for b in cf.blocks] == [(0,), (1, 2)]
    assert cf.blocks[1].subgroup.order == 2 and cf.blocks[1].subgroup.contains((0, 1))
    assert cf.assoc_poset.covers == ((0, 1),)
    assert set(cf.bimodules[(0, 1)]) == {(1, 0), (1, 1)}


def test_klein_antichain_is_a_single_block_of_order_four():
    g = fixture("klein_antichain")
    cf = canonicalize(g)
    assert cf.t == 1 and cf.blocks[0].order == 4
    assert split_degree_one(g, IncidenceElement.identity(g.poset)) is MINIMAL


def test_eight_point_shape():
    cf = canonicalize(fixture("eight_point"))
    assert cf.t == 4
    assert all(b.order == 2 for b in cf.blocks)
    assert cf.assoc_poset.covers == ((0, 1), (0, 2), (1, 3), (2, 3))
    dims = {(i + 1, j + 1): cf.bimodule_dim(i, j) for i, j in cf.bimodules}
    assert dims == {(1, 2): 4, (1, 3): 2, (1, 4): 4, (2, 4): 4, (3, 4): 2}


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("name", ["vee", "klein_antichain", "eight_point"])
def test_invariant_under_conjugation(name, seed):
    rng = random.Random(seed)
    g = fixture(name)
    h, _ = random_conjugate(rng, g)
    a, b = canonicalize(g), canonicalize(h)
    assert summary(a) == summary(b)
    # the reported conjugator really carries the input to the canonical grading
    assert conjugate_grading(h, b.conjugator).components == b.grading.components
    assert verify_grading(b.grading).ok


@pytest.mark.parametrize("seed", range(6))
def test_blocks_are_diagonal_group_algebras(seed):
    g, _ = random_conjugate(random.Random(seed), fixture("eight_point"))
    cf = canonicalize(g)
    group = g.group
    for b in cf.blocks:
        assert is_idempotent(b.unit) and b.unit.is_diagonal()
        for u, xu in b.basis.items():
            assert xu.is_diagonal() and xu[(b.support[0], b.support[0])] == 1
            for v, xv in b.basis.items():
                assert ia_mul(xu, xv) == b.basis[group.key(group.mul(u, v))]


def test_split_finds_proper_idempotent():
    g = fixture("vee")
    e = split_degree_one(g, IncidenceElement.identity(g.poset))
    assert e is not MINIMAL and is_idempotent(e)
    assert 0 < len(e.diagonal()) < g.poset.n


def test_link_table_and_mismatch():
    p = from_covers(4, [(1, 3), (1, 4), (2, 3), (2, 4)])
    table = link_check([(0, 1), (2, 3)], p)
    assert table[(0, 1)][0] == 4
    q = from_covers(4, [(1, 3), (2, 4)])
    assert link_check([(0, 1), (2, 3)], q)[(0, 1)][0] == 2
    r = from_covers(4, [(1, 3), (1, 4)])
    with pytest.raises(LinkMismatch):
        link_check([(0, 1), (2, 3)], r)


def test_report_and_dot_are_deterministic():
    g = fixture("eight_point")
    assert format_canonical(canonicalize(g)) == format_canonical(canonicalize(g))
    lines = format_canonical(canonicalize(g))
    assert "t=4" in lines and "bimodule.1.4.dim=4" in lines
    assert "digraph" in assoc_dot(canonicalize(g))
