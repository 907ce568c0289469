"""Graded (FH_i, FH_j)-bimodules over an abelian grading group.

A bimodule M_ij splits as a sum of cyclic pieces FH_i m FH_j with
h m = chi(h) m h for h in the intersection of H_i and H_j; its tag is the
list of (chi, deg m).  This module computes tags, compares them and builds
two-block posets realizing a given tag.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm

from .algebra import Grading, IncidenceElement, ia_mul
from .canonical import Block, CanonicalForm
from .errors import (
    DistinctnessViolated,
    DuplicateCharacter,
    GradingError,
    NonAbelianGroup,
    TagTooLarge,
)
from .groups import (
    AbelianGroup,
    Character,
    Subgroup,
    characters_of,
    extend_character,
    subgroup_join,
    subgroup_meet,
)
from .linalg import Echelon, axpy, rref
from .poset import from_relation
from .scalars import CyclotomicField


@dataclass
class BimoduleDecomposition:
    """Tag [(chi_l, h_l)] of a bimodule with the generators m_l."""

    pairs: list
    intersection: Subgroup
    join: Subgroup
    dim: int = 0

    @property
    def tag(self) -> list:
        return [(chi, h) for chi, h, _ in self.pairs]

    @property
    def s(self) -> int:
        return len(self.pairs)


def _require_abelian(group) -> None:
    if not isinstance(group, AbelianGroup):
        raise NonAbelianGroup("bimodule structure theory needs an abelian grading group")


def _twist(m: IncidenceElement, left: IncidenceElement, right: IncidenceElement) -> IncidenceElement:
    """left * m * right for diagonal ``left`` and ``right``."""
    ld = left.diagonal()
    rd = right.diagonal()
    out = {}
    for (x, y), v in m.entries.items():
        a, b = ld.get(x), rd.get(y)
        if a and b:
            out[(x, y)] = a * v * b
    return IncidenceElement._raw(m.poset, out)


def cyclic_block(m: IncidenceElement, deg, block_i: Block, block_j: Block, group) -> dict:
    """Homogeneous pieces of FH_i m FH_j, keyed by degree (echelonized)."""
    pieces: dict = {}
    for a, xa in block_i.basis.items():
        left = _twist(m, xa, IncidenceElement.identity(m.poset))
        for b, xb in block_j.basis.items():
            vec = _twist(left, IncidenceElement.identity(m.poset), xb)
            if vec:
                d = group.key(group.mul(group.mul(a, deg), b))
                pieces.setdefault(d, []).append(vec.entries)
    return {d: [IncidenceElement._raw(m.poset, v) for v in rref(vs)] for d, vs in pieces.items()}


def decompose_bimodule(components: dict, block_i: Block, block_j: Block, grading: Grading) -> BimoduleDecomposition:
    """Split a graded bimodule (degree -> basis) into character-tagged cyclic pieces."""
    group = grading.group
    _require_abelian(group)
    field = grading.field
    hi, hj = block_i.subgroup, block_j.subgroup
    inter = subgroup_meet(hi, hj)
    join = subgroup_join(hi, hj)
    chars = characters_of(inter, field)
    order = Fraction(1, inter.order)
    pairs = []
    covered = set()
    dim = sum(len(v) for v in components.values())
    for g in sorted(components):
        if g in covered:
            continue
        space = components[g]
        for chi in chars:
            projected = []
            for m in space:
                acc: dict = {}
                for h in inter.elements:
                    coef = chi.value(h, field)
                    coef = order / coef
                    t = _twist(m, block_i.basis[h], block_j.basis[group.inv(h)])
                    axpy(acc, coef, t.entries)
                if acc:
                    projected.append(acc)
            for vec in rref(projected):
                pairs.append((chi, g, IncidenceElement._raw(grading.poset, vec)))
        for h in join.elements:
            covered.add(group.key(group.mul(g, h)))
    total = len(pairs) * join.order
    if total != dim:
        raise GradingError(f"cyclic pieces account for dimension {total}, bimodule has {dim}")
    return BimoduleDecomposition(pairs, inter, join, dim)


def verify_cyclic_block(pieces: dict, chi: Character, h, block_i: Block, block_j: Block, grading: Grading, m=None):
    """Check that a cyclic piece is a shifted copy of F(H_i H_j) with character ``chi``.

    ``pieces`` maps degree -> basis.  Returns (ok, message).
    """
    group = grading.group
    join = subgroup_join(block_i.subgroup, block_j.subgroup)
    dim = sum(len(v) for v in pieces.values())
    if dim != join.order:
        return False, f"dimension {dim} differs from |H_i H_j| = {join.order}"
    expected = {group.key(group.mul(h, u)) for u in join.elements}
    for d, vs in pieces.items():
        if d not in expected:
            return False, f"degree {group.format_element(d)} outside the coset of {group.format_element(h)}"
        if len(vs) != 1:
            return False, f"degree {group.format_element(d)} has dimension {len(vs)}"
    if set(pieces) != expected:
        return False, "some degree of the coset is missing"
    if m is not None:
        one = IncidenceElement.identity(m.poset)
        for u in chi.domain.elements:
            left = _twist(m, block_i.basis[u], one)
            right = _twist(m, one, block_j.basis[u])
            if left != right.scale(chi.value(u, grading.field)):
                return False, f"h m = chi(h) m h fails at h = {group.format_element(u)}"
    return True, ""


def decompose_form(cf: CanonicalForm) -> dict:
    """Decompositions of every nonzero M_ij of a canonical form."""
    return {
        (i, j): decompose_bimodule(comps, cf.blocks[i], cf.blocks[j], cf.grading)
        for (i, j), comps in sorted(cf.bimodules.items())
    }


@dataclass
class DistinctReport:
    ok: bool
    table: dict = dc_field(default_factory=dict)
    violations: list = dc_field(default_factory=list)


def verify_distinct_characters(cf: CanonicalForm, decomps: dict | None = None, strict: bool = True) -> DistinctReport:
    """Characters of each M_ij pairwise distinct and s_ij <= |H_i cap H_j|."""
    decomps = decompose_form(cf) if decomps is None else decomps
    table, bad = {}, []
    for key, dec in decomps.items():
        chars = [chi for chi, _, _ in dec.pairs]
        distinct = len(set(chars)) == len(chars)
        bounded = dec.s <= dec.intersection.order
        table[key] = (dec.s, dec.intersection.order, distinct)
        if not (distinct and bounded):
            bad.append(key)
    if bad and strict:
        raise DistinctnessViolated(f"character distinctness fails for block pairs {bad}")
    return DistinctReport(not bad, table, bad)


# ---------------------------------------------------------------------------
# Tensor products of group algebras
# ---------------------------------------------------------------------------

def tensor_iso_data(h1: Subgroup, h2: Subgroup, chi1: Character, chi2: Character, field=None) -> dict:
    """Data for FH_1 (x)_{F(H_1 cap H_2)} FH_2 = F(H_1 H_2) with twisted inclusions.

    The inclusions are iota_k(h) = chi_k(h) h.  Returns the extensions of
    chi_k^{-1}, the map phi(h1 (x) h2) = cb1(h1) cb2(h2) h1h2 and the checks.
    """
    field = field or CyclotomicField(lcm(h1.exponent, h2.exponent))
    group = h1.ambient
    inter = subgroup_meet(h1, h2)
    join = subgroup_join(h1, h2)
    cb1 = extend_character(inter, h1, chi1.inverse())
    cb2 = extend_character(inter, h2, chi2.inverse())
    phi = {}
    for a in h1.elements:
        for b in h2.elements:
            phi[(a, b)] = (cb1.phase(a) + cb2.phase(b), group.mul(a, b))
    well_defined = all(
        (chi1.phase(h) + cb1.phase(h)) % 1 == 0 and (chi2.phase(h) + cb2.phase(h)) % 1 == 0
        for h in inter.elements
    )
    # relations (a + h) (x) b * chi1(h) - a (x) (h + b) * chi2(h) of the tensor product
    index = {k: n for n, k in enumerate(phi)}
    relations = Echelon()
    for a in h1.elements:
        for b in h2.elements:
            for h in inter.elements:
                v: dict = {}
                axpy(v, chi1.value(h, field), {index[(group.mul(a, h), b)]: 1})
                axpy(v, -chi2.value(h, field), {index[(a, group.mul(h, b))]: 1})
                relations.add(v)
    quotient_dim = len(phi) - relations.dim
    targets = {g: n for n, g in enumerate(join.elements)}

    def image(vec: dict) -> dict:
        out: dict = {}
        for k, c in vec.items():
            phase, g = phi[list(phi)[k]]
            axpy(out, c * field.zeta(phase.denominator, phase.numerator), {targets[g]: 1})
        return out

    kills_relations = all(not image(row) for row in relations.basis())
    rank_phi = Echelon(image({index[k]: 1}) for k in phi).dim
    return {
        "chi_bar_1": cb1,
        "chi_bar_2": cb2,
        "phi": phi,
        "well_defined": well_defined and kills_relations,
        "quotient_dim": quotient_dim,
        "image_rank": rank_phi,
        "bijective": well_defined and kills_relations and quotient_dim == join.order == rank_phi,
    }


# ---------------------------------------------------------------------------
# Tag comparison
# ---------------------------------------------------------------------------

def coset_key(h, sub: Subgroup):
    group = sub.ambient
    return min(group.mul(h, u) for u in sub.elements)


def bimodule_iso_check(tag_a, tag_b, h1: Subgroup, h2: Subgroup):
    """A permutation sigma matching characters exactly and degrees modulo H_1H_2, or None."""
    if len(tag_a) != len(tag_b):
        return None
    join = subgroup_join(h1, h2)
    pool: dict = {}
    for k, (chi, h) in enumerate(tag_b):
        pool.setdefault((chi, coset_key(h, join)), []).append(k)
    sigma = []
    for chi, h in tag_a:
        bucket = pool.get((chi, coset_key(h, join)))
        if not bucket:
            return None
        sigma.append(bucket.pop(0))
    return tuple(sigma)


def triangular_iso_check(tag_a, tag_b, h1: Subgroup, h2: Subgroup):
    """(chi, sigma) with chi_l = chi * chi'_sigma(l) and matching cosets, or None."""
    if len(tag_a) != len(tag_b):
        return None
    inter = subgroup_meet(h1, h2)
    for chi in characters_of(inter):
        twisted = [(chi * c, h) for c, h in tag_b]
        sigma = bimodule_iso_check(tag_a, twisted, h1, h2)
        if sigma is not None:
            return chi, sigma
    return None


def format_tag(tag, group) -> str:
    return "[" + ", ".join(f"(chi={chi.format()}, h={group.format_element(h)})" for chi, h in tag) + "]"


# ---------------------------------------------------------------------------
# Realization of two-block algebras
# ---------------------------------------------------------------------------

def _diagonal_group_algebra(poset, offset: int, chars, sub: Subgroup, field) -> dict:
    """X_u = sum over characters mu of mu(u) e_{mu,mu}: FH as a diagonal algebra."""
    return {
        u: IncidenceElement(poset, {(offset + k, offset + k): mu.value(u, field) for k, mu in enumerate(chars)})
        for u in sub.elements
    }


def realize_two_block(h1: Subgroup, h2: Subgroup, tag, field=None):
    """A poset X and a grading on I(X) isomorphic to [[FH_1, M], [0, FH_2]] with [M] = tag.

    Points of X_k are indexed by the characters of H_k (trivial first).  For
    the tag entry (chi_l, h_l) the relations are the pairs (mu, mu') with
    mu'|_K = mu|_K * chi_l^{-1} on K = H_1 cap H_2; their matrix units sum to
    a generator m_l of degree h_l.  Returns (poset, grading).
    """
    return realize_blocks([h1, h2], {(0, 1): list(tag)} if tag else {}, field)


def realize_blocks(subgroups, tags: dict, field=None):
    """Multi-block version of :func:`realize_two_block`.

    ``tags`` maps block pairs (i, j), i < j, to tag lists.  The union of the
    relations must already be transitive (GradingError otherwise); whether the
    result is a grading is left to :func:`verify_grading`.
    """
    if not subgroups:
        raise GradingError("at least one block is required")
    group = subgroups[0].ambient
    _require_abelian(group)
    field = field or CyclotomicField(lcm(*(h.exponent for h in subgroups)))
    chars = [characters_of(h, field) for h in subgroups]
    offsets = [0]
    for c in chars:
        offsets.append(offsets[-1] + len(c))
    relation_sets = []
    for (i, j), tag in sorted(tags.items()):
        if not 0 <= i < j < len(subgroups):
            raise GradingError(f"block pair {(i + 1, j + 1)} is not increasing")
        inter = subgroup_meet(subgroups[i], subgroups[j])
        join = subgroup_join(subgroups[i], subgroups[j])
        if len(tag) > subgroups[i].order * subgroups[j].order // join.order:
            raise TagTooLarge(f"tag has {len(tag)} entries, at most {inter.order} fit")
        seen = [chi for chi, _ in tag]
        if len(set(seen)) != len(seen):
            raise DuplicateCharacter("tag characters must be pairwise distinct")
        for chi, h in tag:
            if chi.domain != inter:
                raise GradingError("tag characters must live on the intersection of the two subgroups")
            rel = [
                (offsets[i] + a, offsets[j] + b)
                for a, mu in enumerate(chars[i])
                for b, nu in enumerate(chars[j])
                if all((nu.phase(u) - mu.phase(u) + chi.phase(u)) % 1 == 0 for u in inter.elements)
            ]
            relation_sets.append((i, j, h, rel))
    pairs = [p for *_, rel in relation_sets for p in rel]
    poset = from_relation(offsets[-1], pairs)
    if len(poset.strict_pairs) != len(set(pairs)):
        raise GradingError("the requested relations are not transitively closed")
    diag = [
        _diagonal_group_algebra(poset, offsets[k], chars[k], subgroups[k], field) for k in range(len(subgroups))
    ]
    gens = [(u, v) for d in diag for u, v in d.items()]
    for i, j, h, rel in relation_sets:
        m = IncidenceElement(poset, {p: Fraction(1) for p in rel})
        for a, xa in diag[i].items():
            left = ia_mul(xa, m)
            for b, xb in diag[j].items():
                gens.append((group.mul(group.mul(a, h), b), ia_mul(left, xb)))
    return poset, Grading(poset, group, field, gens, name="realization")
