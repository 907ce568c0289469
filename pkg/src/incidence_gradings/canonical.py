"""Canonical triangular form of a grading.

Pipeline: split the unit into minimal homogeneous idempotents (conjugating
so they become diagonal), recognize each diagonal block as a group algebra
FH_i with a normalized basis, order the blocks by the associated poset, and
collect the off-diagonal bimodules M_ij = e_i I(X) e_j.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import (
    Grading,
    IncidenceElement,
    conjugate_grading,
    format_element,
    ia_mul,
    idempotent_from,
    simultaneous_diagonalize,
    verify_radical_graded,
)
from .errors import LinkMismatch, NotAPartialOrder, NotDivisionBlock, NotRadicalGraded
from .groups import AbelianGroup, Subgroup
from .linalg import rref
from .poset import Poset, dot_export, from_relation


class Minimal:
    """Marker returned by :func:`split_degree_one` when no proper refinement exists."""

    def __repr__(self):
        return "Minimal"


MINIMAL = Minimal()


def _block_component(grading: Grading, deg, left, right) -> list[dict]:
    return rref(v.mask(left, right).entries for v in grading.components.get(deg, ()))


def split_degree_one(grading: Grading, e: IncidenceElement):
    """Return MINIMAL, or a homogeneous idempotent e' with e'I(X) strictly inside eI(X).

    ``e`` must be a diagonal homogeneous idempotent of identity degree.  The
    block eI(X)e is minimal exactly when the diagonal parts of its identity
    component span a line; otherwise an element with two distinct diagonal
    values is pushed through a Lagrange polynomial without constant term and
    then through :func:`idempotent_from`.
    """
    if not e.is_diagonal():
        raise ValueError("split_degree_one expects a diagonal idempotent")
    support = frozenset(e.diagonal())
    first = min(support)
    ident = grading.identity_degree()
    comp = _block_component(grading, ident, support, support)
    chosen = None
    for vec in comp:
        diag = {x: v for (x, y), v in vec.items() if x == y}
        ref = diag.get(first, 0)
        if any(diag.get(x, 0) != ref for x in support):
            chosen = IncidenceElement._raw(e.poset, vec)
            break
    if chosen is None:
        return MINIMAL
    x = chosen
    if not x[(first, first)]:
        x = x + e
    diag = x.diagonal()
    alpha = diag[first]
    others = sorted({diag.get(p, 0) for p in support} - {alpha, 0}, key=_scalar_key)
    # p(l) = l * prod(l - b) / (alpha * prod(alpha - b)): p(alpha)=1, p(b)=0, p(0)=0
    y = x
    denom = alpha
    for b in others:
        y = ia_mul(y, x) - y.scale(b)
        denom = denom * (alpha - b)
    y = y.scale(1 / denom if not isinstance(denom, int) else Fraction(1, denom))
    return idempotent_from(y)


def _scalar_key(v):
    return str(v)


@dataclass
class Block:
    """A diagonal block D_i = e_i I(X) e_i recognized as the group algebra FH_i."""

    support: tuple
    subgroup: object
    basis: dict
    unit: IncidenceElement
    raw_cocycle_trivial: bool = True

    @property
    def size(self) -> int:
        return len(self.support)

    @property
    def order(self) -> int:
        return len(self.basis)

    def degrees(self) -> list:
        return list(self.basis)


@dataclass
class CanonicalForm:
    blocks: list
    assoc_poset: Poset
    bimodules: dict
    conjugator: IncidenceElement
    grading: Grading
    original: Grading
    element_order: list = dc_field(default_factory=list)
    link_table: dict = dc_field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def group(self):
        return self.grading.group

    @property
    def poset(self) -> Poset:
        return self.grading.poset

    def bimodule_dim(self, i: int, j: int) -> int:
        return sum(len(v) for v in self.bimodules.get((i, j), {}).values())

    def block_of(self) -> dict:
        return {x: i for i, b in enumerate(self.blocks) for x in b.support}


# ---------------------------------------------------------------------------
# Minimal idempotents
# ---------------------------------------------------------------------------

def minimal_idempotent_family(grading: Grading):
    """Orthogonal minimal homogeneous idempotents summing to 1, made diagonal.

    Returns (supports, conjugated grading, conjugator M) where the conjugated
    grading is M^{-1} A_g M and each e_i is the diagonal idempotent of its support.
    """
    ok, _ = verify_radical_graded(grading)
    if not ok:
        raise NotRadicalGraded("the Jacobson radical is not a graded subspace")
    poset = grading.poset
    current = grading
    total = IncidenceElement.identity(poset)
    family = [frozenset(range(poset.n))] if poset.n else []
    done: list = []
    while family:
        support = family.pop(0)
        e = IncidenceElement.diagonal_of(poset, support)
        piece = split_degree_one(current, e)
        if piece is MINIMAL:
            done.append(support)
            continue
        rest = e - piece
        others = [IncidenceElement.diagonal_of(poset, s) for s in family + done]
        if piece.is_diagonal():
            m = None
        else:
            m = simultaneous_diagonalize([piece, rest] + others)
        if m is not None:
            current = conjugate_grading(current, m)
            total = ia_mul(total, m)
        a = frozenset(piece.diagonal())
        family[:0] = [a, support - a]
    return sorted((tuple(sorted(s)) for s in done), key=lambda s: s[0]), current, total


# ---------------------------------------------------------------------------
# Diagonal blocks
# ---------------------------------------------------------------------------

def recognize_group_algebra(grading: Grading, support) -> Block:
    """Recognize D = eI(X)e as FH with a basis satisfying X_u X_v = X_{uv}."""
    support = tuple(sorted(support))
    sset = frozenset(support)
    poset = grading.poset
    if not poset.is_antichain(support):
        raise NotDivisionBlock(f"block support {[x + 1 for x in support]} is not an antichain")
    x0 = support[0]
    group = grading.group
    raw = {}
    for deg in grading.components:
        comp = _block_component(grading, deg, sset, sset)
        if len(comp) > 1:
            raise NotDivisionBlock(f"component of degree {group.format_element(deg)} has dimension {len(comp)}")
        if comp:
            raw[deg] = IncidenceElement._raw(poset, comp[0])
    if len(raw) != len(support):
        raise NotDivisionBlock(f"block has {len(raw)} nonzero components but {len(support)} points")
    basis = {}
    for deg, vec in raw.items():
        lead = vec[(x0, x0)]
        if not lead:
            raise NotDivisionBlock("homogeneous block element vanishes at the base point")
        basis[deg] = vec.scale(1 / lead if not isinstance(lead, int) else Fraction(1, lead))
    degs = list(basis)
    cocycle_trivial = True
    for u in degs:
        for v in degs:
            uv = group.key(group.mul(u, v))
            if uv not in basis:
                raise NotDivisionBlock("block support is not closed under the group law")
            if ia_mul(basis[u], basis[v]) != basis[uv]:
                raise NotDivisionBlock("normalized block basis does not multiply like the group")
            ru, rv, ruv = raw[u], raw[v], raw[uv]
            prod = ia_mul(ru, rv)
            if prod != ruv.scale(prod[(x0, x0)] / ruv[(x0, x0)]) or prod[(x0, x0)] != ruv[(x0, x0)]:
                cocycle_trivial = False
    ident = group.key(group.identity())
    if ident not in basis or basis[ident] != IncidenceElement.diagonal_of(poset, support):
        raise NotDivisionBlock("identity component is not spanned by the block unit")
    if isinstance(group, AbelianGroup):
        sub = Subgroup(group, degs)
        if sub.order != len(degs) or any(not sub.contains(d) for d in degs):
            raise NotDivisionBlock("block support is not a finite subgroup")
    else:
        sub = frozenset(degs)
    ordered = dict(sorted(basis.items(), key=lambda kv: _deg_key(kv[0])))
    return Block(support, sub, ordered, IncidenceElement.diagonal_of(poset, support), cocycle_trivial)


def _deg_key(deg):
    return deg if isinstance(deg, tuple) else (deg,)


# ---------------------------------------------------------------------------
# Associated poset and links
# ---------------------------------------------------------------------------

def associated_poset(supports, poset: Poset):
    """Order blocks by i <| j iff e_i I(X) e_j != 0.

    Returns (ordered supports, Poset on the blocks).  Blocks are relabeled by
    the linear extension that prefers the block with the smallest point.
    """
    t = len(supports)
    rel = [[any(poset.leq[x][y] for x in supports[i] for y in supports[j]) for j in range(t)] for i in range(t)]
    for i in range(t):
        for j in range(t):
            if i != j and rel[i][j] and rel[j][i]:
                raise NotAPartialOrder(f"blocks {i + 1} and {j + 1} are related both ways")
            if rel[i][j]:
                for k in range(t):
                    if rel[j][k] and not rel[i][k]:
                        raise NotAPartialOrder("block relation is not transitive")
    indeg = [sum(1 for i in range(t) if i != j and rel[i][j]) for j in range(t)]
    heap = [(min(supports[j]), j) for j in range(t) if indeg[j] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(i)
        for j in range(t):
            if i != j and rel[i][j]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, (min(supports[j]), j))
    if len(order) != t:
        raise NotAPartialOrder("block relation has a cycle")
    pos = {b: k for k, b in enumerate(order)}
    pairs = [(pos[i], pos[j]) for i in range(t) for j in range(t) if i != j and rel[i][j]]
    return [supports[i] for i in order], from_relation(t, pairs)


def link_number(poset: Poset, left, right) -> int:
    return sum(1 for x in left for y in right if poset.leq[x][y])


def link_check(supports, poset: Poset) -> dict:
    """Table of link numbers; raises LinkMismatch if the equalities fail."""
    table = {}
    for i, si in enumerate(supports):
        for j, sj in enumerate(supports):
            if i == j:
                continue
            total = link_number(poset, si, sj)
            per_x = [link_number(poset, [x], sj) for x in si]
            per_y = [link_number(poset, si, [y]) for y in sj]
            table[(i, j)] = (total, per_x, per_y)
            if any(total != len(si) * v for v in per_x) or any(total != v * len(sj) for v in per_y):
                raise LinkMismatch(
                    f"link numbers of blocks {i + 1},{j + 1}: total {total}, per point {per_x}, {per_y}"
                )
    return table


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def bimodule_components(grading: Grading, left, right) -> dict:
    out = {}
    lset, rset = frozenset(left), frozenset(right)
    for deg in grading.components:
        comp = _block_component(grading, deg, lset, rset)
        if comp:
            out[deg] = [IncidenceElement._raw(grading.poset, v) for v in comp]
    return out


def canonicalize(grading: Grading) -> CanonicalForm:
    supports, conj, m = minimal_idempotent_family(grading)
    ordered, eposet = associated_poset(supports, grading.poset)
    blocks = [recognize_group_algebra(conj, s) for s in ordered]
    links = link_check(ordered, grading.poset)
    bimods = {}
    for i in range(len(blocks)):
        for j in range(len(blocks)):
            if i != j and eposet.leq[i][j]:
                comps = bimodule_components(conj, blocks[i].support, blocks[j].support)
                if comps:
                    bimods[(i, j)] = comps
    order = [x for b in blocks for x in b.support]
    return CanonicalForm(blocks, eposet, bimods, m, conj, grading, order, links)


def describe_subgroup(sub, group) -> str:
    if isinstance(sub, Subgroup):
        return sub.describe()
    return "{" + ", ".join(group.format_element(d) for d in sorted(sub)) + "}"


def format_canonical(cf: CanonicalForm) -> list[str]:
    """Line-oriented key-value report of a canonical form."""
    group = cf.group
    field = cf.grading.field
    lines = [f"t={cf.t}", f"n={cf.poset.n}"]
    for i, b in enumerate(cf.blocks):
        pts = ",".join(str(x + 1) for x in b.support)
        lines.append(f"block.{i + 1}.support={pts}")
        lines.append(f"block.{i + 1}.subgroup={describe_subgroup(b.subgroup, group)}")
        lines.append(f"block.{i + 1}.order={b.order}")
        for deg, vec in b.basis.items():
            lines.append(f"block.{i + 1}.basis.{group.format_element(deg)}={format_element(vec, field)}")
    covers = "; ".join(f"({a + 1},{c + 1})" for a, c in cf.assoc_poset.covers)
    lines.append(f"assoc_poset.covers={covers}")
    for (i, j) in sorted(cf.bimodules):
        lines.append(f"bimodule.{i + 1}.{j + 1}.dim={cf.bimodule_dim(i, j)}")
        for deg, vecs in cf.bimodules[(i, j)].items():
            lines.append(f"bimodule.{i + 1}.{j + 1}.component.{group.format_element(deg)}.dim={len(vecs)}")
    m = cf.conjugator
    identity = m == IncidenceElement.identity(cf.poset)
    lines.append("conjugator=identity" if identity else f"conjugator={format_element(m, field)}")
    return lines


def assoc_dot(cf: CanonicalForm) -> str:
    labels = [f"FH{i + 1} [{describe_subgroup(b.subgroup, cf.group)}]" for i, b in enumerate(cf.blocks)]
    return dot_export(cf.assoc_poset, labels, name="associated_poset")
