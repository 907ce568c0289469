"""Isomorphism classes of gradings and related structural searches.

Covers the J/J^2 structure, fingerprints, the full isomorphism decision
over an abelian group, good and elementary recognition, the orbit condition
on Aut(X), minimal supports and the multiplicative-basis search.
"""
from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field as dc_field

from .algebra import Grading, IncidenceElement, element_inverse, ia_mul
from .bimodule import bimodule_iso_check, decompose_form
from .canonical import CanonicalForm
from .errors import NonAbelianGroup, SearchBudgetExceeded
from .groups import AbelianGroup, characters_of, subgroup_equal, subgroup_meet
from .linalg import Echelon, rank, rref
from .poset import Poset, iter_isomorphisms, poset_automorphisms

DEFAULT_ISO_BUDGET = int(os.environ.get("INCGRAD_ISO_BUDGET", "1000000"))
DEFAULT_BASIS_BUDGET = int(os.environ.get("INCGRAD_BASIS_BUDGET", "20000"))
DEFAULT_ORBIT_BUDGET = int(os.environ.get("INCGRAD_ORBIT_BUDGET", "100000"))

FOUND = "Found"
NOT_FOUND = "NotFound"
EXHAUSTED = "Exhausted"


@dataclass
class SearchOutcome:
    status: str
    certificate: dict = dc_field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND


@dataclass
class IsoWitness:
    alpha: tuple
    chars: list
    sigmas: dict


def tags_of(cf: CanonicalForm) -> dict:
    """Bimodule decompositions of a canonical form, cached on the object."""
    cached = cf.__dict__.get("_decompositions")
    if cached is None:
        cached = decompose_form(cf)
        cf.__dict__["_decompositions"] = cached
    return cached


# ---------------------------------------------------------------------------
# J_1 and J/J^2
# ---------------------------------------------------------------------------

@dataclass
class J1Report:
    ok: bool
    j1_dim: int
    higher_dim: int
    radical_dim: int
    j2_dim: int
    projection_iso: bool
    powers: list
    message: str = ""


def _span_products(left: list, right: list) -> list:
    return rref(ia_mul(a, b).entries for a in left for b in right)


def j1_decomposition(cf: CanonicalForm):
    """Basis of J_1 (the M_ij over covers of the associated poset) and a check report.

    The report verifies J = J_1 + sum_{m>1} J_1^m as a direct sum and that
    J_1 maps isomorphically onto J/J^2.
    """
    poset = cf.poset
    j1 = []
    for (i, j) in cf.assoc_poset.covers:
        for vecs in cf.bimodules.get((i, j), {}).values():
            j1.extend(vecs)
    j1_vecs = rref(v.entries for v in j1)
    j1_basis = [IncidenceElement._raw(poset, v) for v in j1_vecs]
    powers = []
    current = j1_basis
    higher = Echelon()
    while current:
        current = [IncidenceElement._raw(poset, v) for v in _span_products(current, j1_basis)]
        if not current:
            break
        powers.append(len(current))
        for v in current:
            higher.add(v.entries)
    radical_dim = len(poset.strict_pairs)
    radical = [IncidenceElement.unit(poset, x, y) for x, y in poset.strict_pairs]
    j2 = _span_products(radical, radical)
    total = rank(j1_vecs + higher.basis())
    direct = total == len(j1_vecs) + higher.dim
    spans = total == radical_dim
    projection_iso = len(j1_vecs) == radical_dim - len(j2) and rank(j1_vecs + j2) == radical_dim
    ok = direct and spans and projection_iso
    msg = []
    if not direct:
        msg.append("J_1 meets the higher powers")
    if not spans:
        msg.append(f"J_1 and its powers span {total} of the {radical_dim} radical dimensions")
    if not projection_iso:
        msg.append("J_1 -> J/J^2 is not bijective")
    return j1_basis, J1Report(ok, len(j1_vecs), higher.dim, radical_dim, len(j2), projection_iso, powers, "; ".join(msg))


# ---------------------------------------------------------------------------
# Fingerprints
# ---------------------------------------------------------------------------

def _node_invariant(p: Poset, x: int):
    return (p.heights[x], len(p.up[x]), len(p.down[x]))


def _poset_certificate(p: Poset, budget: int = 50000):
    """Lexicographically least relation matrix over invariant-respecting relabelings.

    Falls back to the sorted invariant multiset when the relabeling space
    exceeds the budget; either way isomorphic posets get equal certificates.
    """
    inv = [_node_invariant(p, x) for x in range(p.n)]
    classes: dict = {}
    for x in range(p.n):
        classes.setdefault(inv[x], []).append(x)
    keys = sorted(classes)
    size = 1
    for k in keys:
        for r in range(2, len(classes[k]) + 1):
            size *= r
    if size > budget:
        return ("invariants", tuple(sorted(inv)))
    best = None
    for perms in itertools.product(*(itertools.permutations(classes[k]) for k in keys)):
        order = [x for block in perms for x in block]
        mat = tuple(tuple(p.leq[a][b] for b in order) for a in order)
        if best is None or mat < best:
            best = mat
    return ("matrix", tuple(keys), best)


def _subgroup_key(sub):
    if hasattr(sub, "canonical_basis"):
        return tuple(sub.canonical_basis)
    return tuple(sorted(sub))


def necessary_invariants(cf: CanonicalForm):
    """Fingerprint that agrees on isomorphic gradings."""
    e = cf.assoc_poset
    inv = [_node_invariant(e, i) for i in range(cf.t)]
    blocks = tuple(sorted((inv[i], _subgroup_key(b.subgroup)) for i, b in enumerate(cf.blocks)))
    abelian = isinstance(cf.group, AbelianGroup)
    decs = tags_of(cf) if abelian else {}
    edges = []
    for (i, j) in cf.bimodules:
        s = decs[(i, j)].s if abelian else None
        edges.append((inv[i], inv[j], _subgroup_key(cf.blocks[i].subgroup),
                      _subgroup_key(cf.blocks[j].subgroup), cf.bimodule_dim(i, j), s))
    return (cf.t, _poset_certificate(e), blocks, tuple(sorted(edges, key=repr)))


def edge_dimensions(cf: CanonicalForm) -> dict:
    return {(i + 1, j + 1): cf.bimodule_dim(i, j) for (i, j) in sorted(cf.bimodules)}


# ---------------------------------------------------------------------------
# Isomorphism decision
# ---------------------------------------------------------------------------

def _twisted_tag(tag_b, shift):
    return [(shift * chi, h) for chi, h in tag_b]


def iso_check(cf_a: CanonicalForm, cf_b: CanonicalForm, budget: int | None = None):
    """An IsoWitness if the two graded algebras are isomorphic, else None.

    Candidate poset isomorphisms alpha of the associated posets must preserve
    the block subgroups.  Characters chi_i of H_i are then chosen block by
    block; for every comparable pair i < j the tag of M_ij must match the tag
    of M'_{alpha(i) alpha(j)} twisted by chi_i * chi_j^{-1} on H_i cap H_j,
    with degrees compared modulo H_i H_j.
    """
    for cf in (cf_a, cf_b):
        if not isinstance(cf.group, AbelianGroup):
            raise NonAbelianGroup("isomorphism decision needs an abelian grading group")
    if cf_a.group != cf_b.group or cf_a.t != cf_b.t:
        return None
    budget = DEFAULT_ISO_BUDGET if budget is None else budget
    t = cf_a.t
    tags_a, tags_b = tags_of(cf_a), tags_of(cf_b)
    subs_a = [b.subgroup for b in cf_a.blocks]
    subs_b = [b.subgroup for b in cf_b.blocks]
    pairs_into = {j: [i for i in range(j) if (i, j) in cf_a.bimodules] for j in range(t)}
    nodes = [0]
    for alpha in iter_isomorphisms(cf_a.assoc_poset, cf_b.assoc_poset, budget):
        if any(not subgroup_equal(subs_a[i], subs_b[alpha[i]]) for i in range(t)):
            continue
        if any(
            len(dec.pairs) != len(tags_b[(alpha[i], alpha[j])].pairs) for (i, j), dec in tags_a.items()
        ):
            continue
        chars_per_block = [characters_of(h) for h in subs_a]
        chosen: list = [None] * t
        sigmas: dict = {}

        def extend(j):
            if j == t:
                return True
            for chi in chars_per_block[j]:
                nodes[0] += 1
                if nodes[0] > budget:
                    raise SearchBudgetExceeded(f"isomorphism search exceeded {budget} nodes")
                chosen[j] = chi
                local = {}
                for i in pairs_into[j]:
                    inter = subgroup_meet(subs_a[i], subs_a[j])
                    shift = chosen[i].restrict(inter) * chi.restrict(inter).inverse()
                    sigma = bimodule_iso_check(
                        tags_a[(i, j)].tag,
                        _twisted_tag(tags_b[(alpha[i], alpha[j])].tag, shift),
                        subs_a[i], subs_a[j],
                    )
                    if sigma is None:
                        break
                    local[(i, j)] = sigma
                else:
                    sigmas.update(local)
                    if extend(j + 1):
                        return True
                    for key in local:
                        sigmas.pop(key, None)
            chosen[j] = None
            return False

        if extend(0):
            return IsoWitness(tuple(alpha), list(chosen), dict(sigmas))
    return None


def verify_iso_witness(cf_a: CanonicalForm, cf_b: CanonicalForm, w: IsoWitness) -> bool:
    """Re-check a witness independently of the search that produced it."""
    t = cf_a.t
    if cf_b.t != t or sorted(w.alpha) != list(range(t)):
        return False
    ea, eb = cf_a.assoc_poset, cf_b.assoc_poset
    for i in range(t):
        if not subgroup_equal(cf_a.blocks[i].subgroup, cf_b.blocks[w.alpha[i]].subgroup):
            return False
        for j in range(t):
            if ea.leq[i][j] != eb.leq[w.alpha[i]][w.alpha[j]]:
                return False
    tags_a, tags_b = tags_of(cf_a), tags_of(cf_b)
    group = cf_a.group
    for (i, j), dec in tags_a.items():
        other = tags_b[(w.alpha[i], w.alpha[j])]
        sigma = w.sigmas.get((i, j))
        if sigma is None or sorted(sigma) != list(range(dec.s)) or other.s != dec.s:
            return False
        inter = dec.intersection
        shift = w.chars[i].restrict(inter) * w.chars[j].restrict(inter).inverse()
        for l, (chi, h) in enumerate(dec.tag):
            chi_b, h_b = other.tag[sigma[l]]
            if chi != shift * chi_b:
                return False
            if not dec.join.contains(group.mul(h, group.inv(h_b))):
                return False
    return True


# ---------------------------------------------------------------------------
# Good and elementary gradings
# ---------------------------------------------------------------------------

@dataclass
class GoodWitness:
    degrees: dict
    conjugator: IncidenceElement


def is_good_equivalent(cf: CanonicalForm):
    """(True, witness) when every block is trivial, else (False, None).

    The witness lists the degree of every matrix unit e_xy of the conjugated
    grading; conjugating back by ``conjugator`` gives a homogeneous basis of
    the original grading.
    """
    if any(b.order != 1 for b in cf.blocks):
        return False, None
    grading = cf.grading
    degrees = {}
    for x, y in cf.poset.pairs:
        deg = grading.degree_of(IncidenceElement.unit(cf.poset, x, y))
        if deg is None:
            raise AssertionError(f"e[{x + 1},{y + 1}] is not homogeneous in a trivial-block canonical form")
        degrees[(x, y)] = deg
    return True, GoodWitness(degrees, cf.conjugator)


def good_degrees(grading: Grading):
    """Degrees of all matrix units if the grading is good, else None."""
    out = {}
    for x, y in grading.poset.pairs:
        deg = grading.degree_of(IncidenceElement.unit(grading.poset, x, y))
        if deg is None:
            return None
        out[(x, y)] = deg
    return out


def is_elementary(data, group=None, poset: Poset | None = None):
    """A sequence (g_1..g_n) with deg e_xy = g_x g_y^{-1}, or None.

    ``data`` is a Grading or a map {(x, y): degree} over the strict pairs of
    ``poset``.  Each connected component of the comparability graph gets its
    own base point with g = 1.
    """
    if isinstance(data, Grading):
        group, poset = data.group, data.poset
        degrees = good_degrees(data)
        if degrees is None:
            return None
    else:
        degrees = data
    n = poset.n
    adj: dict = {x: [] for x in range(n)}
    for (x, y), d in degrees.items():
        if x != y:
            adj[x].append((y, d))
            adj[y].append((x, d))
    g: list = [None] * n
    for root in range(n):
        if g[root] is not None:
            continue
        g[root] = group.identity()
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, d in adj[x]:
                # deg e_xy = g_x g_y^{-1}, with (x, y) in either orientation
                if (x, y) in degrees:
                    want = group.mul(group.inv(d), g[x])
                else:
                    want = group.mul(d, g[x])
                if g[y] is None:
                    g[y] = want
                    queue.append(y)
    for (x, y), d in degrees.items():
        if x == y:
            if group.key(d) != group.key(group.identity()):
                return None
        elif group.key(group.mul(g[x], group.inv(g[y]))) != group.key(d):
            return None
    return [group.key(v) for v in g]


# ---------------------------------------------------------------------------
# Orbit condition
# ---------------------------------------------------------------------------

def verify_orbit_condition(cf: CanonicalForm, poset: Poset | None = None, budget: int | None = None) -> SearchOutcome:
    """Look for A in Aut(X) and lambda_i > 0 with sum_{a in A} a(e_xx) = lambda_i e_i.

    Every member of a valid A must map each block support onto itself, so A
    lies in the block-preserving subgroup B.  Conversely, if B is transitive
    on every support then A = B works with lambda_i = |B| / |D_i| by
    orbit-stabilizer.  The decision is therefore exact without subset search.
    """
    poset = poset or cf.poset
    budget = DEFAULT_ORBIT_BUDGET if budget is None else budget
    try:
        autos = poset_automorphisms(poset, budget)
    except SearchBudgetExceeded as exc:
        return SearchOutcome(EXHAUSTED, {"budget": budget, "reason": str(exc)})
    supports = [frozenset(b.support) for b in cf.blocks]
    preserving = [a for a in autos if all(frozenset(a[x] for x in s) == s for s in supports)]
    lambdas = []
    for i, s in enumerate(supports):
        orbit = {a[min(s)] for a in preserving}
        if orbit != s:
            return SearchOutcome(NOT_FOUND, {
                "block": i,
                "orbit": sorted(orbit),
                "support": sorted(s),
                "automorphisms": len(autos),
                "block_preserving": len(preserving),
            })
        lambdas.append(len(preserving) // len(s))
    # direct re-verification of the defining identity
    for i, s in enumerate(supports):
        for x in s:
            counts: dict = {}
            for a in preserving:
                counts[a[x]] = counts.get(a[x], 0) + 1
            if set(counts) != s or set(counts.values()) != {lambdas[i]}:
                raise AssertionError("orbit sum is not a multiple of the block unit")
    return SearchOutcome(FOUND, {"subset": preserving, "lambdas": lambdas, "automorphisms": len(autos)})


# ---------------------------------------------------------------------------
# Supports and multiplicative bases
# ---------------------------------------------------------------------------

def min_support(vectors) -> int:
    """Fewest nonzero entries of a nonzero vector in the span of ``vectors``.

    Support sets are tried by ascending size: a coordinate set S carries a
    nonzero vector exactly when dropping the coordinates in S lowers the rank.
    """
    vecs = [v.entries if isinstance(v, IncidenceElement) else v for v in vectors]
    basis = rref(vecs)
    if not basis:
        raise ValueError("min_support of the zero space")
    coords = sorted({k for v in basis for k in v})
    dim = len(basis)
    upper = min(len(v) for v in basis)
    for size in range(1, upper):
        for subset in itertools.combinations(coords, size):
            keep = set(subset)
            projected = [{k: c for k, c in v.items() if k not in keep} for v in basis]
            if rank(projected) < dim:
                return size
    return upper


def _direction(vec: dict) -> tuple:
    lead = min(vec)
    c = vec[lead]
    return tuple(sorted((k, v / c) for k, v in vec.items()))


def _adapted_components(cf: CanonicalForm) -> dict:
    """Homogeneous pieces (i, j, degree) -> basis of the canonical block decomposition."""
    comps: dict = {}
    for i, b in enumerate(cf.blocks):
        for deg, vec in b.basis.items():
            comps[(i, i, deg)] = [vec]
    for (i, j), pieces in cf.bimodules.items():
        for deg, vecs in pieces.items():
            comps[(i, j, deg)] = list(vecs)
    return comps


def _forcing_fixpoint(cf: CanonicalForm):
    """Propagate forced directions of a block-adapted multiplicative basis.

    Returns (forced, origins, contradiction).  A piece of dimension 1 forces
    its basis line.  Any nonzero product of forced vectors must be a multiple
    of a basis vector of the target piece, so the distinct product directions
    landing in one piece must stay linearly independent.
    """
    comps = _adapted_components(cf)
    group = cf.group
    forced = {key: {_direction(vs[0].entries): vs[0].entries} for key, vs in comps.items() if len(vs) == 1}
    origins: dict = {key: {d: ("rigid",) for d in forced[key]} for key in forced}
    changed = True
    while changed:
        changed = False
        keys = sorted(forced, key=repr)
        for ka in keys:
            i, k, ga = ka
            for kb in keys:
                k2, j, gb = kb
                if k2 != k:
                    continue
                target = (i, j, group.key(group.mul(ga, gb)))
                for da, va in list(forced[ka].items()):
                    for db, vb in list(forced[kb].items()):
                        prod = ia_mul(IncidenceElement._raw(cf.poset, va), IncidenceElement._raw(cf.poset, vb))
                        if not prod:
                            continue
                        d = _direction(prod.entries)
                        bucket = forced.setdefault(target, {})
                        if d in bucket:
                            continue
                        dim = len(comps.get(target, []))
                        candidate = list(bucket.values()) + [prod.entries]
                        origins.setdefault(target, {})[d] = (ka, kb)
                        if rank(candidate) < len(candidate) or len(candidate) > dim:
                            return forced, origins, (target, candidate, origins[target])
                        bucket[d] = prod.entries
                        changed = True
    return forced, origins, None


def _chain_of(origin):
    """Block chain (i, k, j) of the product that forced a direction."""
    if origin == ("rigid",):
        return None
    ka, kb = origin
    return (ka[0], ka[1], kb[1])


def _is_multiplicative(basis: list) -> bool:
    dirs = {_direction(v.entries) for v in basis}
    for a in basis:
        for b in basis:
            p = ia_mul(a, b)
            if p and _direction(p.entries) not in dirs:
                return False
    return True


def search_multiplicative_basis(grading: Grading, budget: int | None = None, cf: CanonicalForm | None = None) -> SearchOutcome:
    """Look for a homogeneous basis closed under products up to scalars.

    Phase (a) propagates forced directions through the canonical block
    decomposition and reports NotFound on a contradiction; this is definitive
    for bases adapted to that decomposition.  Phase (b) tries bases built
    from forced directions, echelon vectors and sums/differences of pairs of
    them, up to ``budget`` candidate bases.
    """
    from .canonical import canonicalize

    budget = DEFAULT_BASIS_BUDGET if budget is None else budget
    cf = cf or canonicalize(grading)
    forced, _, contradiction = _forcing_fixpoint(cf)
    if contradiction is not None:
        target, vecs, orig = contradiction
        i, j, deg = target
        supports = sorted(len(v) for v in vecs)
        chains = sorted({c for c in (_chain_of(o) for o in orig.values()) if c})
        return SearchOutcome(NOT_FOUND, {
            "phase": "obstruction",
            "target": (i + 1, j + 1, cf.group.format_element(deg)),
            "target_dim": len(cf.bimodules.get((i, j), {}).get(deg, [])),
            "forced_supports": supports,
            "chains": [tuple(x + 1 for x in c) for c in chains],
            "component_min_support": min_support(cf.bimodules[(i, j)][deg]) if (i, j) in cf.bimodules else None,
        })
    comps = _adapted_components(cf)
    choices = []
    for key in sorted(comps, key=repr):
        vecs = comps[key]
        dim = len(vecs)
        fixed = list(forced.get(key, {}).values())
        if len(fixed) == dim:
            choices.append([fixed])
            continue
        pool = {}
        for v in fixed + [v.entries for v in vecs]:
            pool.setdefault(_direction(v), v)
        base = list(pool.values())
        for a, b in itertools.combinations(base, 2):
            for sgn in (1, -1):
                s = {k: a.get(k, 0) + sgn * b.get(k, 0) for k in set(a) | set(b)}
                s = {k: c for k, c in s.items() if c}
                if s:
                    pool.setdefault(_direction(s), s)
        free = [v for d, v in pool.items() if d not in {_direction(f) for f in fixed}]
        options = []
        for extra in itertools.combinations(free, dim - len(fixed)):
            cand = fixed + list(extra)
            if rank(cand) == dim:
                options.append(cand)
        choices.append(options)
    tried = 0
    for combo in itertools.product(*choices):
        tried += 1
        if tried > budget:
            return SearchOutcome(EXHAUSTED, {"phase": "search", "budget": budget})
        basis = [IncidenceElement._raw(cf.poset, v) for part in combo for v in part]
        if _is_multiplicative(basis):
            m = cf.conjugator
            minv = element_inverse(m)
            original = [ia_mul(ia_mul(m, b), minv) for b in basis]
            return SearchOutcome(FOUND, {"phase": "search", "basis": basis, "original_basis": original, "tried": tried})
    return SearchOutcome(EXHAUSTED, {"phase": "search", "budget": budget, "tried": tried, "space_exhausted": True})
