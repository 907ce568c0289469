"""Grading groups: finitely generated abelian groups, their subgroups and characters,
plus finite groups given by a multiplication table.

Abelian groups are written additively: an element of ``Z_{d_1} x ... x Z_{d_r}``
is a tuple of integers, reduced modulo ``d_i`` when ``d_i > 0`` (``d_i = 0``
marks an infinite cyclic factor).
"""
from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import cached_property

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import AmbientMismatch, GradingError, InsufficientRoots, NotASubgroup, ParseError


# ---------------------------------------------------------------------------
# Integer lattices
# ---------------------------------------------------------------------------

def row_hnf(rows, ncols: int) -> list[tuple[int, ...]]:
    """Row Hermite normal form: echelon from the left, positive pivots,
    entries above each pivot reduced into ``[0, pivot)``.  Zero rows dropped."""
    rows = [list(r) for r in rows if any(r)]
    out: list[tuple[int, list[int]]] = []
    for col in range(ncols):
        nz = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            keep = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                if r[col]:
                    keep.append(r)
                elif any(r):
                    rest.append(r)
            nz = keep
        if nz:
            p = nz[0]
            if p[col] < 0:
                p = [-a for a in p]
            out.append((col, p))
        rows = rest
    for i in range(len(out)):
        ci, pi = out[i]
        for j in range(i):
            cj, pj = out[j]
            q = pj[ci] // pi[ci]
            if q:
                out[j] = (cj, [a - q * b for a, b in zip(pj, pi)])
    return [tuple(p) for _, p in out]


def lattice_intersection(a, b, ncols: int) -> list[tuple[int, ...]]:
    """HNF basis of the intersection of two integer row lattices."""
    rows = [list(r) + list(r) for r in a] + [list(r) + [0] * ncols for r in b]
    basis = row_hnf(rows, 2 * ncols)
    return row_hnf([r[ncols:] for r in basis if not any(r[:ncols])], ncols)


# ---------------------------------------------------------------------------
# Abelian groups
# ---------------------------------------------------------------------------

class AbelianGroup:
    """Z_{d_1} x ... x Z_{d_r}; ``d_i = 0`` is an infinite cyclic factor."""

    is_abelian = True

    def __init__(self, moduli):
        moduli = tuple(int(d) for d in moduli)
        if any(d < 0 or d == 1 for d in moduli):
            raise ValueError(f"moduli must be 0 or >= 2, got {moduli}")
        self.moduli = moduli

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def __eq__(self, other):
        return isinstance(other, AbelianGroup) and other.moduli == self.moduli

    def __hash__(self):
        return hash(("abelian", self.moduli))

    def __repr__(self):
        return f"AbelianGroup({list(self.moduli)})"

    def __str__(self):
        if not self.moduli:
            return "1"
        return " x ".join("Z" if d == 0 else f"Z{d}" for d in self.moduli)

    def reduce(self, coords) -> tuple[int, ...]:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise ValueError(f"element {coords} has wrong length for {self}")
        return tuple(c % d if d else c for c, d in zip(coords, self.moduli))

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def mul(self, a, b) -> tuple[int, ...]:
        return self.reduce(x + y for x, y in zip(a, b))

    def inv(self, a) -> tuple[int, ...]:
        return self.reduce(-x for x in a)

    def power(self, a, k: int) -> tuple[int, ...]:
        return self.reduce(k * x for x in a)

    def key(self, a):
        return tuple(a)

    def order_of(self, a):
        """Order of an element, or 0 when infinite."""
        a = self.reduce(a)
        m = 1
        for x, d in zip(a, self.moduli):
            if d == 0:
                if x:
                    return 0
            else:
                m = m * (d // math.gcd(d, x)) // math.gcd(m, d // math.gcd(d, x))
        return m

    def parse_element(self, text: str, line=None) -> tuple[int, ...]:
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        parts = [p.strip() for p in body.split(",")] if body.strip() else []
        try:
            coords = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"bad group element {text!r}", line) from None
        if len(coords) != self.rank:
            raise ParseError(f"group element {text!r} needs {self.rank} coordinates", line)
        return self.reduce(coords)

    def format_element(self, a) -> str:
        return "(" + ",".join(str(x) for x in a) + ")"

    def relation_rows(self) -> list[tuple[int, ...]]:
        rows = []
        for i, d in enumerate(self.moduli):
            if d:
                rows.append(tuple(d if j == i else 0 for j in range(self.rank)))
        return rows

    def whole(self) -> "Subgroup":
        return Subgroup(self, [tuple(1 if j == i else 0 for j in range(self.rank)) for i in range(self.rank)])

    def trivial(self) -> "Subgroup":
        return Subgroup(self, [])

    def subgroup(self, generators) -> "Subgroup":
        return Subgroup(self, generators)

    def elements(self):
        if 0 in self.moduli:
            raise ValueError(f"{self} is infinite")
        return [tuple(c) for c in itertools.product(*(range(d) for d in self.moduli))]


def parse_group(text: str, line=None):
    """Parse ``Z2 x Z2 x Z`` (abelian) or ``<n>; <n*n indices>`` for a table group."""
    text = text.strip()
    if text in ("", "1", "trivial"):
        return AbelianGroup(())
    moduli = []
    for part in re.split(r"\s*[x×]\s*", text):
        m = re.fullmatch(r"Z(\d*)", part.strip())
        if not m:
            raise ParseError(f"bad group factor {part!r}", line)
        moduli.append(int(m.group(1)) if m.group(1) else 0)
    return AbelianGroup(moduli)


class Subgroup:
    """A subgroup of an :class:`AbelianGroup`, canonicalized by the HNF of
    its generators together with the relation rows of the ambient group."""

    def __init__(self, ambient: AbelianGroup, generators):
        self.ambient = ambient
        gens = [ambient.reduce(g) for g in generators]
        self.generators = tuple(g for g in gens if any(g))
        self.canonical_basis = tuple(row_hnf(list(self.generators) + ambient.relation_rows(), ambient.rank))

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        _same_ambient(self, other)
        return self.canonical_basis == other.canonical_basis

    def __hash__(self):
        return hash((self.ambient, self.canonical_basis))

    def __repr__(self):
        return f"Subgroup({self.ambient!r}, {list(self.generators)!r})"

    def describe(self) -> str:
        if self.is_finite:
            inv = self.invariant_factors
            if not inv:
                return "1"
            return " x ".join(f"Z{m}" for m in inv)
        return "<" + ", ".join(self.ambient.format_element(g) for g in self.generators) + ">"

    # -- basic properties ---------------------------------------------------
    @cached_property
    def is_finite(self) -> bool:
        return all(
            g[i] == 0 for g in self.generators for i, d in enumerate(self.ambient.moduli) if d == 0
        )

    @cached_property
    def order(self) -> int:
        if not self.is_finite:
            return 0
        size = 1
        for d in self.ambient.moduli:
            if d:
                size *= d
        pivots = 1
        for row in self.canonical_basis:
            lead = next(x for x in row if x)
            pivots *= lead
        return size // pivots

    def contains(self, g) -> bool:
        g = self.ambient.reduce(g)
        if not any(g):
            return True
        extended = row_hnf(list(self.canonical_basis) + [g], self.ambient.rank)
        return tuple(extended) == self.canonical_basis

    def __contains__(self, g) -> bool:
        return self.contains(g)

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        _same_ambient(self, other)
        return all(other.contains(g) for g in self.generators)

    @cached_property
    def elements(self) -> list[tuple[int, ...]]:
        if not self.is_finite:
            raise ValueError("subgroup is infinite")
        seen = {self.ambient.identity()}
        frontier = [self.ambient.identity()]
        gens = list(self.canonical_basis)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.ambient.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    # -- structure -----------------------------------------------------------
    @cached_property
    def _snf(self):
        """Invariant factors (all > 1) and the matching generators of H."""
        if not self.is_finite:
            raise ValueError("subgroup is infinite")
        gens = [g for g in self.canonical_basis]
        k = len(gens)
        if k == 0:
            return (), ()
        rel = self.ambient.relation_rows()
        r = self.ambient.rank
        # left kernel of [gens; relations] modulo nothing: integer c with sum c_j g_j = 0 in G
        aug = [list(g) + [1 if j == i else 0 for j in range(k)] for i, g in enumerate(gens)]
        aug += [list(row) + [0] * k for row in rel]
        basis = row_hnf(aug, r + k)
        kernel = [row[r:] for row in basis if not any(row[:r])]
        mat = Matrix(kernel)
        smith, _, v = smith_normal_decomp(mat)
        vinv = v.inv()
        factors, new_gens = [], []
        for i in range(k):
            s = abs(int(smith[i, i])) if i < smith.rows else 0
            if s == 1:
                continue
            if s == 0:
                raise GradingError("finite subgroup has an infinite relation module")
            g = self.ambient.identity()
            for j in range(k):
                c = int(vinv[i, j])
                if c:
                    g = self.ambient.mul(g, self.ambient.power(gens[j], c))
            factors.append(s)
            new_gens.append(g)
        return tuple(factors), tuple(new_gens)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self._snf[0]

    @property
    def invariant_generators(self) -> tuple:
        return self._snf[1]

    @cached_property
    def exponent(self) -> int:
        e = 1
        for m in self.invariant_factors:
            e = e * m // math.gcd(e, m)
        return e

    @cached_property
    def coordinates(self) -> dict:
        """Element -> coordinate vector on the invariant-factor generators."""
        table = {}
        for ys in itertools.product(*(range(m) for m in self.invariant_factors)):
            g = self.ambient.identity()
            for y, b in zip(ys, self.invariant_generators):
                g = self.ambient.mul(g, self.ambient.power(b, y))
            table[g] = ys
        if len(table) != self.order:
            raise GradingError("invariant-factor basis does not enumerate the subgroup")
        return table


def _same_ambient(a, b) -> None:
    if a.ambient != b.ambient:
        raise AmbientMismatch(f"{a.ambient} vs {b.ambient}")


def subgroup_join(a: Subgroup, b: Subgroup) -> Subgroup:
    _same_ambient(a, b)
    return Subgroup(a.ambient, list(a.generators) + list(b.generators))


def subgroup_meet(a: Subgroup, b: Subgroup) -> Subgroup:
    _same_ambient(a, b)
    rank = a.ambient.rank
    return Subgroup(a.ambient, lattice_intersection(a.canonical_basis, b.canonical_basis, rank))


def subgroup_equal(a: Subgroup, b: Subgroup) -> bool:
    _same_ambient(a, b)
    return a.canonical_basis == b.canonical_basis


def coset_equal(g, h, subgroup: Subgroup) -> bool:
    amb = subgroup.ambient
    if len(g) != amb.rank or len(h) != amb.rank:
        raise AmbientMismatch("element does not belong to the subgroup's ambient group")
    return subgroup.contains(amb.mul(g, amb.inv(h)))


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

class Character:
    """A homomorphism from a finite subgroup H into the roots of unity.

    Values are stored as phases in Q/Z: chi(h) = exp(2 pi i * phase(h)),
    realized in a field as zeta_E^(E * phase).  ``exponents`` are the values
    on the invariant-factor generators of H relative to E = exp(H).
    """

    __slots__ = ("domain", "phases", "exponents")

    def __init__(self, domain: Subgroup, phases: dict):
        self.domain = domain
        self.phases = {h: Fraction(p) % 1 for h, p in phases.items()}
        e = domain.exponent
        self.exponents = tuple(int(self.phases[b] * e) for b in domain.invariant_generators)

    @classmethod
    def from_exponents(cls, domain: Subgroup, exponents) -> "Character":
        e = domain.exponent
        exps = tuple(exponents)
        if len(exps) != len(domain.invariant_factors):
            raise ValueError("exponent vector length does not match the invariant factors")
        for a, m in zip(exps, domain.invariant_factors):
            if (a * m) % e:
                raise ValueError(f"exponent {a} is not a multiple of {e // m}")
        phases = {
            h: Fraction(sum(a * y for a, y in zip(exps, ys)), e) for h, ys in domain.coordinates.items()
        }
        return cls(domain, phases)

    @classmethod
    def trivial(cls, domain: Subgroup) -> "Character":
        return cls(domain, {h: 0 for h in domain.elements})

    def phase(self, h) -> Fraction:
        return self.phases[self.domain.ambient.reduce(h)]

    def value(self, h, field):
        p = self.phase(h)
        return field.zeta(p.denominator, p.numerator)

    def is_trivial(self) -> bool:
        return not any(self.phases.values())

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        return self.domain == other.domain and self.phases == other.phases

    def __hash__(self):
        return hash((self.domain, tuple(sorted(self.phases.items()))))

    def __mul__(self, other: "Character") -> "Character":
        if self.domain != other.domain:
            raise AmbientMismatch("characters on different subgroups")
        return Character(self.domain, {h: self.phases[h] + other.phases[h] for h in self.phases})

    def inverse(self) -> "Character":
        return Character(self.domain, {h: -p for h, p in self.phases.items()})

    def restrict(self, sub: Subgroup) -> "Character":
        if not sub.is_subgroup_of(self.domain):
            raise NotASubgroup("restriction target is not a subgroup of the domain")
        return Character(sub, {h: self.phases[h] for h in sub.elements})

    def format(self) -> str:
        return "(" + ",".join(str(a) for a in self.exponents) + ")"

    def __repr__(self):
        return f"Character({self.domain.describe()}, exponents={self.exponents})"


def characters_of(subgroup: Subgroup, field=None) -> list[Character]:
    """All |H| characters, in lexicographic order of exponent vectors (trivial first)."""
    if not subgroup.is_finite:
        raise ValueError("characters need a finite subgroup")
    if field is not None and not field.has_roots(subgroup.exponent):
        raise InsufficientRoots(f"field lacks a primitive {subgroup.exponent}-th root of unity")
    e = subgroup.exponent
    ranges = [range(0, e, e // m) for m in subgroup.invariant_factors]
    return [Character.from_exponents(subgroup, exps) for exps in itertools.product(*ranges)]


def restrict_character(chi: Character, sub: Subgroup) -> Character:
    return chi.restrict(sub)


def extend_character(sub: Subgroup, big: Subgroup, chi: Character) -> Character:
    """Extension of ``chi`` from ``sub`` to ``big`` with the lexicographically
    smallest exponent vector on the invariant-factor generators of ``big``."""
    if not sub.is_subgroup_of(big):
        raise NotASubgroup("extension source is not a subgroup of the target")
    if chi.domain != sub:
        raise AmbientMismatch("character is not defined on the given subgroup")
    for cand in characters_of(big):
        if all(cand.phases[h] == chi.phases[h] for h in sub.elements):
            return cand
    raise GradingError("no extension found; characters of finite abelian groups always extend")


# ---------------------------------------------------------------------------
# Finite groups by table
# ---------------------------------------------------------------------------

class FiniteGroupTable:
    """A finite group given by its multiplication table on indices 0..n-1."""

    def __init__(self, table):
        table = [list(map(int, row)) for row in table]
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise ValueError("group table must be square and nonempty")
        if any(not 0 <= x < n for row in table for x in row):
            raise ValueError("group table entries out of range")
        ident = [e for e in range(n) if all(table[e][a] == a and table[a][e] == a for a in range(n))]
        if not ident:
            raise ValueError("group table has no identity")
        self.n = n
        self.table = tuple(tuple(row) for row in table)
        self.identity_index = ident[0]
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise ValueError(f"group table is not associative at ({a},{b},{c})")
        self._inv = []
        for a in range(n):
            inv = [b for b in range(n) if table[a][b] == self.identity_index]
            if not inv or table[inv[0]][a] != self.identity_index:
                raise ValueError(f"element {a} has no inverse")
            self._inv.append(inv[0])
        self.is_abelian = all(table[a][b] == table[b][a] for a in range(n) for b in range(n))

    def __eq__(self, other):
        return isinstance(other, FiniteGroupTable) and other.table == self.table

    def __hash__(self):
        return hash(("table", self.table))

    def __str__(self):
        return f"table group of order {self.n}"

    def identity(self) -> int:
        return self.identity_index

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity_index
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def key(self, a):
        return a

    def order_of(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity_index:
            x = self.mul(x, a)
            k += 1
        return k

    def elements(self) -> list[int]:
        return list(range(self.n))

    def parse_element(self, text: str, line=None) -> int:
        body = text.strip().strip("()").strip()
        try:
            a = int(body)
        except ValueError:
            raise ParseError(f"bad table-group element {text!r}", line) from None
        if not 0 <= a < self.n:
            raise ParseError(f"table-group element {a} out of range", line)
        return a

    def format_element(self, a: int) -> str:
        return f"({a})"

    def format_spec(self) -> str:
        return f"{self.n}; " + " ".join(str(x) for row in self.table for x in row)

    def subgroup_generated(self, gens) -> frozenset:
        seen = {self.identity_index}
        frontier = [self.identity_index]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)


def parse_group_table(text: str, line=None) -> FiniteGroupTable:
    parts = text.split(";", 1)
    if len(parts) != 2:
        raise ParseError("group-table needs '<n>; <indices>'", line)
    try:
        n = int(parts[0])
        values = [int(x) for x in parts[1].replace(",", " ").split()]
    except ValueError:
        raise ParseError("group-table entries must be integers", line) from None
    if len(values) != n * n:
        raise ParseError(f"group-table needs {n * n} entries, got {len(values)}", line)
    try:
        return FiniteGroupTable([values[i * n:(i + 1) * n] for i in range(n)])
    except ValueError as exc:
        raise ParseError(str(exc), line) from None


def format_group(group) -> str:
    if isinstance(group, FiniteGroupTable):
        return "group-table: " + group.format_spec()
    return "group: " + str(group)
