"""Incidence algebras, group gradings on them, and the idempotent toolkit.

Elements are sparse maps from comparable pairs ``(x, y)`` (0-based, ``x <= y``)
to scalars.  Since pairs sort lexicographically, they double as coordinates
for :mod:`incidence_gradings.linalg`.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (
    BadSpectrum,
    NotIdempotent,
    NotInvertible,
    NotOrthogonal,
    PosetMismatch,
)
from .linalg import Echelon, axpy, dependencies, inverse, rref
from .poset import Poset
from .scalars import poly_crt_split


class IncidenceElement:
    """An element of I(X): a sparse map from comparable pairs to nonzero scalars."""

    __slots__ = ("poset", "entries", "_rows")

    def __init__(self, poset: Poset, entries=None, check: bool = True):
        self.poset = poset
        ents = {}
        for (x, y), v in (entries or {}).items():
            if v:
                if check and not (0 <= x < poset.n and 0 <= y < poset.n and poset.leq[x][y]):
                    raise ValueError(f"entry ({x + 1},{y + 1}) is not a comparable pair")
                ents[(x, y)] = v
        self.entries = ents
        self._rows = None

    @classmethod
    def _raw(cls, poset, entries):
        obj = object.__new__(cls)
        obj.poset = poset
        obj.entries = entries
        obj._rows = None
        return obj

    @classmethod
    def unit(cls, poset: Poset, x: int, y: int, coef=1) -> "IncidenceElement":
        return cls(poset, {(x, y): coef})

    @classmethod
    def identity(cls, poset: Poset) -> "IncidenceElement":
        return cls._raw(poset, {(x, x): Fraction(1) for x in range(poset.n)})

    @classmethod
    def diagonal_of(cls, poset: Poset, positions) -> "IncidenceElement":
        return cls._raw(poset, {(x, x): Fraction(1) for x in positions})

    # -- helpers -----------------------------------------------------------------
    def _same(self, other: "IncidenceElement") -> None:
        if other.poset is not self.poset and other.poset != self.poset:
            raise PosetMismatch("elements live in incidence algebras of different posets")

    def rows(self) -> dict:
        if self._rows is None:
            rows: dict = {}
            for (x, y), v in self.entries.items():
                rows.setdefault(x, []).append((y, v))
            self._rows = rows
        return self._rows

    def __getitem__(self, pair):
        return self.entries.get(pair, 0)

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        if isinstance(other, IncidenceElement):
            return self.entries == other.entries and (other.poset is self.poset or other.poset == self.poset)
        if other == 0:
            return not self.entries
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __repr__(self):
        return f"IncidenceElement({format_element(self)})"

    @property
    def support(self) -> frozenset:
        return frozenset(self.entries)

    def diagonal(self) -> dict:
        return {x: v for (x, y), v in self.entries.items() if x == y}

    def is_diagonal(self) -> bool:
        return all(x == y for x, y in self.entries)

    def off_diagonal(self) -> "IncidenceElement":
        return IncidenceElement._raw(self.poset, {k: v for k, v in self.entries.items() if k[0] != k[1]})

    def diagonal_part(self) -> "IncidenceElement":
        return IncidenceElement._raw(self.poset, {k: v for k, v in self.entries.items() if k[0] == k[1]})

    def mask(self, left, right) -> "IncidenceElement":
        """e_L * self * e_R for diagonal 0/1 idempotents with supports ``left``, ``right``."""
        return IncidenceElement._raw(
            self.poset, {k: v for k, v in self.entries.items() if k[0] in left and k[1] in right}
        )

    # -- arithmetic ----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, IncidenceElement):
            return NotImplemented
        self._same(other)
        out = dict(self.entries)
        axpy(out, 1, other.entries)
        return IncidenceElement._raw(self.poset, out)

    def __sub__(self, other):
        if not isinstance(other, IncidenceElement):
            return NotImplemented
        self._same(other)
        out = dict(self.entries)
        axpy(out, -1, other.entries)
        return IncidenceElement._raw(self.poset, out)

    def __neg__(self):
        return IncidenceElement._raw(self.poset, {k: -v for k, v in self.entries.items()})

    def scale(self, c) -> "IncidenceElement":
        if not c:
            return IncidenceElement._raw(self.poset, {})
        return IncidenceElement._raw(self.poset, {k: v * c for k, v in self.entries.items()})

    def __mul__(self, other):
        if isinstance(other, IncidenceElement):
            return ia_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, IncidenceElement):
            return ia_mul(other, self)
        return self.scale(other)

    def vector(self) -> dict:
        return dict(self.entries)


def ia_mul(a: IncidenceElement, b: IncidenceElement) -> IncidenceElement:
    """Convolution product (f*g)(x,y) = sum_z f(x,z) g(z,y)."""
    a._same(b)
    brows = b.rows()
    out: dict = {}
    for (x, z), u in a.entries.items():
        row = brows.get(z)
        if not row:
            continue
        for y, v in row:
            key = (x, y)
            nv = out.get(key, 0) + u * v
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
    return IncidenceElement._raw(a.poset, out)


def element_inverse(m: IncidenceElement) -> IncidenceElement:
    """Inverse in I(X); raises NotInvertible if a diagonal entry vanishes."""
    p = m.poset
    diag = m.diagonal()
    if len(diag) != p.n:
        raise NotInvertible("an element of I(X) is invertible iff its diagonal has no zeros")
    inv_diag = {x: inverse(diag[x]) for x in range(p.n)}
    mcols: dict = {}
    for (z, y), v in m.entries.items():
        if z != y:
            mcols.setdefault(y, []).append((z, v))
    out: dict = {}
    for x in range(p.n):
        row = {x: inv_diag[x]}
        # N(x,y) = -(sum_{x<=z<y} N(x,z) M(z,y)) / M(y,y)
        for y in sorted(p.up[x]):
            acc = 0
            for z, v in mcols.get(y, ()):
                nz = row.get(z)
                if nz:
                    acc = acc + nz * v
            if acc:
                row[y] = -acc * inv_diag[y]
        for y, v in row.items():
            out[(x, y)] = v
    return IncidenceElement._raw(p, out)


def jacobson_radical_basis(poset: Poset) -> list[IncidenceElement]:
    return [IncidenceElement._raw(poset, {pair: Fraction(1)}) for pair in poset.strict_pairs]


def matrix_units(poset: Poset) -> list[IncidenceElement]:
    return [IncidenceElement._raw(poset, {pair: Fraction(1)}) for pair in poset.pairs]


# ---------------------------------------------------------------------------
# Gradings
# ---------------------------------------------------------------------------

class Grading:
    """A G-grading on I(X), stored as echelonized bases of its nonzero components.

    ``generators`` keeps the homogeneous vectors as supplied (useful for
    reports); ``components`` holds the reduced row echelon bases.
    """

    def __init__(self, poset: Poset, group, field, generators, name: str | None = None):
        self.poset = poset
        self.group = group
        self.field = field
        self.name = name
        gens: dict = {}
        for deg, vec in generators:
            deg = group.key(deg)
            if isinstance(vec, IncidenceElement):
                vec._same(IncidenceElement._raw(poset, {}))
                vec = vec.entries
            gens.setdefault(deg, []).append(dict(vec))
        self.generators = gens
        self.components: dict = {}
        for deg in sorted(gens, key=_deg_sort_key):
            basis = rref(gens[deg])
            if basis:
                self.components[deg] = [IncidenceElement._raw(poset, v) for v in basis]
        self._echelons: dict = {}

    @property
    def dim(self) -> int:
        return len(self.poset.pairs)

    @property
    def support(self) -> list:
        return list(self.components)

    def echelon(self, deg) -> Echelon:
        e = self._echelons.get(deg)
        if e is None:
            e = Echelon(v.entries for v in self.components.get(deg, ()))
            self._echelons[deg] = e
        return e

    def component(self, deg) -> list[IncidenceElement]:
        return self.components.get(self.group.key(deg), [])

    def homogeneous_basis(self) -> list[tuple[object, IncidenceElement]]:
        return [(deg, v) for deg, vs in self.components.items() for v in vs]

    def degree_of(self, x: IncidenceElement):
        """Degree of a nonzero homogeneous element, or None if not homogeneous."""
        for deg in self.components:
            if self.echelon(deg).contains(x.entries):
                return deg
        return None

    def decompose(self, x: IncidenceElement) -> dict:
        """Homogeneous components of ``x`` (assumes the grading is a direct sum)."""
        vecs, degs = [], []
        for deg, v in self.homogeneous_basis():
            vecs.append(v.entries)
            degs.append(deg)
        e = Echelon(vecs, track=True)
        coeffs = e.express(x.entries)
        if coeffs is None:
            raise ValueError("element is not in the span of the grading")
        out: dict = {}
        for k, c in coeffs.items():
            acc = out.setdefault(degs[k], {})
            axpy(acc, c, vecs[k])
        return {d: IncidenceElement._raw(self.poset, v) for d, v in out.items() if v}

    def identity_degree(self):
        return self.group.key(self.group.identity())


def _deg_sort_key(deg):
    if isinstance(deg, tuple):
        return (0, deg)
    return (1, deg)


@dataclass
class GradingReport:
    ok: bool
    checks: dict = dc_field(default_factory=dict)
    witness: tuple | None = None
    message: str = ""

    def lines(self) -> list[str]:
        out = [f"{name}: {'pass' if good else 'FAIL'}" for name, good in self.checks.items()]
        if self.message:
            out.append(f"detail: {self.message}")
        return out


def verify_grading(grading: Grading) -> GradingReport:
    """Check the direct-sum decomposition, A_g A_h within A_gh, and finite support."""
    checks = {}
    dim = grading.dim
    total = sum(len(v) for v in grading.components.values())
    union = Echelon(v.entries for vs in grading.components.values() for v in vs)
    pairs_ok = all(grading.poset.leq[x][y] for vs in grading.components.values() for v in vs for x, y in v.entries)
    checks["support in comparable pairs"] = pairs_ok
    checks["direct sum spans I(X)"] = total == dim and union.dim == dim
    checks["finite support"] = True
    if not checks["direct sum spans I(X)"]:
        return GradingReport(False, checks, None,
                             f"sum of component dimensions {total}, span dimension {union.dim}, dim I(X) {dim}")
    group = grading.group
    degs = list(grading.components)
    for g in degs:
        for h in degs:
            gh = group.key(group.mul(g, h))
            target = grading.echelon(gh) if gh in grading.components else None
            for i, u in enumerate(grading.components[g]):
                for j, v in enumerate(grading.components[h]):
                    prod = ia_mul(u, v)
                    if prod and (target is None or not target.contains(prod.entries)):
                        checks["multiplicative closure"] = False
                        fg, fh = group.format_element(g), group.format_element(h)
                        return GradingReport(
                            False, checks, (g, h, u, v),
                            f"product of {format_element(u)} (deg {fg}) and {format_element(v)} (deg {fh}) "
                            f"= {format_element(prod)} is not in A_{group.format_element(gh)}",
                        )
    checks["multiplicative closure"] = True
    return GradingReport(True, checks)


def verify_radical_graded(grading: Grading):
    """Return (is_graded, homogeneous basis of J as (degree, element) pairs)."""
    basis = []
    for deg, vs in grading.components.items():
        diag = [{k: v for k, v in b.entries.items() if k[0] == k[1]} for b in vs]
        for dep in dependencies(diag):
            acc: dict = {}
            for k, c in dep.items():
                axpy(acc, c, vs[k].entries)
            if acc:
                basis.append((deg, acc))
    by_deg: dict = {}
    for deg, vec in basis:
        by_deg.setdefault(deg, []).append(vec)
    out = []
    for deg, vecs in by_deg.items():
        out.extend((deg, IncidenceElement._raw(grading.poset, v)) for v in rref(vecs))
    ok = len(out) == len(grading.poset.strict_pairs)
    return ok, out


def conjugate_grading(grading: Grading, m: IncidenceElement) -> Grading:
    """The grading with components M^{-1} A_g M."""
    minv = element_inverse(m)
    gens = [(deg, ia_mul(ia_mul(minv, v), m)) for deg, v in grading.homogeneous_basis()]
    return Grading(grading.poset, grading.group, grading.field, gens, grading.name)


# ---------------------------------------------------------------------------
# Idempotents
# ---------------------------------------------------------------------------

def is_idempotent(e: IncidenceElement) -> bool:
    return ia_mul(e, e) == e


def diagonalize_idempotent(e: IncidenceElement) -> IncidenceElement:
    """Invertible M with M^{-1} e M diagonal, columns taken from e or 1 - e."""
    return simultaneous_diagonalize([e])


def simultaneous_diagonalize(es) -> IncidenceElement:
    """One invertible M with every M^{-1} e_i M diagonal (0/1).

    Column x of M is column x of the e_i whose diagonal contains x, or column
    x of 1 - sum e_i when no e_i does.
    """
    es = list(es)
    if not es:
        raise ValueError("need at least one idempotent")
    poset = es[0].poset
    for i, e in enumerate(es):
        if not is_idempotent(e):
            raise NotIdempotent(f"element {i} is not idempotent")
        for j in range(i + 1, len(es)):
            if ia_mul(e, es[j]) or ia_mul(es[j], e):
                raise NotOrthogonal(f"idempotents {i} and {j} are not orthogonal")
    owner = {}
    for i, e in enumerate(es):
        for x, v in e.diagonal().items():
            owner[x] = i
    rest = IncidenceElement.identity(poset)
    for e in es:
        rest = rest - e
    out: dict = {}
    for src_index, src in enumerate(es + [rest]):
        for (a, b), v in src.entries.items():
            if owner.get(b, len(es)) == src_index:
                out[(a, b)] = v
    m = IncidenceElement._raw(poset, out)
    if len(m.diagonal()) != poset.n:
        raise NotInvertible("column construction produced a singular matrix")
    return m


def idempotent_from(x: IncidenceElement) -> IncidenceElement:
    """p(x) for the CRT idempotent polynomial p; needs diagonal entries in {0, 1}."""
    for pos, v in x.diagonal().items():
        if v != 1:
            raise BadSpectrum(f"diagonal entry {v} at position {pos + 1} is not 0 or 1")
    if not x.diagonal():
        raise BadSpectrum("element has zero diagonal, so its idempotent part is zero")
    m = max(x.poset.heights, default=0) + 1
    if is_idempotent(x):
        return x
    return poly_crt_split(m)(x)


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def format_scalar(value, field=None) -> str:
    if field is not None:
        return field.format(value)
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return str(value)


def format_element(x: IncidenceElement, field=None) -> str:
    if not x.entries:
        return "0"
    parts = []
    for (a, b) in sorted(x.entries):
        v = x.entries[(a, b)]
        unit = f"e[{a + 1},{b + 1}]"
        text = format_scalar(v, field)
        if text == "1":
            term = unit
        elif text == "-1":
            term = "-" + unit
        elif any(op in text[1:] for op in "+-"):
            term = f"({text})*{unit}"
        else:
            term = f"{text}*{unit}"
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        out += (" - " + term[1:]) if term.startswith("-") else (" + " + term)
    return out
