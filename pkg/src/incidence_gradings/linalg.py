"""Exact sparse linear algebra over any of the scalar backends.

Vectors are ``dict`` objects mapping coordinates (any totally ordered keys,
usually ints or index pairs) to nonzero scalars.
:class:`Echelon` maintains the reduced row echelon basis of a subspace; the
pivot of a row is its lowest coordinate, so the basis is unique for a given
subspace and coordinate order.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def inverse(x):
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def axpy(target: dict, coef, vec: dict) -> None:
    """target += coef * vec, in place, dropping zeros."""
    for k, v in vec.items():
        nv = target.get(k, 0) + coef * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def scale(vec: dict, coef) -> dict:
    if not coef:
        return {}
    return {k: v * coef for k, v in vec.items()}


def combine(pairs: Iterable) -> dict:
    """Sum of coef * vec over (coef, vec) pairs."""
    out: dict = {}
    for coef, vec in pairs:
        if coef:
            axpy(out, coef, vec)
    return out


class Echelon:
    """Reduced row echelon basis, optionally tracking combinations of inserted vectors."""

    __slots__ = ("rows", "track", "deps", "_count")

    def __init__(self, vectors: Iterable[dict] = (), track: bool = False):
        self.rows: dict[int, tuple[dict, dict]] = {}
        self.track = track
        self.deps: list[dict] = []
        self._count = 0
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def basis(self) -> list[dict]:
        return [dict(self.rows[p][0]) for p in sorted(self.rows)]

    def _reduce(self, v: dict, combo: dict | None):
        res = {k: x for k, x in v.items() if x}
        for p in [k for k in v if k in self.rows]:
            c = res.get(p, 0)
            if c:
                row, rc = self.rows[p]
                axpy(res, -c, row)
                if combo is not None:
                    axpy(combo, -c, rc)
        return res

    def reduce(self, v: dict) -> dict:
        """Residual of ``v`` modulo the subspace (zero iff ``v`` is contained)."""
        return self._reduce(v, None)

    def contains(self, v: dict) -> bool:
        return not self._reduce(v, None)

    def coordinates(self, v: dict):
        """Coefficients (by pivot) expressing ``v`` in the echelon basis, or None."""
        if self._reduce(v, None):
            return None
        return {p: v[p] for p in v if p in self.rows}

    def add(self, v: dict) -> bool:
        """Insert ``v``; return True when the dimension grew."""
        index = self._count
        self._count += 1
        combo = {index: Fraction(1)} if self.track else None
        res = self._reduce(v, combo)
        if not res:
            if self.track:
                self.deps.append(combo)
            return False
        p = min(res)
        inv = inverse(res[p])
        res = scale(res, inv)
        if combo is not None:
            combo = scale(combo, inv)
        for q, (row, rc) in self.rows.items():
            c = row.get(p, 0)
            if c:
                axpy(row, -c, res)
                if self.track:
                    axpy(rc, -c, combo)
        self.rows[p] = (res, combo if combo is not None else {})
        return True

    def express(self, v: dict):
        """Write ``v`` as a combination of the inserted vectors (tracking mode), or None."""
        if not self.track:
            raise ValueError("express needs track=True")
        combo: dict = {}
        res = self._reduce(v, combo)
        if res:
            return None
        return {k: -c for k, c in combo.items() if c}


def tracking_echelon(vectors: Iterable[dict] = ()) -> Echelon:
    """An echelon basis that records how rows and dependencies arise from its inputs."""
    return Echelon(vectors, track=True)


def rref(vectors: Iterable[dict]) -> list[dict]:
    return Echelon(vectors).basis()


def rank(vectors: Iterable[dict]) -> int:
    return Echelon(vectors).dim


def dependencies(vectors: list[dict]) -> list[dict]:
    """A basis of {c : sum c_i v_i = 0}, as sparse dicts over input positions."""
    return [d for d in Echelon(vectors, track=True).deps if d]


def express(vectors: list[dict], target: dict):
    """Coefficients c with sum c_i vectors[i] == target, or None if impossible."""
    return Echelon(vectors, track=True).express(target)


def intersect(a: Iterable[dict], b: Iterable[dict]) -> list[dict]:
    """Zassenhaus intersection of two subspaces, returned in reduced echelon form.

    Coordinates may be any mutually comparable keys; they are tagged with 0/1
    so the doubled space keeps the original order inside each half.
    """
    a = list(a)
    b = list(b)
    if not a or not b:
        return []
    rows = [{**{(0, k): x for k, x in v.items()}, **{(1, k): x for k, x in v.items()}} for v in a]
    rows += [{(0, k): x for k, x in v.items()} for v in b]
    e = Echelon(rows)
    out = []
    for p in sorted(e.rows):
        if p[0] == 1:
            out.append({k[1]: x for k, x in e.rows[p][0].items()})
    return rref(out)


def same_span(a: Iterable[dict], b: Iterable[dict]) -> bool:
    return rref(a) == rref(b)
