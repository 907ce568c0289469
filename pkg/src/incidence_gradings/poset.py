"""Finite posets labeled by a linear extension.

Elements are 0-based internally; files and reports use 1-based labels.  A
poset built with :func:`from_covers` is relabeled by the lexicographically
smallest linear extension, so ``x <= y`` in the order implies ``x <= y`` as
integers and every incidence matrix is upper triangular.
"""
from __future__ import annotations

import heapq
import os
import re
from functools import cached_property

from .errors import CycleDetected, IndexOutOfRange, ParseError, SearchBudgetExceeded

DEFAULT_NODE_BUDGET = int(os.environ.get("INCGRAD_POSET_BUDGET", "2000000"))


class Poset:
    """A finite partial order on ``range(n)`` whose labeling is a linear extension."""

    def __init__(self, n: int, leq, relabeling=None):
        self.n = n
        self.leq = tuple(tuple(bool(x) for x in row) for row in leq)
        # relabeling[original_label] = new label (both 0-based)
        self.relabeling = tuple(relabeling) if relabeling is not None else tuple(range(n))
        for i in range(n):
            if not self.leq[i][i]:
                raise ValueError("order must be reflexive")
            for j in range(n):
                if self.leq[i][j] and i > j:
                    raise ValueError("labeling is not a linear extension")

    def __eq__(self, other):
        return isinstance(other, Poset) and self.n == other.n and self.leq == other.leq

    def __hash__(self):
        return hash((self.n, self.leq))

    def __repr__(self):
        return f"Poset(n={self.n}, covers={[(a + 1, b + 1) for a, b in self.covers]})"

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq[x][y]

    def comparable(self, x: int, y: int) -> bool:
        return self.leq[x][y] or self.leq[y][x]

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """All pairs x <= y, in lexicographic order."""
        return tuple((x, y) for x in range(self.n) for y in range(x, self.n) if self.leq[x][y])

    @cached_property
    def strict_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, y) for x, y in self.pairs if x != y)

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        out = []
        for x, y in self.strict_pairs:
            if not any(self.lt(x, z) and self.lt(z, y) for z in range(x + 1, y)):
                out.append((x, y))
        return tuple(out)

    @cached_property
    def up(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(y for y in range(self.n) if self.lt(x, y)) for x in range(self.n))

    @cached_property
    def down(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(x for x in range(self.n) if self.lt(x, y)) for y in range(self.n))

    @cached_property
    def heights(self) -> tuple[int, ...]:
        h = [0] * self.n
        for y in range(self.n):
            for x in self.down[y]:
                h[y] = max(h[y], h[x] + 1)
        return tuple(h)

    def is_antichain(self, elements) -> bool:
        elems = list(elements)
        return all(not self.comparable(a, b) for i, a in enumerate(elems) for b in elems[i + 1:])

    def format(self) -> str:
        covers = "; ".join(f"({a + 1},{b + 1})" for a, b in self.covers)
        return f"n={self.n}\ncovers= {covers}\n"


def chain(n: int) -> Poset:
    return from_covers(n, [(i, i + 1) for i in range(1, n)])


def antichain(n: int) -> Poset:
    return from_covers(n, [])


def from_relation(n: int, less_pairs) -> Poset:
    """Build from 0-based strict relations; the labeling must already be a linear extension."""
    return from_covers(n, [(a + 1, b + 1) for a, b in less_pairs], relabel=False)


def from_covers(n: int, covers, relabel: bool = True) -> Poset:
    """Poset from 1-based generating relations (a, b) meaning a < b.

    The transitive closure is taken, cycles are rejected, and elements are
    relabeled by the lexicographically smallest linear extension (Kahn's
    algorithm with a min-heap); the applied permutation is kept on the result.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    edges = set()
    for a, b in covers:
        if not (1 <= a <= n and 1 <= b <= n):
            raise IndexOutOfRange(f"relation ({a},{b}) outside 1..{n}")
        if a == b:
            raise CycleDetected(f"relation ({a},{a}) is a loop")
        edges.add((a - 1, b - 1))
    succ = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in sorted(edges):
        succ[a].append(b)
        indeg[b] += 1
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        x = heapq.heappop(heap)
        order.append(x)
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, y)
    if len(order) != n:
        raise CycleDetected("relations contain a cycle")
    if relabel:
        new = [0] * n
        for pos, x in enumerate(order):
            new[x] = pos
    else:
        if any(a > b for a, b in edges):
            raise ValueError("labeling is not a linear extension")
        new = list(range(n))
    reach = [[False] * n for _ in range(n)]
    for x in range(n):
        reach[new[x]][new[x]] = True
    for x in reversed(order):
        for y in succ[x]:
            ny = new[y]
            row = reach[new[x]]
            row[ny] = True
            for z in range(n):
                if reach[ny][z]:
                    row[z] = True
    return Poset(n, reach, new)


# ---------------------------------------------------------------------------
# Automorphisms and isomorphisms
# ---------------------------------------------------------------------------

def _invariant(p: Poset, x: int):
    return (p.heights[x], len(p.up[x]), len(p.down[x]),
            sum(1 for a, b in p.covers if a == x), sum(1 for a, b in p.covers if b == x))


def iter_isomorphisms(p: Poset, q: Poset, budget: int | None = None):
    """Yield every order isomorphism p -> q as a tuple ``perm`` with perm[x] in q."""
    if p.n != q.n or len(p.strict_pairs) != len(q.strict_pairs):
        return
    n = p.n
    inv_p = [_invariant(p, x) for x in range(n)]
    inv_q = [_invariant(q, y) for y in range(n)]
    if sorted(inv_p) != sorted(inv_q):
        return
    cands = [[y for y in range(n) if inv_q[y] == inv_p[x]] for x in range(n)]
    order = sorted(range(n), key=lambda x: (len(cands[x]), x))
    budget = DEFAULT_NODE_BUDGET if budget is None else budget
    nodes = [0]
    image = [-1] * n
    used = [False] * n

    def extend(k):
        if k == n:
            yield tuple(image)
            return
        x = order[k]
        for y in cands[x]:
            if used[y]:
                continue
            nodes[0] += 1
            if nodes[0] > budget:
                raise SearchBudgetExceeded(f"poset isomorphism search exceeded {budget} nodes")
            ok = True
            for j in range(k):
                w = order[j]
                iw = image[w]
                if p.leq[x][w] != q.leq[y][iw] or p.leq[w][x] != q.leq[iw][y]:
                    ok = False
                    break
            if not ok:
                continue
            image[x] = y
            used[y] = True
            yield from extend(k + 1)
            image[x] = -1
            used[y] = False

    yield from extend(0)


def poset_isomorphism(p: Poset, q: Poset, budget: int | None = None):
    for perm in iter_isomorphisms(p, q, budget):
        return perm
    return None


def poset_isomorphisms(p: Poset, q: Poset, budget: int | None = None) -> list[tuple[int, ...]]:
    return sorted(iter_isomorphisms(p, q, budget))


def poset_automorphisms(p: Poset, budget: int | None = None) -> list[tuple[int, ...]]:
    return poset_isomorphisms(p, p, budget)


def dot_export(p: Poset, labels=None, name: str = "poset") -> str:
    """DOT digraph of the Hasse diagram, edges pointing from smaller to larger."""
    labels = labels or [str(i + 1) for i in range(p.n)]
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(p.n):
        lines.append(f'  n{i + 1} [label="{labels[i]}"];')
    for a, b in p.covers:
        lines.append(f"  n{a + 1} -> n{b + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# .poset files
# ---------------------------------------------------------------------------

_PAIR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_covers(text: str, line=None) -> list[tuple[int, int]]:
    text = text.strip()
    if not text:
        return []
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = _PAIR.fullmatch(chunk)
        if not m:
            raise ParseError(f"bad cover pair {chunk!r}", line)
        pairs.append((int(m.group(1)), int(m.group(2))))
    return pairs


def parse_poset(text: str) -> Poset:
    n = None
    covers = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {body!r}", lineno, 1)
        key = key.strip()
        if key == "n":
            try:
                n = int(value)
            except ValueError:
                raise ParseError(f"bad element count {value.strip()!r}", lineno, len(key) + 2) from None
        elif key == "covers":
            covers = parse_covers(value, lineno)
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if n is None:
        raise ParseError("missing n=", None)
    return from_covers(n, covers or [])


def load_poset(path) -> Poset:
    with open(path, encoding="utf-8") as fh:
        return parse_poset(fh.read())
