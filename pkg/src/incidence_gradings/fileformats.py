"""Reading and writing ``.grading`` files.

Layout::

    conductor=4
    group=Z2 x Z2            (or: group-table=<n>; <n*n indices>)
    prime=101                (optional: work over GF(p), z a primitive N-th root)
    n=3                      (optional)
    covers= (1,2); (1,3)     (optional; otherwise inferred from the supports)
    deg (0,0) : e[1,1]
    deg (1,1) : e[1,2] + e[1,3]

Each ``deg`` line holds one homogeneous basis vector.  Coefficients follow the
scalar grammar: integers, fractions ``a/b``, ``z^k`` and products of these;
parenthesized sums are allowed as coefficients, e.g. ``(1 - z)*e[1,2]``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .algebra import Grading, IncidenceElement, format_element
from .errors import CycleDetected, IndexOutOfRange, ParseError
from .groups import FiniteGroupTable, format_group, parse_group, parse_group_table
from .poset import Poset, from_covers, parse_covers
from .scalars import CyclotomicField, PrimeField

_TOKEN = re.compile(r"\s*(?:(e\[\s*\d+\s*,\s*\d+\s*\])|(\d+)|(z)|([-+*/^()]))")


def _tokenize(text: str, line: int):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}", line, pos + 1)
        if m.group(1):
            nums = re.findall(r"\d+", m.group(1))
            tokens.append(("unit", (int(nums[0]), int(nums[1])), m.start(1) + 1))
        elif m.group(2):
            tokens.append(("int", int(m.group(2)), m.start(2) + 1))
        elif m.group(3):
            tokens.append(("z", None, m.start(3) + 1))
        else:
            tokens.append((m.group(4), None, m.start(4) + 1))
        pos = m.end()
    return tokens


class _LinearParser:
    """Recursive-descent parser producing {None: scalar, (x, y): scalar} maps."""

    def __init__(self, tokens, field, line: int, offset: int):
        self.tokens = tokens
        self.i = 0
        self.field = field
        self.line = line
        self.offset = offset

    def _peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def _error(self, msg):
        col = self.tokens[self.i][2] if self.i < len(self.tokens) else None
        raise ParseError(msg, self.line, None if col is None else col + self.offset)

    def _take(self, kind):
        if self._peek() != kind:
            self._error(f"expected {kind!r}")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        val = self.expr()
        if self.i != len(self.tokens):
            self._error("unexpected trailing input")
        return val

    def expr(self):
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self._take(self._peek())[0] == "-" else 1
        acc = _scale(self.term(), sign)
        while self._peek() in ("+", "-"):
            op = self._take(self._peek())[0]
            acc = _add(acc, _scale(self.term(), -1 if op == "-" else 1))
        return acc

    def term(self):
        acc = self.factor()
        while self._peek() == "*":
            self._take("*")
            acc = self._mul(acc, self.factor())
        return acc

    def _mul(self, a, b):
        a_units = any(k is not None for k in a)
        b_units = any(k is not None for k in b)
        if a_units and b_units:
            self._error("products of matrix units are not allowed in a linear combination")
        if b_units:
            a, b = b, a
        c = b.get(None, 0)
        return {k: v * c for k, v in a.items() if v * c}

    def factor(self):
        kind = self._peek()
        if kind == "-":
            self._take("-")
            return _scale(self.factor(), -1)
        if kind == "(":
            self._take("(")
            val = self.expr()
            self._take(")")
            return val
        if kind == "unit":
            _, (x, y), _ = self._take("unit")
            return {(x, y): Fraction(1)}
        if kind == "int":
            num = self._take("int")[1]
            if self._peek() == "/":
                self._take("/")
                den = self._take("int")[1]
                if den == 0:
                    self._error("zero denominator")
                return {None: self.field.element(Fraction(num, den))}
            return {None: self.field.element(Fraction(num))}
        if kind == "z":
            self._take("z")
            k = 1
            if self._peek() == "^":
                self._take("^")
                neg = False
                if self._peek() == "-":
                    self._take("-")
                    neg = True
                k = self._take("int")[1]
                k = -k if neg else k
            return {None: self.field.zeta(self.field.conductor, k)}
        self._error("expected a scalar, z^k or e[x,y]")


def _scale(d, c):
    return {k: v * c for k, v in d.items()}


def _add(a, b):
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def parse_linear_combination(text: str, field, line: int = None, offset: int = 0) -> dict:
    """Parse ``3/2*z^2*e[1,1] - e[1,3]`` into {(x, y): scalar} with 1-based labels."""
    parsed = _LinearParser(_tokenize(text, line), field, line, offset).parse()
    if parsed.get(None):
        raise ParseError("linear combination has a constant term", line, offset + 1)
    return {k: v for k, v in parsed.items() if k is not None and v}


def parse_scalar_expression(text: str, field, line: int = None):
    """Parse a scalar such as ``2*z^2 - 1/3`` (no matrix units)."""
    parsed = _LinearParser(_tokenize(text, line), field, line, 0).parse()
    if any(k is not None for k in parsed):
        raise ParseError("expected a scalar, found a matrix unit", line)
    return parsed.get(None, 0)


_DEG_LINE = re.compile(r"^deg\s*(\([^)]*\)|\S+)\s*:(.*)$")


def parse_grading(text: str, poset: Poset | None = None, name: str | None = None) -> Grading:
    conductor = 1
    prime = None
    group = None
    n = None
    covers = None
    raw_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        if stripped.startswith("deg"):
            m = _DEG_LINE.match(stripped)
            if not m:
                raise ParseError("expected 'deg (<g>) : <combination>'", lineno, 1)
            raw_lines.append((lineno, m.group(1), m.group(2), body.index(":") + 1))
            continue
        m = re.match(r"^([A-Za-z-]+)\s*[:=]\s*(.*)$", stripped)
        if not m:
            raise ParseError(f"unrecognized line {stripped!r}", lineno, 1)
        key, value = m.group(1), m.group(2)
        if key == "conductor":
            try:
                conductor = int(value)
            except ValueError:
                raise ParseError(f"bad conductor {value!r}", lineno, len(key) + 2) from None
            if conductor < 1:
                raise ParseError("conductor must be positive", lineno, len(key) + 2)
        elif key == "prime":
            try:
                prime = int(value)
            except ValueError:
                raise ParseError(f"bad prime {value!r}", lineno, len(key) + 2) from None
        elif key == "group":
            group = parse_group(value, lineno)
        elif key == "group-table":
            group = parse_group_table(value, lineno)
        elif key == "n":
            try:
                n = int(value)
            except ValueError:
                raise ParseError(f"bad element count {value!r}", lineno, len(key) + 2) from None
        elif key == "covers":
            covers = parse_covers(value, lineno)
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if group is None:
        raise ParseError("missing group declaration", None)
    field = PrimeField(prime, conductor) if prime else CyclotomicField(conductor)
    vectors = []
    for lineno, deg_text, comb, col in raw_lines:
        deg = group.parse_element(deg_text, lineno)
        vec = parse_linear_combination(comb, field, lineno, col)
        if not vec:
            raise ParseError("homogeneous basis vector is zero", lineno, col + 1)
        vectors.append((lineno, deg, vec))
    if poset is None:
        if covers is None:
            relations = sorted({(x, y) for _, _, vec in vectors for (x, y) in vec if x != y})
            size = max([n or 0] + [max(x, y) for _, _, vec in vectors for (x, y) in vec])
        else:
            relations = covers
            size = n if n is not None else max([0] + [max(p) for p in covers])
        try:
            poset = from_covers(size, relations)
        except (CycleDetected, IndexOutOfRange) as exc:
            raise ParseError(f"cannot build poset: {exc}") from None
    relabel = poset.relabeling
    gens = []
    for lineno, deg, vec in vectors:
        entries = {}
        for (x, y), v in vec.items():
            if not (1 <= x <= poset.n and 1 <= y <= poset.n):
                raise ParseError(f"e[{x},{y}] outside 1..{poset.n}", lineno)
            a, b = relabel[x - 1], relabel[y - 1]
            if not poset.leq[a][b]:
                raise ParseError(f"e[{x},{y}] is not a comparable pair of the poset", lineno)
            entries[(a, b)] = v
        gens.append((deg, IncidenceElement(poset, entries)))
    field.check_dimension(len(poset.pairs))
    return Grading(poset, group, field, gens, name)


def load_grading(path, poset: Poset | None = None) -> Grading:
    with open(path, encoding="utf-8") as fh:
        return parse_grading(fh.read(), poset, name=str(path))


def format_grading(grading: Grading, use_generators: bool = False) -> str:
    field = grading.field
    lines = [f"conductor={field.conductor}"]
    if isinstance(field, PrimeField):
        lines.append(f"prime={field.modulus}")
    group_line = format_group(grading.group)
    key, _, value = group_line.partition(": ")
    lines.append(f"{key}={value}")
    lines.append(f"n={grading.poset.n}")
    lines.append("covers= " + "; ".join(f"({a + 1},{b + 1})" for a, b in grading.poset.covers))
    items = (
        [(d, IncidenceElement._raw(grading.poset, v)) for d, vs in grading.generators.items() for v in vs]
        if use_generators
        else grading.homogeneous_basis()
    )
    for deg, vec in items:
        lines.append(f"deg {grading.group.format_element(deg)} : {format_element(vec, field)}")
    return "\n".join(lines) + "\n"


def is_table_group(group) -> bool:
    return isinstance(group, FiniteGroupTable)
