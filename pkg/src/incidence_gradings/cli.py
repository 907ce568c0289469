"""Command-line front end: ``incgrad <command> ...``.

Exit codes: 0 success (or isomorphic / found), 1 verified negative,
2 search budget exhausted, 3 input error.
"""
from __future__ import annotations

import argparse
import itertools
import os
import re
import sys
from pathlib import Path

from .algebra import Grading, IncidenceElement, format_element, verify_grading, verify_radical_graded
from .bimodule import (
    cyclic_block,
    decompose_form,
    format_tag,
    realize_two_block,
    triangular_iso_check,
    verify_cyclic_block,
    verify_distinct_characters,
)
from .canonical import assoc_dot, canonicalize, describe_subgroup, format_canonical
from .errors import GradingError, ParseError, SearchBudgetExceeded
from .fileformats import format_grading, is_table_group, load_grading
from .groups import AbelianGroup, Character, Subgroup, parse_group, subgroup_meet
from .isoclass import (
    EXHAUSTED,
    FOUND,
    iso_check,
    is_elementary,
    is_good_equivalent,
    necessary_invariants,
    search_multiplicative_basis,
    tags_of,
    verify_orbit_condition,
)
from .poset import Poset, load_poset
from .scalars import set_conductor_max

EXIT_OK, EXIT_NEGATIVE, EXIT_EXHAUSTED, EXIT_INPUT = 0, 1, 2, 3

DEFAULT_ORACLE_BUDGET = int(os.environ.get("INCGRAD_ORACLE_BUDGET", "100000"))


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _load(args) -> Grading:
    poset = load_poset(args.poset) if getattr(args, "poset", None) else None
    return load_grading(args.grading, poset)


def _tag_lines(cf) -> list[str]:
    if not isinstance(cf.group, AbelianGroup):
        return ["tags=unavailable (non-abelian grading group)"]
    lines = []
    for (i, j), dec in sorted(tags_of(cf).items()):
        lines.append(f"bimodule.{i + 1}.{j + 1}.tag={format_tag(dec.tag, cf.group)}")
    report = verify_distinct_characters(cf, tags_of(cf), strict=False)
    lines.append(f"distinct_characters={'pass' if report.ok else 'FAIL'}")
    return lines


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    grading = _load(args)
    report = verify_grading(grading)
    for line in report.lines():
        _out(line)
    if not report.ok:
        _out("grading=FAIL")
        return EXIT_NEGATIVE
    radical_ok, _ = verify_radical_graded(grading)
    _out(f"radical graded: {'pass' if radical_ok else 'FAIL'}")
    _out("grading=pass")
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    cf = canonicalize(_load(args))
    for line in format_canonical(cf) + _tag_lines(cf):
        _out(line)
    if args.dot:
        sys.stdout.write(assoc_dot(cf))
    return EXIT_OK


def cmd_decompose(args) -> int:
    grading = _load(args)
    if is_table_group(grading.group):
        raise GradingError("bimodule decomposition needs an abelian grading group")
    cf = canonicalize(grading)
    ok = True
    group = cf.group
    for (i, j), dec in sorted(decompose_form(cf).items()):
        _out(f"bimodule.{i + 1}.{j + 1}.intersection={dec.intersection.describe()}")
        _out(f"bimodule.{i + 1}.{j + 1}.join={dec.join.describe()}")
        _out(f"bimodule.{i + 1}.{j + 1}.tag={format_tag(dec.tag, group)}")
        for k, (chi, h, m) in enumerate(dec.pairs):
            pieces = cyclic_block(m, h, cf.blocks[i], cf.blocks[j], group)
            good, why = verify_cyclic_block(pieces, chi, h, cf.blocks[i], cf.blocks[j], cf.grading, m)
            ok &= good
            _out(f"bimodule.{i + 1}.{j + 1}.generator.{k + 1}={format_element(m, cf.grading.field)}")
            _out(f"bimodule.{i + 1}.{j + 1}.cyclic.{k + 1}={'pass' if good else 'FAIL ' + why}")
    report = verify_distinct_characters(cf, strict=False)
    _out(f"distinct_characters={'pass' if report.ok else 'FAIL'}")
    return EXIT_OK if ok and report.ok else EXIT_NEGATIVE


def cmd_iso(args) -> int:
    a = canonicalize(load_grading(args.first))
    b = canonicalize(load_grading(args.second))
    fa, fb = necessary_invariants(a), necessary_invariants(b)
    witness = iso_check(a, b)
    if witness is None:
        _out("isomorphic=no")
        if fa != fb:
            names = ["t", "associated poset", "blocks", "bimodules"]
            diff = [names[k] for k in range(4) if fa[k] != fb[k]]
            _out(f"certificate=fingerprint mismatch ({', '.join(diff)})")
        else:
            _out("certificate=exhaustive search over poset isomorphisms and block characters")
        return EXIT_NEGATIVE
    _out("isomorphic=yes")
    _out("alpha=" + ",".join(f"{i + 1}->{k + 1}" for i, k in enumerate(witness.alpha)))
    _out("chars=" + ";".join(c.format() for c in witness.chars))
    for (i, j), sigma in sorted(witness.sigmas.items()):
        _out(f"sigma.{i + 1}.{j + 1}=" + ",".join(str(s + 1) for s in sigma))
    return EXIT_OK


_SPEC_ENTRY = re.compile(r"\(\s*chi\s*=\s*(\([^)]*\))\s*,\s*h\s*=\s*(\([^)]*\)|\S+?)\s*\)")


def _parse_generators(group, text: str, line: int):
    text = text.strip()
    if not text or text == "1":
        return []
    return [group.parse_element(chunk.strip(), line) for chunk in text.split(";") if chunk.strip()]


def parse_realize_spec(text: str):
    """Parse a two-block specification.

    Keys: ``group``, ``H1`` and ``H2`` (generators separated by ';', empty
    for the trivial subgroup) and ``tag``: entries ``(chi=(a,..), h=(..))``
    separated by ';' with chi given by its exponent vector on H1 cap H2.
    """
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {body!r}", lineno, 1)
        key = key.strip()
        if key not in ("group", "H1", "H2", "tag"):
            raise ParseError(f"unknown key {key!r}", lineno, 1)
        values[key] = value.strip()
        lines[key] = lineno
    if "group" not in values:
        raise ParseError("missing group=", None)
    group = parse_group(values["group"], lines["group"])
    if not isinstance(group, AbelianGroup):
        raise ParseError("realization needs an abelian group", lines["group"])
    h1 = Subgroup(group, _parse_generators(group, values.get("H1", ""), lines.get("H1")))
    h2 = Subgroup(group, _parse_generators(group, values.get("H2", ""), lines.get("H2")))
    if not (h1.is_finite and h2.is_finite):
        raise ParseError("block subgroups must be finite")
    inter = subgroup_meet(h1, h2)
    tag = []
    tag_text = values.get("tag", "").strip()
    pos = 0
    while pos < len(tag_text):
        if tag_text[pos] in " ;":
            pos += 1
            continue
        m = _SPEC_ENTRY.match(tag_text, pos)
        if not m:
            raise ParseError("expected (chi=(..), h=(..))", lines.get("tag"), pos + 1)
        exps = [int(x) for x in m.group(1).strip("() ").split(",") if x.strip()]
        try:
            chi = Character.from_exponents(inter, exps)
        except ValueError as exc:
            raise ParseError(str(exc), lines.get("tag"), pos + 1) from None
        tag.append((chi, group.parse_element(m.group(2), lines.get("tag"))))
        pos = m.end()
    return h1, h2, tag


def cmd_realize(args) -> int:
    h1, h2, tag = parse_realize_spec(Path(args.spec).read_text(encoding="utf-8"))
    poset, grading = realize_two_block(h1, h2, tag)
    prefix = Path(args.output) if args.output else Path(args.spec).with_suffix("")
    Path(f"{prefix}.poset").write_text(poset.format(), encoding="utf-8")
    Path(f"{prefix}.grading").write_text(format_grading(grading, use_generators=False), encoding="utf-8")
    cf = canonicalize(grading)
    decs = decompose_form(cf)
    got = decs[(0, 1)].tag if (0, 1) in decs else []
    blocks_ok = cf.t == 2 and cf.blocks[0].subgroup == h1 and cf.blocks[1].subgroup == h2
    match = triangular_iso_check(tag, got, h1, h2) is not None
    _out(f"poset={prefix}.poset")
    _out(f"grading={prefix}.grading")
    _out(f"n={poset.n}")
    _out(f"relations={len(poset.strict_pairs)}")
    _out(f"roundtrip.blocks={'pass' if blocks_ok else 'FAIL'}")
    _out(f"roundtrip.tag={'pass' if match else 'FAIL'}")
    return EXIT_OK if blocks_ok and match else EXIT_NEGATIVE


def _path_degrees(poset: Poset, group, cover_deg: dict):
    """Degrees of all pairs from cover degrees, or None if two paths disagree."""
    deg = {}
    for x in range(poset.n):
        deg[(x, x)] = group.identity()
    for y in range(poset.n):
        for x in sorted(poset.down[y], reverse=True):
            value = None
            for (a, b), d in cover_deg.items():
                if b != y or not poset.le(x, a):
                    continue
                cand = group.mul(deg[(x, a)], d)
                if value is None:
                    value = cand
                elif group.key(cand) != group.key(value):
                    return None
            deg[(x, y)] = value
    return deg


def enumerate_good_gradings(poset: Poset, group, budget: int | None = None):
    """Yield (cover degrees, Grading) for every good grading on I(poset).

    A good grading is fixed by the degrees of the cover matrix units, subject
    to every pair of cover paths between the same endpoints having the same
    product.
    """
    budget = DEFAULT_ORACLE_BUDGET if budget is None else budget
    covers = list(poset.covers)
    elements = group.elements()
    total = len(elements) ** len(covers)
    if total > budget:
        raise SearchBudgetExceeded(f"{total} cover assignments exceed the budget {budget}")
    from .scalars import CyclotomicField

    field = CyclotomicField(1)
    for combo in itertools.product(elements, repeat=len(covers)):
        cover_deg = dict(zip(covers, combo))
        degrees = _path_degrees(poset, group, cover_deg)
        if degrees is None:
            continue
        gens = [(d, IncidenceElement.unit(poset, x, y)) for (x, y), d in degrees.items()]
        yield cover_deg, Grading(poset, group, field, gens, name="good")


def oracle_census(poset: Poset, group, budget: int | None = None):
    """Good gradings bucketed into isomorphism classes by iso_check."""
    items = []
    for cover_deg, grading in enumerate_good_gradings(poset, group, budget):
        items.append((cover_deg, grading, canonicalize(grading)))
    classes: list[list[int]] = []
    for k, (_, _, cf) in enumerate(items):
        for cls in classes:
            if iso_check(items[cls[0]][2], cf) is not None:
                cls.append(k)
                break
        else:
            classes.append([k])
    return items, classes


def cmd_oracle(args) -> int:
    if args.oracle_command != "enumerate-good":
        raise GradingError(f"unknown oracle {args.oracle_command!r}")
    poset = load_poset(args.poset)
    group = parse_group(args.group)
    if not isinstance(group, AbelianGroup) or 0 in group.moduli:
        raise GradingError("the census needs a finite abelian group")
    items, classes = oracle_census(poset, group, args.budget)
    _out(f"good_gradings={len(items)}")
    _out(f"classes={len(classes)}")
    for c, members in enumerate(classes):
        cover_deg = items[members[0]][0]
        label = ", ".join(f"({a + 1},{b + 1}):{group.format_element(d)}" for (a, b), d in cover_deg.items())
        elementary = is_elementary(items[members[0]][1]) is not None
        _out(f"class.{c + 1}.size={len(members)}")
        _out(f"class.{c + 1}.representative={label}")
        _out(f"class.{c + 1}.elementary={'yes' if elementary else 'no'}")
    return EXIT_OK


def _format_certificate(cert: dict) -> list[str]:
    lines = []
    for key in sorted(cert):
        value = cert[key]
        if key in ("basis", "original_basis", "subset"):
            continue
        lines.append(f"certificate.{key}={value}")
    return lines


def cmd_search_mult_basis(args) -> int:
    grading = _load(args)
    outcome = search_multiplicative_basis(grading, args.budget)
    _out(f"status={outcome.status}")
    for line in _format_certificate(outcome.certificate):
        _out(line)
    if outcome.status == FOUND:
        for k, b in enumerate(outcome.certificate["original_basis"]):
            _out(f"basis.{k + 1}={format_element(b, grading.field)}")
        return EXIT_OK
    return EXIT_EXHAUSTED if outcome.status == EXHAUSTED else EXIT_NEGATIVE


def cmd_orbit_check(args) -> int:
    grading = _load(args)
    cf = canonicalize(grading)
    outcome = verify_orbit_condition(cf, budget=args.budget)
    _out(f"status={outcome.status}")
    for line in _format_certificate(outcome.certificate):
        _out(line)
    if outcome.status == FOUND:
        _out(f"subset_size={len(outcome.certificate['subset'])}")
        for a in outcome.certificate["subset"]:
            _out("automorphism=" + ",".join(str(v + 1) for v in a))
        return EXIT_OK
    return EXIT_EXHAUSTED if outcome.status == EXHAUSTED else EXIT_NEGATIVE


def cmd_good(args) -> int:
    cf = canonicalize(_load(args))
    good, witness = is_good_equivalent(cf)
    _out(f"good={'yes' if good else 'no'}")
    if good:
        for (x, y), d in sorted(witness.degrees.items()):
            if x != y:
                _out(f"deg.e[{x + 1},{y + 1}]={cf.group.format_element(d)}")
        seq = is_elementary(cf.grading)
        _out("elementary=" + ("no" if seq is None else ",".join(cf.group.format_element(g) for g in seq)))
    blocks = ";".join(describe_subgroup(b.subgroup, cf.group) for b in cf.blocks)
    _out(f"blocks={blocks}")
    return EXIT_OK if good else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incgrad", description="Group gradings on incidence algebras")
    parser.add_argument("--conductor-max", type=int, default=None, help="largest cyclotomic conductor allowed")
    sub = parser.add_subparsers(dest="command", required=True)

    def grading_cmd(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("grading", help=".grading file")
        p.add_argument("--poset", help=".poset file fixing the element labels")
        p.set_defaults(func=func)
        return p

    p = sub.add_parser("verify", help="check the grading axioms")
    p.add_argument("files", nargs="+", metavar="FILE", help="[POSET] GRADING")
    p.set_defaults(func=cmd_verify)
    p = grading_cmd("canonicalize", cmd_canonicalize, "canonical triangular form")
    p.add_argument("--dot", action="store_true", help="also print the associated poset as DOT")
    grading_cmd("decompose", cmd_decompose, "bimodule tags and cyclic block checks")
    p = sub.add_parser("iso", help="decide graded isomorphism")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_iso)
    p = sub.add_parser("realize", help="build a two-block algebra from a tag specification")
    p.add_argument("spec")
    p.add_argument("-o", "--output", help="output prefix (default: spec path without suffix)")
    p.set_defaults(func=cmd_realize)
    p = sub.add_parser("oracle", help="brute-force oracles")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    q = osub.add_parser("enumerate-good", help="census of good gradings up to isomorphism")
    q.add_argument("poset")
    q.add_argument("group", help='group spec such as "Z2 x Z2"')
    q.add_argument("--budget", type=int, default=None)
    q.set_defaults(func=cmd_oracle)
    p = grading_cmd("search-mult-basis", cmd_search_mult_basis, "look for a multiplicative homogeneous basis")
    p.add_argument("--budget", type=int, default=None)
    p = grading_cmd("orbit-check", cmd_orbit_check, "orbit condition over Aut(X)")
    p.add_argument("--budget", type=int, default=None)
    grading_cmd("good", cmd_good, "good / elementary recognition")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.conductor_max is not None:
        if args.conductor_max < 1:
            parser.error("--conductor-max must be positive")
        set_conductor_max(args.conductor_max)
    if args.command == "verify":
        if len(args.files) > 2:
            parser.error("verify takes [POSET] GRADING")
        args.poset = args.files[0] if len(args.files) == 2 else None
        args.grading = args.files[-1]
    try:
        return args.func(args)
    except SearchBudgetExceeded as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_EXHAUSTED
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_INPUT
    except (GradingError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
