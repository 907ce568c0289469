"""Group gradings on incidence algebras of finite posets.

Exact arithmetic over cyclotomic fields (or GF(p)), canonical triangular
forms, bimodule tags, isomorphism decisions and realization of two-block
specifications.
"""
from __future__ import annotations

from importlib import resources

from .algebra import (
    Grading,
    GradingReport,
    IncidenceElement,
    conjugate_grading,
    element_inverse,
    ia_mul,
    verify_grading,
    verify_radical_graded,
)
from .bimodule import (
    BimoduleDecomposition,
    bimodule_iso_check,
    decompose_bimodule,
    decompose_form,
    realize_blocks,
    realize_two_block,
    tensor_iso_data,
    triangular_iso_check,
    verify_cyclic_block,
    verify_distinct_characters,
)
from .canonical import MINIMAL, Block, CanonicalForm, canonicalize, split_degree_one
from .errors import (
    AmbientMismatch,
    BadSpectrum,
    ConductorOverflow,
    CycleDetected,
    DistinctnessViolated,
    DivisionByZero,
    DuplicateCharacter,
    GradingError,
    IndexOutOfRange,
    InsufficientRoots,
    LinkMismatch,
    NonAbelianGroup,
    NotAPartialOrder,
    NotASubgroup,
    NotDivisionBlock,
    NotIdempotent,
    NotInvertible,
    NotOrthogonal,
    NotRadicalGraded,
    ParseError,
    PosetMismatch,
    SearchBudgetExceeded,
    TagTooLarge,
)
from .fileformats import format_grading, load_grading, parse_grading
from .groups import (
    AbelianGroup,
    Character,
    FiniteGroupTable,
    Subgroup,
    characters_of,
    extend_character,
    parse_group,
    subgroup_join,
    subgroup_meet,
)
from .isoclass import (
    IsoWitness,
    SearchOutcome,
    iso_check,
    is_elementary,
    is_good_equivalent,
    j1_decomposition,
    min_support,
    necessary_invariants,
    search_multiplicative_basis,
    verify_orbit_condition,
)
from .poset import Poset, antichain, chain, from_covers, load_poset, parse_poset
from .scalars import CyclotomicField, CyclotomicScalar, PrimeField, PrimeFieldScalar


def fixture_path(name: str):
    """Path of a bundled fixture file, e.g. ``fixture_path("vee.grading")``."""
    return resources.files(__package__).joinpath("fixtures", name)


__all__ = [
    "AbelianGroup",
    "AmbientMismatch",
    "BadSpectrum",
    "BimoduleDecomposition",
    "Block",
    "CanonicalForm",
    "Character",
    "ConductorOverflow",
    "CycleDetected",
    "CyclotomicField",
    "CyclotomicScalar",
    "DistinctnessViolated",
    "DivisionByZero",
    "DuplicateCharacter",
    "FiniteGroupTable",
    "Grading",
    "GradingError",
    "GradingReport",
    "IncidenceElement",
    "IndexOutOfRange",
    "InsufficientRoots",
    "IsoWitness",
    "LinkMismatch",
    "MINIMAL",
    "NonAbelianGroup",
    "NotAPartialOrder",
    "NotASubgroup",
    "NotDivisionBlock",
    "NotIdempotent",
    "NotInvertible",
    "NotOrthogonal",
    "NotRadicalGraded",
    "ParseError",
    "Poset",
    "PosetMismatch",
    "PrimeField",
    "PrimeFieldScalar",
    "SearchBudgetExceeded",
    "SearchOutcome",
    "Subgroup",
    "TagTooLarge",
    "antichain",
    "bimodule_iso_check",
    "canonicalize",
    "chain",
    "characters_of",
    "conjugate_grading",
    "decompose_bimodule",
    "decompose_form",
    "element_inverse",
    "extend_character",
    "fixture_path",
    "format_grading",
    "from_covers",
    "ia_mul",
    "is_elementary",
    "is_good_equivalent",
    "iso_check",
    "j1_decomposition",
    "load_grading",
    "load_poset",
    "min_support",
    "necessary_invariants",
    "parse_grading",
    "parse_group",
    "parse_poset",
    "realize_blocks",
    "realize_two_block",
    "search_multiplicative_basis",
    "split_degree_one",
    "subgroup_join",
    "subgroup_meet",
    "tensor_iso_data",
    "triangular_iso_check",
    "verify_cyclic_block",
    "verify_distinct_characters",
    "verify_grading",
    "verify_orbit_condition",
    "verify_radical_graded",
]
