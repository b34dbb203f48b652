"""Invariantization, Maurer-Cartan invariants, recurrences and syzygies."""

from .aliases import AliasError, AliasTable
from .cross_section import (
    CrossSection,
    CrossSectionError,
    coordinate_symbol,
    invariant_symbol,
    invariantize,
)
from .context import (
    FrameContext,
    NondegeneracyError,
    NotALieAlgebra,
    PhantomInconsistency,
    RecurrenceTable,
    StructureConstants,
    TransversalityError,
    build_frame,
    commutator_invariants,
    cross_relation,
    derivative_symbol,
    mc_matrix,
    recurrence_relation,
    recurrence_table,
    structure_constants,
)
from .syzygies import (
    GeneratingSets,
    Syzygy,
    TrickResult,
    commutator_trick,
    generating_sets,
    is_minimal_order,
    mc_syzygies,
    syzygy_invariant_form,
    trick_formula,
)

__all__ = [
    "GeneratingSets",
    "Syzygy",
    "TrickResult",
    "commutator_trick",
    "generating_sets",
    "is_minimal_order",
    "mc_syzygies",
    "syzygy_invariant_form",
    "trick_formula",
    "AliasError",
    "AliasTable",
    "CrossSection",
    "CrossSectionError",
    "FrameContext",
    "NondegeneracyError",
    "NotALieAlgebra",
    "PhantomInconsistency",
    "RecurrenceTable",
    "StructureConstants",
    "TransversalityError",
    "build_frame",
    "commutator_invariants",
    "coordinate_symbol",
    "cross_relation",
    "derivative_symbol",
    "invariant_symbol",
    "invariantize",
    "mc_matrix",
    "recurrence_relation",
    "recurrence_table",
    "structure_constants",
]
