"""Noncommuting invariant derivations and monotone derivative symbols."""

from .algebra import (
    DerivAlgebra,
    DerivationError,
    base_of,
    mono,
    mono_parts,
    mono_symbol,
    word_symbol,
)
from .expand import Expander, OrderOverflow, expand_to_invariants

__all__ = [
    "DerivAlgebra",
    "DerivationError",
    "Expander",
    "OrderOverflow",
    "base_of",
    "expand_to_invariants",
    "mono",
    "mono_parts",
    "mono_symbol",
    "word_symbol",
]
