"""Differential elimination on relations among Maurer-Cartan invariants."""

from .core import (
    Deriver,
    EliminationError,
    RankedPoly,
    Solution,
    PointEvaluator,
    Substituter,
    VerifyResult,
    cleared_subs,
    delta_polynomial,
    reduce,
    solve_quasilinear,
    random_point_value,
    verify_zero,
)
from .ranking import Ranking, RankingError
from .script import (
    SCRIPT_NAMES,
    EliminationTrace,
    ScriptError,
    ScriptResult,
    frame_relations,
    parse_script,
    run_script,
    shipped_script,
)

__all__ = [
    "Deriver",
    "EliminationError",
    "RankedPoly",
    "Ranking",
    "RankingError",
    "Solution",
    "PointEvaluator",
    "Substituter",
    "VerifyResult",
    "cleared_subs",
    "delta_polynomial",
    "reduce",
    "solve_quasilinear",
    "random_point_value",
    "verify_zero",
    "SCRIPT_NAMES",
    "EliminationTrace",
    "ScriptError",
    "ScriptResult",
    "frame_relations",
    "parse_script",
    "run_script",
    "shipped_script",
]
