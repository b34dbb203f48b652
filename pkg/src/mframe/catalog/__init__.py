"""Built-in group actions with their cross-sections, alias tables and goldens."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from mframe.algebra import DiffExpr
from mframe.frame import CrossSection
from mframe.jetspace import VectorFieldSpec

from . import actions as _actions
from .golden import Golden, GoldenError, load_suite, parse_golden, resolve, round_trips

# suite name -> (catalog id, cross-section name)
SUITES = {
    "conformal-hyperbolic": ("conformal", "hyperbolic"),
    "conformal-degenerate": ("conformal", "degenerate"),
    "projective": ("projective", "tresse"),
}

_ROWS = {"conformal": _actions.CONFORMAL, "projective": _actions.PROJECTIVE}


class CatalogError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    action: Tuple[VectorFieldSpec, ...]
    cross_sections: Dict[str, CrossSection]
    aliases: Dict[str, Dict[str, DiffExpr]]
    golden: Dict[str, Dict[str, Golden]]  # cross-section -> check-id -> golden
    pair: Tuple[str, str] = ("", "")

    def suite_name(self, cs: str) -> str:
        for name, (cid, c) in SUITES.items():
            if cid == self.id and c == cs:
                return name
        raise CatalogError(f"no golden suite for {self.id}/{cs}")


def ids() -> Tuple[str, ...]:
    return tuple(_ROWS)


@lru_cache(maxsize=None)
def get(id: str) -> CatalogEntry:
    """Catalog entry by id ('conformal' or 'projective')."""
    if id not in _ROWS:
        raise CatalogError(f"unknown catalog action {id!r}; known: {', '.join(_ROWS)}")
    names = _actions.CROSS_SECTIONS[id]
    cs = {n: _actions.cross_section(eqs, n) for n, eqs in names.items()}
    al = {n: _actions.aliases(_actions.ALIASES[(id, n)]) for n in names}
    golden = {}
    for suite, (cid, n) in SUITES.items():
        if cid == id:
            golden[n] = load_suite(suite)
    return CatalogEntry(id, _actions.generators(_ROWS[id]), cs, al, golden, _actions.PAIRS[id])


def golden_suite(entry: CatalogEntry, cs: str) -> List[Tuple[str, object]]:
    """(check-id, expected value) pairs, ordered by check-id."""
    if cs not in entry.golden:
        raise CatalogError(f"{entry.id} has no cross-section {cs!r}")
    g = entry.golden[cs]
    return [(cid, resolve(g, g[cid])) for cid in sorted(g, key=check_order)]


def check_order(cid: str):
    """Sort key: orbits, matrix, then names with their numbers compared numerically."""
    head = {"orbits": 0, "R": 1}.get(cid, 2)
    stem, _, num = cid.partition("_")
    return (head, stem, int(num) if num.isdigit() else -1, num)


__all__ = [
    "CatalogEntry",
    "CatalogError",
    "Golden",
    "GoldenError",
    "SUITES",
    "check_order",
    "get",
    "golden_suite",
    "ids",
    "load_suite",
    "parse_golden",
    "resolve",
    "round_trips",
]
