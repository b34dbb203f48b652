"""Rankings on monotone derivative symbols."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from mframe.algebra import Symbol
from mframe.invderiv import mono_parts


class RankingError(ValueError):
    pass


def _split_top(text: str):
    """Split on commas outside brackets, so I[3,0] stays whole."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


@dataclass(frozen=True)
class Ranking:
    """Blocks of bases, lowest block first; bases inside a block lowest first.

    Every derivative of a lower block ranks below every symbol of a higher
    block.  Inside a block, ``within="order"`` compares total order
    i + j, then i, then the base position, so
    b < a < b[0,1] < a[0,1] < b[1,0] < a[1,0] < b[0,2] < ...
    for the block (b, a); ``within="base"`` compares the base position
    first.  Both are compatible with the derivations.
    """

    blocks: Tuple[Tuple[str, ...], ...]
    within: str = "order"

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        flat = [b for blk in blocks for b in blk]
        if len(flat) != len(set(flat)):
            raise RankingError("a base appears twice in the ranking")
        if self.within not in ("order", "base"):
            raise RankingError(f"unknown comparison rule {self.within!r}")
        object.__setattr__(self, "_pos", {b: (k, n) for k, blk in enumerate(blocks) for n, b in enumerate(blk)})

    @staticmethod
    def parse(text: str, within: str = "order") -> "Ranking":
        """'psi, phi < tau, sigma' (lowest first)."""
        blocks = []
        for part in text.split("<"):
            names = tuple(n.strip() for n in _split_top(part) if n.strip())
            if not names:
                raise RankingError(f"empty block in ranking {text!r}")
            blocks.append(names)
        return Ranking(tuple(blocks), within)

    @property
    def bases(self) -> Tuple[str, ...]:
        return tuple(b for blk in self.blocks for b in blk)

    def __contains__(self, base: str) -> bool:
        return base in self._pos

    def key(self, s: Symbol):
        parts = mono_parts(s)
        if parts is None:
            raise RankingError(f"{s} is not a derivative symbol")
        base, i, j = parts
        pos = self._pos.get(base)
        if pos is None:
            raise RankingError(f"base {base} is not ranked")
        blk, n = pos
        if self.within == "order":
            return (blk, i + j, i, n)
        return (blk, n, i + j, i)

    def ranked(self, s: Symbol) -> bool:
        parts = mono_parts(s)
        return parts is not None and parts[0] in self._pos

    def leader(self, symbols) -> Optional[Symbol]:
        cands = [s for s in symbols if self.ranked(s)]
        if not cands:
            return None
        return max(cands, key=self.key)

    def sort(self, symbols: Sequence[Symbol], reverse: bool = False):
        return sorted((s for s in symbols if self.ranked(s)), key=self.key, reverse=reverse)

    def __str__(self) -> str:
        return " < ".join(", ".join(b) for b in self.blocks)
