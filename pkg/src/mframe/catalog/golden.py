"""Plain-text golden files: loading and parsing.

Each file holds one check.  Lines starting with ``#`` are comments, except
``# compare: <mode> [argument]`` which says how the value is compared.
The remaining lines form the expected value:

* ``exact``, ``proportional``, ``equivalent``, ``definition``,
  ``denominator <symbol>``: one expression (continuation lines are joined);
* ``identity``: an expression in other relation names, e.g. ``-Delta_9``;
* ``matrix``: one row per line, entries separated by ``;``;
* ``orbits``: a comma separated rank list and a line ``s = <order>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib.resources import files
from typing import Dict, List, Optional, Tuple

from mframe.algebra import DiffExpr
from mframe.algebra.symbols import CONST
from mframe.cli.syntax import Env, ParseError, canonical, parse_expr

MODES = ("exact", "proportional", "equivalent", "definition", "denominator", "identity", "matrix", "orbits")


class GoldenError(ValueError):
    pass


@dataclass(frozen=True)
class Golden:
    check_id: str
    mode: str
    body: Tuple[str, ...]  # value lines, comments stripped
    argument: str = ""

    @property
    def text(self) -> str:
        return " ".join(line.strip() for line in self.body)

    def rows(self) -> List[List[str]]:
        return [[t.strip() for t in line.split(";")] for line in self.body]

    def orbits(self) -> Tuple[Tuple[int, ...], Optional[int]]:
        ranks = tuple(int(t) for t in self.body[0].split(","))
        s = None
        for line in self.body[1:]:
            m = re.fullmatch(r"\s*s\s*=\s*(\d+)\s*", line)
            if m:
                s = int(m.group(1))
        return ranks, s

    def matrix(self, env: Optional[Env] = None) -> List[List[DiffExpr]]:
        return [[_parse(t, env, self.check_id) for t in row] for row in self.rows()]

    def expr(self, env: Optional[Env] = None) -> DiffExpr:
        return _parse(self.text, env, self.check_id)


def _parse(text: str, env, check_id: str) -> DiffExpr:
    try:
        return parse_expr(text, env)
    except ParseError as exc:
        raise GoldenError(f"golden {check_id}: {exc}") from None


def parse_golden(check_id: str, text: str) -> Golden:
    mode, arg, body = None, "", []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = re.fullmatch(r"#\s*compare:\s*(\w+)\s*(.*)", s)
            if m:
                mode, arg = m.group(1), m.group(2).strip()
            continue
        body.append(s)
    if mode not in MODES:
        raise GoldenError(f"golden {check_id}: missing or unknown compare mode {mode!r}")
    if not body:
        raise GoldenError(f"golden {check_id}: no expected value")
    return Golden(check_id, mode, tuple(body), arg)


def load_suite(suite: str) -> Dict[str, Golden]:
    root = files("mframe.catalog").joinpath("golden", suite)
    if not root.is_dir():
        raise GoldenError(f"no golden data for {suite!r}")
    out = {}
    for f in sorted(root.iterdir(), key=lambda p: p.name):
        if f.name.endswith(".txt"):
            cid = f.name[:-4]
            out[cid] = parse_golden(cid, f.read_text())
    return out


def resolve(goldens: Dict[str, Golden], g: Golden):
    """Parsed expected value; names of definition files are substituted."""
    if g.mode == "orbits":
        return g.orbits()
    if g.mode == "matrix":
        return g.matrix()
    if g.mode == "identity":
        names = tuple(sorted(set(re.findall(r"[A-Za-z]+_\d+", g.text))))
        return g.expr(Env(params=names))
    return g.expr(referenced(goldens, g))


_VALUED = ("exact", "proportional", "equivalent", "definition", "denominator")


def referenced(goldens: Dict[str, Golden], g: Golden) -> Optional[Env]:
    """Environment binding the other golden expressions that g mentions by name."""
    names = set(re.findall(r"[A-Za-z]+_\d+", g.text))
    defs = {k: goldens[k].expr() for k in sorted(names) if k in goldens and k != g.check_id
            and goldens[k].mode in _VALUED}
    return Env(values=defs) if defs else None


def round_trips(g: Golden) -> bool:
    """parse, print and parse again gives the same expression(s)."""
    if g.mode == "orbits":
        return True
    if g.mode == "matrix":
        vals = [e for row in g.matrix() for e in row]
    else:
        names = tuple(sorted(set(re.findall(r"[A-Za-z]+_\d+", g.text))))
        vals = [g.expr(Env(params=names))]
    for e in vals:
        s = canonical(e)
        back = parse_expr(s, Env(params=tuple(p.name for p in e.symbols() if p.kind == CONST)))
        if back != e or canonical(back) != s:
            return False
    return True
