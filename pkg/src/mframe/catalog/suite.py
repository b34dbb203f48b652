"""Run a golden suite: compute each checked quantity and compare it."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional

from mframe.algebra import DiffExpr
from mframe.cli.syntax import Env, canonical, parse_expr
from mframe.elim import ScriptError, frame_relations, run_script, shipped_script, verify_zero
from mframe.frame import build_frame
from mframe.invderiv import mono_symbol
from mframe.jetspace import orbit_dimensions

from . import SUITES, check_order, get
from .golden import Golden, referenced

DEFAULT_TRIALS = 20


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    mode: str
    ok: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"check": self.check_id, "mode": self.mode, "ok": self.ok, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def counts(self):
        good = sum(c.ok for c in self.checks)
        return good, len(self.checks) - good

    def as_dict(self) -> dict:
        good, bad = self.counts()
        return {"suite": self.suite, "seed": self.seed, "ok": self.ok, "passed": good, "failed": bad,
                "checks": [c.as_dict() for c in self.checks]}


@lru_cache(maxsize=None)
def frame_for(suite: str):
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    cid, cs = SUITES[suite]
    e = get(cid)
    return build_frame(e.action, e.cross_sections[cs], aliases=e.aliases[cs])


class _Suite:
    def __init__(self, suite: str, seed: int, trials: int):
        self.name = suite
        self.seed = seed
        self.trials = trials
        cid, self.cs = SUITES[suite]
        self.entry = get(cid)
        self.goldens: Dict[str, Golden] = self.entry.golden[self.cs]
        self.ctx = frame_for(suite)
        self.world = "aliases" if any(k.startswith("Delta_") for k in self.goldens) else "invariants"
        self._relations = None
        self._script = None
        self._script_error: Optional[str] = None

    @property
    def relations(self) -> Dict[str, DiffExpr]:
        if self._relations is None:
            self._relations = frame_relations(self.ctx, self.world)
        return self._relations

    @property
    def script(self):
        if self._script is None and self._script_error is None:
            try:
                self._script = run_script(shipped_script(self.name), self.ctx, seed=self.seed)
            except ScriptError as exc:
                self._script_error = str(exc)
        return self._script

    def expected(self, g: Golden) -> DiffExpr:
        return g.expr(referenced(self.goldens, g))

    def actual(self, cid: str) -> DiffExpr:
        if cid in self.relations:
            return self.relations[cid]
        sc = self.script
        if sc is None:
            raise LookupError(f"elimination script failed: {self._script_error}")
        if cid in sc.named:
            return sc.named[cid]
        sym = _symbol_for(cid)
        if sym in sc.resolved:
            return sc.resolved[sym]
        raise LookupError(f"nothing computed for {cid}")

    # comparisons -------------------------------------------------------

    def run(self) -> SuiteReport:
        rep = SuiteReport(self.name, self.seed)
        for cid in sorted(self.goldens, key=check_order):
            g = self.goldens[cid]
            if g.mode == "definition":
                continue
            try:
                ok, detail = getattr(self, "_" + g.mode)(g)
            except (LookupError, ArithmeticError, ValueError) as exc:
                ok, detail = False, f"error: {exc}"
            rep.checks.append(CheckResult(cid, g.mode, ok, detail))
        sc = self.script
        if sc is None:
            rep.checks.append(CheckResult("script", "script", False, self._script_error or ""))
        else:
            rep.checks.append(CheckResult("script", "script", sc.ok, f"{len(sc.checks)} expectations met"))
        return rep

    def _orbits(self, g: Golden):
        ranks, s = g.orbits()
        la = orbit_dimensions(self.entry.action, len(ranks) - 1, seed=self.seed)
        ok = la.ranks == ranks and (s is None or la.stabilization == s)
        return ok, f"ranks {', '.join(map(str, la.ranks))}; s = {la.stabilization}"

    def _matrix(self, g: Golden):
        R = self.ctx.R_named()
        want = g.matrix()
        if (R.nrows, R.ncols) != (len(want), len(want[0])):
            return False, f"shape {R.nrows}x{R.ncols}, expected {len(want)}x{len(want[0])}"
        bad = [(i, j) for i in range(R.nrows) for j in range(R.ncols) if R[i, j] != want[i][j]]
        if bad:
            cells = ", ".join(f"({i + 1},{j + 1}): {canonical(R[i, j])}" for i, j in bad[:4])
            return False, f"{len(bad)} entries differ: {cells}"
        return True, f"{R.nrows}x{R.ncols} entries equal"

    def _exact(self, g: Golden):
        d = self.actual(g.check_id) - self.expected(g)
        return d.is_zero(), "identical" if d.is_zero() else f"difference {_short(d)}"

    def _proportional(self, g: Golden):
        a, b = self.actual(g.check_id), self.expected(g)
        return _proportional(a, b)

    def _denominator(self, g: Golden):
        sym = parse_expr(g.argument) if g.argument else DiffExpr.sym(_symbol_for(g.check_id))
        (s,) = sym.symbols()
        sc = self.script
        if sc is None or s not in sc.resolved:
            raise LookupError(f"no formula for {g.argument}")
        return _proportional(DiffExpr(sc.resolved[s].den), self.expected(g))

    def _equivalent(self, g: Golden):
        sym = _symbol_for(g.check_id)
        sc = self.script
        if sc is None or sym not in sc.resolved:
            raise LookupError(f"no formula for {g.check_id}")
        diff = sc.resolved[sym] - self.expected(g)
        others = {k: v for k, v in sc.resolved.items() if k != sym}
        alg = self.ctx.algebra(self.world)
        res = verify_zero(diff, [others] if others else [], alg, self.ctx.expander(), trials=self.trials,
                          seed=self.seed)
        if res.ok:
            return True, f"{res.stage}; {res.trials} points, {res.trial_failures} disagree"
        # report the sample points too, so a failure says how badly it fails
        pts = verify_zero(diff, [others] if others else [], alg, self.ctx.expander(), trials=self.trials,
                          seed=self.seed, symbolic=False)
        detail = f"not zero after expansion; {pts.trials} points, {pts.trial_failures} disagree"
        if res.residual is not None:
            detail += f"; residual {_short(res.residual)}"
        return False, detail

    def _identity(self, g: Golden):
        a = self.actual(g.check_id)
        b = g.expr(Env(values=dict(self.relations)))
        d = a - b
        return d.is_zero(), f"{g.check_id} = {g.text}" if d.is_zero() else f"difference {_short(d)}"


def _proportional(a: DiffExpr, b: DiffExpr):
    if a.is_zero() or b.is_zero():
        return False, "zero expression"
    r = a / b
    if r.is_constant():
        return True, f"ratio {canonical(r)}"
    return False, f"ratio {_short(r)} is not constant"


def _short(e, limit: int = 160) -> str:
    s = canonical(e)
    return s if len(s) <= limit else s[:limit] + " ..."


def _symbol_for(cid: str):
    """Check-id to solved symbol: I_31 -> I[3,1], kappa -> kappa."""
    m = re.fullmatch(r"I_(\d)(\d)", cid)
    if m:
        return mono_symbol(f"I[{m.group(1)},{m.group(2)}]")
    return mono_symbol(cid)


def run_suite(suite: str, seed: int = 0, trials: int = DEFAULT_TRIALS) -> SuiteReport:
    """Compute and compare every golden check of a suite, in check-id order."""
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    return _Suite(suite, seed, trials).run()
