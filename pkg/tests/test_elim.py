import pytest

from mframe.algebra import DiffExpr
from mframe.cli.syntax import parse_expr as P
from mframe.elim import (
    EliminationError,
    RankedPoly,
    Ranking,
    RankingError,
    ScriptError,
    delta_polynomial,
    parse_script,
    reduce,
    run_script,
    shipped_script,
    solve_quasilinear,
    verify_zero,
)
from mframe.invderiv import DerivAlgebra, mono, mono_symbol

RK = Ranking.parse("psi, phi")
ALG = DerivAlgebra(mono("phi"), mono("psi"))


def test_ranking_chain():
    syms = [mono_symbol(b, i, j) for b in ("phi", "psi") for i in range(3) for j in range(3) if i + j <= 1]
    got = [str(DiffExpr.sym(s)) for s in RK.sort(syms)]
    assert got == ["psi", "phi", "psi[0,1]", "phi[0,1]", "psi[1,0]", "phi[1,0]"]


def test_blocks_dominate_order():
    rk = Ranking.parse("phi < kappa")
    assert rk.key(mono_symbol("phi", 5, 5)) < rk.key(mono_symbol("kappa"))
    assert str(rk) == "phi < kappa"


def test_ranking_errors():
    with pytest.raises(RankingError):
        Ranking.parse("phi, phi")
    with pytest.raises(RankingError):
        Ranking.parse("phi < ")
    with pytest.raises(RankingError):
        RK.key(mono_symbol("tau"))


def test_leader_and_degree():
    p = RankedPoly(P("phi[1,0]^2*psi + phi[0,1]"), RK)
    assert p.leader == mono_symbol("phi", 1, 0) and p.degree == 2
    assert p.initial == P("psi").num


def test_reduce_by_empty_system_is_identity():
    p = RankedPoly(P("phi[1,0] + psi"), RK)
    assert reduce(p, [], RK, ALG).poly == p.poly


def test_reduce_self_to_zero():
    p = RankedPoly(P("phi[1,0] - psi*phi"), RK)
    assert reduce(p, [p], RK, ALG).is_zero()


def test_reduce_uses_derivatives():
    q = RankedPoly(P("phi - psi^2"), RK)
    p = RankedPoly(P("phi[1,0]"), RK)
    out = reduce(p, [q], RK, ALG)
    assert out.body == P("psi*psi[1,0]")


def test_reduction_is_idempotent():
    q = RankedPoly(P("phi[0,1] - psi"), RK)
    p = RankedPoly(P("phi[1,1] + phi[0,1]*psi[1,0]"), RK)
    once = reduce(p, [q], RK, ALG)
    assert reduce(once, [q], RK, ALG).poly == once.poly


def test_delta_of_a_polynomial_with_itself():
    p = RankedPoly(P("phi[1,0] - psi"), RK)
    assert delta_polynomial(p, p, RK, ALG).is_zero()


def test_delta_needs_common_base():
    with pytest.raises(EliminationError):
        delta_polynomial(RankedPoly(P("phi"), RK), RankedPoly(P("psi"), RK), RK, ALG)


def test_solve_quasilinear_trivial():
    a, b = mono_symbol("phi"), mono_symbol("psi")
    sol = solve_quasilinear([P("2*phi - 1"), P("psi + phi")], [a, b])
    assert sol[a] == P("1/2") and sol[b] == P("-1/2")
    assert sol.side_conditions == ()


def test_solve_reports_determinant():
    a = mono_symbol("phi")
    sol = solve_quasilinear([P("psi*phi - 1")], [a])
    assert sol[a] == P("1/psi")
    assert sol.side_conditions == (P("psi"),)


def test_solve_rejects_nonlinear():
    with pytest.raises(EliminationError):
        solve_quasilinear([P("phi^2 - 1")], [mono_symbol("phi")])


def test_verify_nonzero_constant_fails(hyperbolic):
    res = verify_zero(P("3"), [], hyperbolic.algebra(), hyperbolic.expander())
    assert not res.ok


def test_verify_syzygy_is_zero(degenerate):
    e = P("1/2*phi[1,0] - tau + psi*phi")
    res = verify_zero(e, [], degenerate.algebra(), degenerate.expander(), trials=5)
    assert res.ok and res.stage == "invariants" and res.trial_failures == 0


def test_parse_script_kinds():
    steps = parse_script("# comment\nworld = aliases\n\na, b = solve(p, q)\nexpect zero(a)\nc = a + b\n")
    assert [s.kind for s in steps] == ["setting", "solve", "expect", "assign"]
    assert steps[1].line == 4


@pytest.mark.parametrize("text", ["just words", "1x = phi", "f(a) = b"])
def test_parse_script_errors(text):
    with pytest.raises(ScriptError):
        parse_script(text)


def test_empty_script(degenerate):
    res = run_script("", degenerate)
    assert res.ok and res.results == {} and res.trace.steps == []


def test_script_needs_ranking(degenerate):
    with pytest.raises(ScriptError, match="line 1"):
        run_script("x = reduce(Delta_10, Delta_7)", degenerate)


def test_unknown_script():
    with pytest.raises(ScriptError):
        shipped_script("euclidean")


def _degenerate_run(ctx):
    return run_script(shipped_script("conformal-degenerate"), ctx, seed=3)


def test_shipped_degenerate_script(degenerate):
    res = _degenerate_run(degenerate)
    assert res.ok, [c for c in res.checks if not c[2]]
    assert {str(DiffExpr.sym(s)) for s in res.results} == {"kappa", "tau", "sigma"}
    assert res.side_conditions[mono_symbol("sigma")]


def test_trace_is_deterministic(degenerate):
    a, b = _degenerate_run(degenerate), _degenerate_run(degenerate)
    assert a.trace.to_json() == b.trace.to_json()
    assert a.trace.to_text() == b.trace.to_text()
    assert all(s.output_hash for s in a.trace.steps if s.op in ("reduce", "solve"))
