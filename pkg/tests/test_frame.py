import random

import pytest
from gmpy2 import mpq

from mframe.algebra import DiffExpr
from mframe.algebra.symbols import INDEP, INV, JET, WORD
from mframe.catalog import actions
from mframe.cli.syntax import parse_expr as P
from mframe.frame import (
    CrossSectionError,
    NondegeneracyError,
    NotALieAlgebra,
    TransversalityError,
    build_frame,
    commutator_trick,
    generating_sets,
    invariantize,
    mc_syzygies,
    recurrence_relation,
    structure_constants,
    syzygy_invariant_form,
    trick_formula,
)
from mframe.invderiv import mono
from mframe.jetspace import SURFACES, VectorFieldSpec

CONFORMAL = actions.generators(actions.CONFORMAL)
PROJECTIVE = actions.generators(actions.PROJECTIVE)
HYP_CS = actions.cross_section(actions.CROSS_SECTIONS["conformal"]["hyperbolic"])

FRAMES = ["hyperbolic", "degenerate", "tresse"]


@pytest.fixture(params=FRAMES)
def any_frame(request):
    return request.getfixturevalue(request.param)


def test_invariantize_examples():
    assert invariantize(P("u[1,1]"), HYP_CS) == DiffExpr.const(1)
    assert invariantize(P("x"), HYP_CS).is_zero()
    assert invariantize(P("u[3,0]*u[0,3] + u[2,0]"), HYP_CS) == P("I[3,0]*I[0,3]")


def _random_jet_poly(r, n=3, terms=4):
    coords = [DiffExpr.sym(s) for s in SURFACES.coordinates(n)]
    e = DiffExpr.const(0)
    for _ in range(terms):
        t = DiffExpr.const(mpq(r.randint(-4, 4), r.randint(1, 3)))
        for _ in range(r.randint(0, 3)):
            t = t * r.choice(coords)
        e = e + t
    return e


def test_iota_idempotent_and_replacement():
    r = random.Random(5)
    for _ in range(50):
        e = _random_jet_poly(r)
        once = invariantize(e, HYP_CS)
        assert invariantize(once, HYP_CS) == once
        assert all(s.kind not in (INDEP, JET) for s in once.symbols())


def test_hyperbolic_mc_matrix(hyperbolic):
    R = hyperbolic.R_named()
    assert [str(R[0, k]) for k in range(10)] == ["-1", "0", "0", "-phi", "0", "-1", "0", "-kappa", "-sigma", "-phi"]
    assert [str(R[1, k]) for k in range(10)] == ["0", "-1", "0", "-psi", "-1", "0", "0", "-sigma", "-tau", "psi"]


def test_degenerate_aliases_and_matrix(degenerate):
    R = degenerate.R_named()
    assert R[0, 6] == P("psi") and R[1, 9] == P("1/2*phi")
    assert degenerate.R[0, 7] == P("-1/2*I[2,2]")


def test_projective_matrix_entries(tresse):
    R = tresse.R_named()
    assert R[0, 13] == P("kappa - 1/4")
    assert R[1, 14] == P("-3/8*phi - 1/2*tau")


def test_commutator_invariants(hyperbolic, degenerate, tresse):
    assert (hyperbolic.phi, hyperbolic.psi) == (P("-1/4*I[3,0]"), P("1/4*I[0,3]"))
    assert (degenerate.phi, degenerate.psi) == (P("I[0,3]"), P("I[3,0]"))
    assert (tresse.phi, tresse.psi) == (P("-1/3*I[0,4]"), P("1/3*I[4,0]"))


def test_explicit_commutator_formula_agrees(any_frame):
    assert any_frame.commutator_formula_agrees() is not None


def test_commutator_antisymmetry(any_frame):
    Y = any_frame.Y
    for (i, j, k), v in Y.items():
        assert Y[(i, k, j)] == -v


def test_recurrence_examples(hyperbolic):
    assert recurrence_relation(hyperbolic, (3, 0), 1) == P("D[1,0](I[3,0]) - I[4,0] - 3*I[2,2] + 3/4*I[3,0]*I[0,3]")
    assert hyperbolic.derive(P("I[3,0]"), 2) == P("I[3,1] + 3*I[1,3] + 3/4*I[0,3]^2 - 6")


def test_phantom_rows_vanish(any_frame):
    table = any_frame.recurrence_table(any_frame.order)
    for (i, J), v in table.items():
        if any_frame.invariant(J) in any_frame.phantoms:
            assert v.is_zero()


def test_recurrence_order_bound(hyperbolic):
    table = hyperbolic.recurrence_table(4)
    for (i, J), v in table.items():
        orders = [sum(s.idx) for s in v.symbols() if s.kind == INV]
        assert max(orders, default=0) <= sum(J) + 1


def test_structure_constants_translations():
    C = structure_constants(CONFORMAL[:3])
    assert list(C.nonzero()) == []


def test_structure_constants_conformal():
    C = structure_constants(CONFORMAL)
    assert C(0, 6, 0) == -1  # [dilation, d/dx] = -d/dx
    assert C.is_antisymmetric()
    assert C.jacobi_defect() == 0
    assert structure_constants(PROJECTIVE).jacobi_defect() == 0


def test_not_a_lie_algebra():
    gens = (VectorFieldSpec((P("x^2"), P("0")), (P("0"),)), VectorFieldSpec((P("1"), P("0")), (P("0"),)))
    with pytest.raises(NotALieAlgebra):
        structure_constants(gens)


def test_transversality_error():
    bad = actions.cross_section([(z, 0) for z in ("x", "y", "u", "u[1,0]", "u[0,1]", "u[2,0]", "u[0,2]",
                                                 "u[2,1]", "u[1,2]", "u[3,0]")])
    with pytest.raises(TransversalityError):
        build_frame(CONFORMAL, bad)


def test_cross_section_size_must_match():
    with pytest.raises(CrossSectionError):
        build_frame(CONFORMAL, actions.cross_section([("x", 0)]))


def test_syzygy_examples(degenerate):
    syz = {s.slot: s.expr for s in mc_syzygies(degenerate)}
    assert set(syz) == {7, 8, 9, 10}
    assert syz[10] == P("1/2*phi[1,0] - tau + psi*phi")
    assert syz[7] == -P("phi[1,0] + psi[0,1] - 2*tau + 2*kappa")


def _translation_frame():
    gens = actions.generators(actions.CONFORMAL[:3])
    return build_frame(gens, actions.cross_section([("x", 0), ("y", 0), ("u", 0)]))


def test_translations_commute():
    ctx = _translation_frame()
    assert ctx.phi.is_zero() and ctx.psi.is_zero()
    # the only syzygy left is the equality of mixed derivatives
    assert [(s.slot, s.expr) for s in mc_syzygies(ctx)] == [(3, P("D[0,1](I[1,0]) - D[1,0](I[0,1])"))]


def test_syzygies_vanish_on_invariants(any_frame):
    for s in mc_syzygies(any_frame):
        assert any_frame.expand(s.expr).is_zero(), s.label
    for c in range(any_frame.r):
        assert syzygy_invariant_form(any_frame, c).is_zero()


def test_commutation_consistency(any_frame):
    phi, psi, d = any_frame.phi, any_frame.psi, any_frame.derive
    for s in any_frame.basic_upto(4):
        I = DiffExpr.sym(s)
        lhs = d(d(I, 1), 2) - d(d(I, 2), 1) - phi * d(I, 1) - psi * d(I, 2)
        assert lhs.is_zero(), s


def test_generating_sets(hyperbolic, degenerate, tresse):
    assert generating_sets(hyperbolic).minimal_order == tuple(
        P(t) for t in ("I[3,0]", "I[0,3]", "I[3,1]", "I[2,2]", "I[1,3]"))
    assert generating_sets(tresse).minimal_order == tuple(
        P(t) for t in ("I[4,0]", "I[0,4]", "I[4,1]", "I[3,2]", "I[2,3]", "I[1,4]"))
    assert set(generating_sets(degenerate).maurer_cartan) == {mono(n) for n in ("phi", "psi", "kappa", "tau", "sigma")}
    assert len(generating_sets(tresse).order_np1) == 2 + 6


def test_trick_formula_is_algebraic_inverse():
    num, den = trick_formula("phi")
    # substitute D2 D1 phi by the commutation rule
    word = [s for s in num.symbols() if s.kind == WORD][0]
    rule = mono("phi", 1, 1) + mono("phi") * mono("phi", 1, 0) + mono("psi") * mono("phi", 0, 1)
    assert (num / den).subs({word: rule}) == mono("psi")


@pytest.mark.parametrize("name", FRAMES)
@pytest.mark.parametrize("source", ["phi", "psi"])
def test_commutator_trick_back_substitutes(request, name, source):
    ctx = request.getfixturevalue(name)
    res = commutator_trick(ctx, source)
    assert res.matches
    assert res.value == (ctx.psi if source == "phi" else ctx.phi)


def test_commutator_trick_nondegeneracy():
    with pytest.raises(NondegeneracyError):
        commutator_trick(_translation_frame(), "phi")
