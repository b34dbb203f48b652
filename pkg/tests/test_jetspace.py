import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mframe.algebra import DiffExpr, RatMatrix
from mframe.catalog import actions
from mframe.cli.syntax import parse_expr as P
from mframe.jetspace import (
    SURFACES,
    VectorFieldSpec,
    bracket,
    generalized_lie_matrix,
    orbit_dimensions,
    prolong,
    total_derivative,
)

CONFORMAL = actions.generators(actions.CONFORMAL)
PROJECTIVE = actions.generators(actions.PROJECTIVE)


def field(xi, eta, phi):
    return VectorFieldSpec((P(xi), P(eta)), (P(phi),))


DX, DY, DU = field("1", "0", "0"), field("0", "1", "0"), field("0", "0", "1")
DILATION = field("x", "y", "u")


def test_total_derivative_examples():
    assert total_derivative(P("u"), 0) == P("u[1,0]")
    assert total_derivative(P("u - x*u[1,0] - y*u[0,1]"), 0) == P("-x*u[2,0] - y*u[1,1]")
    assert total_derivative(P("x^2"), 1).is_zero()


def test_total_derivative_raises_order():
    e = P("u[2,1]*x + u[0,3]^2")
    assert SURFACES.jet_order(total_derivative(e, 1)) == 4


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["x", "y", "u", "u[1,0]", "u[0,1]", "u[2,0]", "u[1,1]"]), min_size=1, max_size=4),
       st.integers(-5, 5))
def test_total_derivatives_commute(factors, c):
    e = P("*".join(factors)) + DiffExpr.const(c) * P(factors[0])
    assert total_derivative(total_derivative(e, 0), 1) == total_derivative(total_derivative(e, 1), 0)


def test_prolong_vertical_translation():
    pr = prolong(DU, 3)
    assert pr.coefficient((0, 0)) == DiffExpr.const(1)
    assert all(pr.coefficient(J).is_zero() for J in SURFACES.indices_upto(3) if any(J))


def test_prolong_dilation_second_order():
    assert prolong(DILATION, 2).coefficient((2, 0)) == P("-u[2,0]")


def test_prolong_order_zero_is_base_coefficient():
    v = CONFORMAL[7]
    assert prolong(v, 0).coefficient((0, 0)) == P("2*x*u")


def test_recurrence_matches_closed_form():
    for v in CONFORMAL + PROJECTIVE:
        pr = prolong(v, 3)
        for J in SURFACES.indices_upto(3):
            assert pr.coefficient(J) == pr.coefficient_closed(J)


def test_prolonged_coefficient_orders():
    pr = prolong(CONFORMAL[9], 3)
    for J in SURFACES.indices_upto(3):
        assert SURFACES.jet_order(pr.coefficient(J)) <= sum(J)


def test_prolongation_is_linear(rng):
    for _ in range(5):
        a, b = mpq(rng.randint(-5, 5), rng.randint(1, 3)), mpq(rng.randint(-5, 5), rng.randint(1, 3))
        v, w = rng.choice(CONFORMAL), rng.choice(CONFORMAL)
        comb = v.scaled(a) + w.scaled(b)
        pv, pw, pc = prolong(v, 2), prolong(w, 2), prolong(comb, 2)
        for J in SURFACES.indices_upto(2):
            want = pv.coefficient(J) * DiffExpr.const(a) + pw.coefficient(J) * DiffExpr.const(b)
            assert pc.coefficient(J) == want


def test_lie_matrix_of_translations_is_identity():
    L = generalized_lie_matrix([DX, DY, DU], [P("x"), P("y"), P("u")])
    assert L == RatMatrix.identity(3)


def test_translation_kills_second_derivative():
    L = generalized_lie_matrix([DX], [P("u[2,0]")])
    assert L.is_zero() and L.shape == (1, 1)


def test_conformal_lie_matrix_rank_at_order_three():
    coords = [DiffExpr.sym(s) for s in SURFACES.coordinates(3)]
    assert generalized_lie_matrix(CONFORMAL, coords).rank() == 10


def test_orbit_dimensions_catalog():
    conf = orbit_dimensions(CONFORMAL, 3)
    assert conf.ranks == (3, 5, 8, 10) and conf.stabilization == 3
    proj = orbit_dimensions(PROJECTIVE, 4)
    assert proj.ranks == (3, 5, 8, 12, 15) and proj.stabilization == 4


def test_orbit_dimensions_single_translation():
    la = orbit_dimensions([DX], 3)
    assert la.ranks == (1, 1, 1, 1) and la.stabilization == 0


def test_orbit_dimensions_not_reached():
    la = orbit_dimensions(PROJECTIVE, 2)
    assert la.stabilization is None and not la.reached


def test_ranks_nondecreasing_and_bounded():
    la = orbit_dimensions(PROJECTIVE, 4, seed=3)
    assert list(la.ranks) == sorted(la.ranks)
    assert max(la.ranks) <= la.span_dim == 15


def test_orbit_dimensions_rejects_negative_order():
    with pytest.raises(ValueError):
        orbit_dimensions(CONFORMAL, -1)


def test_bracket_examples():
    assert bracket(DX, DY).is_zero()
    assert bracket(DILATION, DX) == DX.scaled(-1)
    v = CONFORMAL[8]
    assert bracket(v, v).is_zero()


def test_generator_rejects_jet_coefficients():
    with pytest.raises(ValueError):
        field("u[1,0]", "0", "0")


def _homomorphism_holds(v, w, n=3):
    pv, pw, pb = prolong(v, n), prolong(w, n), prolong(bracket(v, w), n)
    for J in SURFACES.indices_upto(n):
        lhs = pb.coefficient(J)
        rhs = pv.apply(pw.coefficient(J)) - pw.apply(pv.coefficient(J))
        if lhs != rhs:
            return False
    return True


@pytest.mark.parametrize("gens", [CONFORMAL, PROJECTIVE], ids=["conformal", "projective"])
def test_prolongation_bracket_homomorphism(gens):
    r = random.Random(11)
    for _ in range(6):
        v = rng_combo(r, gens)
        w = rng_combo(r, gens)
        assert _homomorphism_holds(v, w, 2)


def rng_combo(r, gens):
    out = None
    for g in r.sample(list(gens), 2):
        term = g.scaled(mpq(r.randint(-3, 3) or 1, r.randint(1, 3)))
        out = term if out is None else out + term
    return out
