import pytest
from gmpy2 import mpq

from mframe import catalog
from mframe.catalog import CatalogError, check_order, golden_suite
from mframe.catalog.golden import GoldenError, parse_golden, round_trips
from mframe.catalog.suite import run_suite
from mframe.cli.syntax import Env, parse_expr as P
from mframe.frame import structure_constants


def test_ids():
    assert catalog.ids() == ("conformal", "projective")


def test_conformal_entry(conformal):
    assert len(conformal.action) == 10
    cs = conformal.cross_sections["hyperbolic"]
    assert len(cs) == 10
    assert cs.pinned[P("u[1,1]").symbols().pop()] == mpq(1)
    assert set(conformal.cross_sections) == {"hyperbolic", "degenerate"}


def test_projective_entry(projective):
    assert len(projective.action) == 15
    assert len(projective.cross_sections["tresse"]) == 15
    assert projective.suite_name("tresse") == "projective"


def test_unknown_id():
    with pytest.raises(CatalogError, match="unknown catalog action 'affine'"):
        catalog.get("affine")


@pytest.mark.parametrize("entry_id", ["conformal", "projective"])
def test_catalog_algebras_close(entry_id):
    C = structure_constants(catalog.get(entry_id).action)
    assert C.is_antisymmetric() and C.jacobi_defect() == 0


def _all_goldens():
    for entry_id in catalog.ids():
        for cs, table in catalog.get(entry_id).golden.items():
            for cid, g in table.items():
                yield pytest.param(g, id=f"{cs}-{cid}")


@pytest.mark.parametrize("g", list(_all_goldens()))
def test_goldens_round_trip(g):
    assert round_trips(g)


def test_golden_examples(conformal, projective):
    hyp = dict(golden_suite(conformal, "hyperbolic"))
    assert hyp["E_031"] == P("D[1,0](I[0,3]) - 3*I[3,1] - 3/4*I[3,0]^2 + 6 - I[1,3]")
    assert hyp["orbits"] == ((3, 5, 8, 10), 3)
    proj = dict(golden_suite(projective, "tresse"))
    assert proj["P_1"] == P("-1/2*tau[1,0] + 1/2*sigma[0,1] - 2*phi*sigma - 2*tau*psi")
    assert proj["Delta_14"] == P("-Delta_6", Env(params=("Delta_6",)))
    assert len(proj["R"]) == 2 and len(proj["R"][0]) == 15


def test_golden_suite_order(projective):
    order = [cid for cid, _ in golden_suite(projective, "tresse")]
    assert order[:2] == ["orbits", "R"]
    deltas = [c for c in order if c.startswith("Delta_")]
    assert deltas == ["Delta_4", "Delta_6", "Delta_8", "Delta_9", "Delta_12", "Delta_13", "Delta_14", "Delta_15"]
    assert check_order("Delta_9") < check_order("Delta_10")


def test_golden_parse_errors():
    with pytest.raises(GoldenError):
        parse_golden("x", "phi + psi")
    with pytest.raises(GoldenError):
        parse_golden("x", "# compare: fuzzy\nphi")
    with pytest.raises(GoldenError):
        parse_golden("x", "# compare: exact\n# nothing here\n")


def test_golden_denominator_argument(conformal):
    g = conformal.golden["hyperbolic"]["B_22"]
    assert g.mode == "denominator" and g.argument == "I[2,2]"


def test_degenerate_suite_passes():
    rep = run_suite("conformal-degenerate", seed=0)
    assert rep.ok, [c for c in rep.checks if not c.ok]
    assert [c.check_id for c in rep.checks][:2] == ["orbits", "R"]
    assert rep.checks[-1].check_id == "script"
    assert rep.as_dict()["failed"] == 0


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("euclidean")
