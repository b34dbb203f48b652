import itertools

import pytest

from mframe.algebra import DiffExpr
from mframe.cli.syntax import Env, parse_expr
from mframe.frame import build_frame
from mframe.catalog import actions
from mframe.invderiv import DerivAlgebra, mono, word_symbol
from mframe.invderiv.algebra import DerivationError
from mframe.invderiv.expand import Expander, OrderOverflow

ENV = Env(invariants=("phi", "psi", "f", "g"))


def P(text):
    return parse_expr(text, ENV)


ALG = DerivAlgebra(mono("phi"), mono("psi"))


def words(max_len):
    for n in range(1, max_len + 1):
        yield from itertools.product((1, 2), repeat=n)


def test_single_swap():
    assert ALG.normalize_word((2, 1), "f") == P("f[1,1] + phi*f[1,0] + psi*f[0,1]")


def test_monotone_words_are_untouched():
    assert ALG.normalize_word((1, 1, 2), "f") == mono("f", 2, 1)
    assert word_symbol((1, 2, 2), "f") == mono("f", 1, 2)


@pytest.mark.parametrize("letters", list(words(5)), ids=lambda w: "".join(map(str, w)))
def test_two_normalizers_agree(letters):
    assert ALG.normalize_word(letters, "f") == ALG.normalize_word_outer(letters, "f")


def test_leibniz_rule():
    f, g = P("f[1,0] + phi^2"), P("g[0,1]")
    for k in (1, 2):
        assert ALG.apply(f * g, k) == ALG.apply(f, k) * g + f * ALG.apply(g, k)


def test_words_act_as_composition():
    e = P("f*g[1,0]")
    assert ALG.apply_word(e, (2, 1, 2)) == ALG.apply(ALG.apply(ALG.apply(e, 2), 1), 2)


def test_normalize_replaces_word_symbols():
    w = word_symbol((2, 1), "f")
    assert ALG.normalize(w + mono("g")) == ALG.normalize_word((2, 1), "f") + mono("g")


def test_bad_letter():
    with pytest.raises(DerivationError):
        ALG.apply(mono("f"), 3)


def test_expander_aliases(hyperbolic):
    assert hyperbolic.expand(mono("phi")) == P("-1/4*I[3,0]")
    assert hyperbolic.expand(mono("phi", 1, 0)) == hyperbolic.derive(P("-1/4*I[3,0]"), 1)


def test_expander_needs_a_definition():
    with pytest.raises(DerivationError):
        Expander(lambda e, k: e).expand(mono("nu", 1, 0))


@pytest.mark.parametrize("name", ["hyperbolic", "degenerate", "tresse"])
def test_expansion_commutes_with_derivation(request, name):
    ctx = request.getfixturevalue(name)
    alg = ctx.algebra("aliases")
    for letters in words(4):
        sym = alg.normalize_word(letters, "phi")
        assert ctx.expand(sym) == ctx.derive_word(ctx.phi, letters), letters


def test_invariant_world_algebra(hyperbolic):
    alg = hyperbolic.algebra("invariants")
    e = alg.normalize_word((2, 1), "I[3,0]")
    assert hyperbolic.expand(e) == hyperbolic.derive_word(P("I[3,0]"), (2, 1))


def test_order_overflow():
    gens = actions.generators(actions.CONFORMAL)
    cs = actions.cross_section(actions.CROSS_SECTIONS["conformal"]["hyperbolic"])
    ctx = build_frame(gens, cs, max_order=5)
    with pytest.raises(OrderOverflow) as info:
        ctx.expand(mono("I[3,0]", 3, 0))
    assert info.value.limit == 5
