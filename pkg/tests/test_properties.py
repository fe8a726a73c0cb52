"""Randomized metatheory: each property runs the pinned 500 cases."""

from __future__ import annotations

import itertools

from hypothesis import given, note
from hypothesis import strategies as st
from helpers import MORPHISMS, RELATIONS, counted, morphism, relation, substitutions, symbolic_relation, typed_terms

from lpmr import corpus as C
from lpmr.parser import parse_term, pretty
from lpmr.reduce import Reducer, normalize, reducts
from lpmr.terms import App, Const, Lam, Pi, Var, close, free_vars, subst
from lpmr.typecheck import Checker, irrelevant_equal

morphism_names = st.sampled_from(sorted(MORPHISMS))
relation_names = st.sampled_from(sorted(RELATIONS))


# -- substitution commutes with translation


@given(st.data())
@counted
def test_morphism_commutes_with_substitution(data):
    m = morphism(data.draw(morphism_names))
    ctx, t, _ = data.draw(typed_terms(m.source))
    _, theta = data.draw(substitutions(m.source, ctx))
    assert m.apply(subst(t, theta)) == subst(m.apply(t), m.apply_subst(theta))


@given(st.data())
@counted
def test_relation_commutes_with_substitution(data):
    lr = relation(data.draw(relation_names))
    ctx, t, _ = data.draw(typed_terms(lr.source))
    _, theta = data.draw(substitutions(lr.source, ctx))
    assert lr.translate(subst(t, theta)) == subst(lr.translate(t), lr.translate_subst(theta))
    for i in range(1, lr.arity + 1):
        renamed = {x: u for x, u in lr.translate_subst(theta).items() if x.endswith(f"@{i}")}
        assert lr.mu(i, subst(t, theta)) == subst(lr.mu(i, t), renamed)


# -- conversion is preserved


def _rewrite_chain(theory, t, rng, steps):
    for _ in range(steps):
        options = list(itertools.islice(reducts(theory, t), 8))
        if not options:
            break
        t = rng.choice(options)
    return t


@given(st.data())
@counted
def test_morphism_preserves_conversion(data):
    m = morphism(data.draw(morphism_names))
    ctx, t, _ = data.draw(typed_terms(m.source))
    rng = data.draw(st.randoms(use_true_random=False))
    u = _rewrite_chain(m.source, t, rng, data.draw(st.integers(1, 4)))
    note(f"{pretty(t)} ~> {pretty(u)}")
    assert Reducer(m.target).convertible(m.apply(t), m.apply(u))


@given(st.data())
@counted
def test_relation_preserves_conversion(data):
    lr = relation(data.draw(relation_names))
    ctx, t, _ = data.draw(typed_terms(lr.source))
    rng = data.draw(st.randoms(use_true_random=False))
    u = _rewrite_chain(lr.source, t, rng, data.draw(st.integers(1, 4)))
    lt, lu = lr.translate(t), lr.translate(u)
    ok = Reducer(lr.target).convertible(lt, lu)
    if not ok:
        # Targets with a proof-irrelevant family compare proofs by their classifier.
        ok = irrelevant_equal(lr.target, lr.translate_context(ctx), lt, lu)
    assert ok


# -- judgments are preserved (the transported term rechecks)


@given(st.data())
@counted
def test_morphism_preserves_typing(data):
    m = morphism(data.draw(morphism_names))
    ctx, t, a = data.draw(typed_terms(m.source))
    Checker(m.target).check(m.apply_ctx(ctx), m.apply(t), m.apply(a))


# -- the abstraction theorem


@given(st.data())
@counted
def test_abstraction_theorem(data):
    lr = relation(data.draw(relation_names))
    ctx, t, a = data.draw(typed_terms(lr.source))
    expected = App(lr.translate(a), lr.mu(1, t))
    for i in range(2, lr.arity + 1):
        expected = App(expected, lr.mu(i, t))
    Checker(lr.target).check(lr.translate_context(ctx), lr.translate(t), expected)


# -- normal forms do not depend on the strategy

STRATEGY_THEORIES = ["pl", "pleq", "mulgr", "divgr", "q0", "list", "tree", "hfol", "nat", "int_pair", "tiny3"]


@given(st.sampled_from(STRATEGY_THEORIES), st.data())
@counted
def test_strategy_independence(name, data):
    theory = C.theory(name)
    _, t, _ = data.draw(typed_terms(theory))
    assert normalize(theory, t, strategy="outermost") == normalize(theory, t, strategy="innermost")


# -- printing and parsing

VAR_NAMES = st.sampled_from(["x", "y", "f", "p", "x'", "v0"])
CONST_NAMES = st.sampled_from(["Prop", "imp", "1", "times", "a_1"])


@st.composite
def raw_terms(draw, depth=3):
    """Arbitrary (not necessarily well-typed) named terms."""
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        if draw(st.booleans()):
            return Var(draw(VAR_NAMES))
        return Const(draw(CONST_NAMES))
    kind = draw(st.sampled_from(["app", "lam", "lam-typed", "pi", "arrow"]))
    x = draw(st.sampled_from(["x", "y", "z"]))
    match kind:
        case "app":
            return App(draw(raw_terms(depth=depth - 1)), draw(raw_terms(depth=depth - 1)))
        case "lam":
            return Lam(x, None, close(draw(raw_terms(depth=depth - 1)), x))
        case "lam-typed":
            return Lam(x, draw(raw_terms(depth=depth - 1)), close(draw(raw_terms(depth=depth - 1)), x))
        case "pi":
            return Pi(x, draw(raw_terms(depth=depth - 1)), close(draw(raw_terms(depth=depth - 1)), x))
    return Pi("_", draw(raw_terms(depth=depth - 1)), draw(raw_terms(depth=depth - 1)))


@given(raw_terms())
@counted
def test_parse_pretty_roundtrip_raw(t):
    assert parse_term(pretty(t), free=free_vars(t)) == t


@given(st.sampled_from(STRATEGY_THEORIES), st.data())
@counted
def test_parse_pretty_roundtrip_typed(name, data):
    ctx, t, a = data.draw(typed_terms(C.theory(name)))
    for u in (t, a):
        assert parse_term(pretty(u), free=ctx.names) == u


# -- translated contexts have (n+1) entries per variable


@given(st.integers(1, 4), st.sampled_from(["pl", "mulgr", "list", "tiny3", "hfol"]), st.data())
@counted
def test_context_size(n, name, data):
    theory = C.theory(name)
    ctx, _, _ = data.draw(typed_terms(theory, ctx_size=(0, 4)))
    lr = symbolic_relation(theory, n)
    assert len(lr.translate_context(ctx)) == (n + 1) * len(ctx)
