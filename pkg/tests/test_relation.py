from __future__ import annotations

import pytest
from helpers import symbolic_relation

from lpmr import corpus as C
from lpmr.parser import parse_term
from lpmr.relation import LogicalRelation, RelationError, check_relation, component, star
from lpmr.terms import TYPE, App, Const, Var, app
from lpmr.theory import Context
from lpmr.typecheck import Checker


@pytest.mark.parametrize("name", sorted(C.VALID_RELATIONS))
def test_valid_relations(name):
    report = check_relation(C.VALID_RELATIONS[name]())
    assert report.ok, report.summary()


def test_arities():
    assert C.tiny3_relation().arity == 3
    assert C.mulgr_relation().arity == 2
    assert C.pl_unary_relation().arity == 1


def test_translate_application():
    lr = C.tiny3_relation()
    assert lr.translate(parse_term("f a")) == parse_term("cong3 a a a (e3 a)")


def test_translate_variable_and_components():
    lr = C.tiny3_relation()
    x = parse_term("f x", free=["x"])
    assert lr.translate(Var("x")) == Var(star("x"))
    assert lr.mu(2, x) == App(Const("f"), Var(component("x", 2)))


def test_translate_kind_of_type():
    lr = C.tiny3_relation()
    assert lr.translate_kind(Const("A"), TYPE) == parse_term("A -> A -> A -> Type")


def test_translate_pi_is_a_relation_on_functions():
    lr = C.tiny3_relation()
    rel = lr.translate(parse_term("A -> A"))
    # Applied to three functions it yields a type.
    fs = Context(tuple((f"f{i}", parse_term("A -> A")) for i in (1, 2, 3)))
    applied = parse_term("R f1 f2 f3", free=["R", "f1", "f2", "f3"])
    from lpmr.terms import subst

    Checker(lr.target).check_type(fs, subst(applied, {"R": rel}))


def test_context_translation_order():
    lr = C.tiny3_relation()
    ctx = Context((("x", Const("A")),))
    out = lr.translate_context(ctx)
    assert out.names == ["x@1", "x@2", "x@3", "x@*"]
    assert out.lookup("x@*") == app(Const("Eq3"), Var("x@1"), Var("x@2"), Var("x@3"))


def test_wrong_parameter_fails():
    lr = C.tiny3_relation()
    bad = dict(lr.assignment)
    bad["a"] = parse_term("e3 (f a)")
    report = check_relation(LogicalRelation(lr.morphisms, bad, "bad"))
    assert [f.subject for f in report.failures] == ["a"]


def test_missing_parameter():
    lr = C.tiny3_relation()
    partial = {c: t for c, t in lr.assignment.items() if c != "f"}
    report = check_relation(LogicalRelation(lr.morphisms, partial, "partial"))
    assert not report.ok
    assert {f.code for f in report.failures} == {"missing"}


def test_mismatched_morphisms_rejected():
    with pytest.raises(RelationError):
        LogicalRelation((C.mul_div(), C.list_tree()), {})


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_context_size(n):
    lr = symbolic_relation(C.theory("pl"), n)
    ctx = Context((("p", Const("Prop")), ("h", parse_term("Prf p", free=["p"]))))
    assert len(lr.translate_context(ctx)) == (n + 1) * 2
