from __future__ import annotations

from pathlib import Path

import pytest

from lpmr import corpus as C
from lpmr.loader import check_files
from lpmr.parser import parse_file, parse_term
from lpmr.terms import KIND, TYPE
from lpmr.theory import EMPTY_CONTEXT, Context, RewriteRule
from lpmr.typecheck import CheckError, Checker, TheoryChecker, check_rule, elaborate_theory, errors, irrelevant_equal

FIXTURES = Path(__file__).parent / "fixtures"


def run(text: str) -> TheoryChecker:
    tc = TheoryChecker()
    for item in parse_file(text).items:
        tc.add(item)
    return tc


def codes(tc: TheoryChecker) -> list[str]:
    return [d.code for d in errors(tc.diagnostics)]


def test_infer_and_sorts():
    pl = C.theory("pl")
    c = Checker(pl)
    assert c.infer(EMPTY_CONTEXT, parse_term("Prop")) == TYPE
    assert c.infer(EMPTY_CONTEXT, parse_term("Prop -> Type")) == KIND
    assert c.infer(EMPTY_CONTEXT, parse_term("imp_i")) == pl.signature["imp_i"]
    ctx = Context((("p", parse_term("Prop")),))
    assert c.infer(ctx, parse_term("x : Prf p => x", free=["p"])) == parse_term("Prf p -> Prf p", free=["p"])


def test_check_mode_accepts_unannotated_abstractions():
    c = Checker(C.theory("pl"))
    c.check(EMPTY_CONTEXT, parse_term("p => imp_i p p (H => H)"), parse_term("p : Prop -> Prf (imp p p)"))
    with pytest.raises(CheckError) as info:
        c.infer(EMPTY_CONTEXT, parse_term("x => x"))
    assert info.value.code == "cannot-infer"


def test_translation_redexes_are_typed():
    # Left behind by a morphism that maps a constant to an unannotated abstraction.
    c = Checker(C.theory("computation"))
    c.check(EMPTY_CONTEXT, parse_term("p => (p1 => q => H => H) p p (H => H)"), parse_term("p : Prop -> Prf (imp p p)"))


def test_application_errors():
    c = Checker(C.theory("pl"))
    with pytest.raises(CheckError) as info:
        c.infer(EMPTY_CONTEXT, parse_term("imp Prop"))
    assert info.value.code == "mismatch"
    with pytest.raises(CheckError) as info:
        c.infer(EMPTY_CONTEXT, parse_term("imp_i imp"))
    assert info.value.code == "mismatch"


def _base():
    th, _ = elaborate_theory(parse_file("A : Type. 1 : A. c : A -> A.").entries)
    return th


def test_check_rule_rejects_variable_lhs():
    (rule,) = parse_file("[x] x --> 1.").entries
    _, diags = check_rule(_base(), rule)
    assert [d.code for d in errors(diags)] == ["lhs-variable"]


def test_check_rule_rejects_unbound_rhs_variable():
    rule = RewriteRule(parse_term("c x", free=["x"]), parse_term("y", free=["y"]), ("x",))
    _, diags = check_rule(_base(), rule)
    assert [d.code for d in errors(diags)] == ["rhs-free-vars"]
    # Written in a file, the stray name is an unknown symbol and is rejected too.
    (rule,) = parse_file("[x] c x --> y.").entries
    _, diags = check_rule(_base(), rule)
    assert errors(diags)


def test_check_rule_rejects_type_changing_rules():
    tc = run("A : Type. B : Type. a : A. b : B. def f : A -> A. [] f a --> b.")
    assert "mismatch" in codes(tc)


def test_check_rule_records_pattern_context():
    th = C.theory("mulgr")
    rule = next(r for r in th.rules if r.head == "times" and r.arity == 2 and len(r.pattern_vars) == 3)
    assert [x for x, _ in rule.context] == ["x", "y", "z"]
    assert all(a == parse_term("iota") for _, a in rule.context)


def test_linearized_rules_are_identified():
    lst = C.theory("list")
    rule = lst.rules[0]
    assert rule.identified == (("a'", "a"),)
    assert rule.delinearized().pattern_vars == ("a", "x", "l")


def test_theory_checker_reports_each_problem():
    tc = run("A : Type. A : Type. b : B. def d : A := A. c : Kind. e : Type -> A.")
    assert codes(tc) == ["duplicate", "unbound", "mismatch", "bad-classifier", "not-a-type"]


def test_type_level_definitions():
    tc = run("A : Type. def B : Type := A -> A. def F : A -> Type := x => A -> A. a : A. b : F a. #CHECK b : A -> A.")
    assert tc.ok, [d.text() for d in tc.diagnostics]


def test_pragmas():
    tc = run(
        """
        A : Type. a : A. def f : A -> A. [x] f x --> x.
        #ASSERT f (f a) == a.
        #CHECK f a : A.
        #EVAL f (f a).
        #ASSERT f a == A.
        #CHECK a : Type.
        """
    )
    assert tc.output == ["a"]
    assert codes(tc) == ["assert-failed", "mismatch"]


def test_failing_assert_is_reported():
    tc = run("A : Type. a : A. b : A. #ASSERT a == b.")
    assert codes(tc) == ["assert-failed"]


def test_opaque_definitions_do_not_unfold():
    tc = run("A : Type. a : A. thm t : A := a. #ASSERT t == a.")
    assert codes(tc) == ["assert-failed"]
    tc = run("A : Type. a : A. def d : A := a. #ASSERT d == a.")
    assert tc.ok


def test_irrelevance_is_typed_and_pointwise():
    th = C.theory("mulgr_rel")
    ctx = Context((("x", parse_term("iota")),))
    p = parse_term("refl (times x 1)", free=["x"])
    q = parse_term("refl x", free=["x"])
    assert irrelevant_equal(th, ctx, p, q)
    assert irrelevant_equal(th, EMPTY_CONTEXT, parse_term("x : iota => refl (times x 1)"), parse_term("x : iota => refl x"))
    assert not irrelevant_equal(th, ctx, parse_term("x", free=["x"]), parse_term("1"))
    assert not irrelevant_equal(C.theory("mulgr"), ctx, p, q)


def test_corpus_checks():
    for name in C.THEORIES:
        assert C.theory(name).entries


def test_misdeclared_introduction_rule_is_caught():
    run_ = check_files([FIXTURES / "pl_bad_imp_i.dk"])
    assert not run_.ok
    assert {d.code for d in errors(run_.diagnostics)} == {"mismatch"}
