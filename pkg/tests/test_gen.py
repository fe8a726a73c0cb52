from __future__ import annotations

import random

import pytest

from lpmr import corpus as C
from lpmr.gen import TermGenerator
from lpmr.parser import parse_term
from lpmr.theory import Context
from lpmr.typecheck import Checker


@pytest.mark.parametrize("name", ["pl", "mulgr", "list", "hfol", "sfol", "nat", "tiny3"])
def test_generated_terms_typecheck(name):
    th = C.theory(name)
    gen = TermGenerator(th, random.Random(3))
    c = Checker(th)
    hits = 0
    for _ in range(30):
        ctx = gen.context(2)
        got = gen.typed_term(ctx)
        if got is None:
            continue
        hits += 1
        c.check(ctx, got[0], got[1])
    assert hits >= 20


def test_same_seed_same_terms():
    th = C.theory("mulgr")
    a = [TermGenerator(th, random.Random(5)).typed_term() for _ in range(3)]
    b = [TermGenerator(th, random.Random(5)).typed_term() for _ in range(3)]
    assert a == b


def test_inhabit_goal_directed():
    th = C.theory("pl")
    gen = TermGenerator(th, random.Random(0))
    goal = parse_term("Prf (imp (and (imp p p) p) (and (imp p p) p))", free=["p"])
    ctx = Context((("p", parse_term("Prop")),))
    proof = next(filter(None, (gen.inhabit(ctx, goal, 4) for _ in range(50))))
    Checker(th).check(ctx, proof, goal)


def test_uninhabitable_goal():
    th = C.theory("pl")
    gen = TermGenerator(th, random.Random(0))
    ctx = Context((("p", parse_term("Prop")),))
    assert all(gen.inhabit(ctx, parse_term("Prf p", free=["p"]), 3) is None for _ in range(20))


def test_excluded_heads_do_not_appear():
    th = C.theory("mulgr")
    gen = TermGenerator(th, random.Random(1), exclude=frozenset({"times"}))
    for _ in range(20):
        got = gen.typed_term()
        if got is not None:
            assert "times" not in repr(got[0])
