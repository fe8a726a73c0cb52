"""Shared fixtures data and hypothesis strategies."""

from __future__ import annotations

import functools
from collections import Counter

from hypothesis import strategies as st

from lpmr import corpus as C
from lpmr.gen import TermGenerator
from lpmr.morphism import Morphism
from lpmr.relation import LogicalRelation
from lpmr.terms import Const
from lpmr.theory import Context

# Morphisms whose source terms the property suites draw from.
MORPHISMS = {
    "MulDivGr": C.mul_div,
    "DivMulGr": C.div_mul,
    "DedComp": C.deduction_computation,
    "PLQ0": C.pl_q0,
    "ListTree": C.list_tree,
    "UFOLdep": C.ufol_dep,
    "hs": C.hs,
    "su": C.su,
    "NI": C.ni,
}

RELATIONS = {
    "MulGrRel": C.mulgr_relation,
    "PLUnary": C.pl_unary_relation,
    "Tiny3": C.tiny3_relation,
}

_cache: dict[str, object] = {}

# Executed (valid) examples per property test, read back by the acceptance suite.
CASES: Counter[str] = Counter()


def counted(fn):
    @functools.wraps(fn)
    def run(*args, **kwargs):
        CASES[fn.__name__] += 1
        return fn(*args, **kwargs)

    return run


def morphism(name: str) -> Morphism:
    if name not in _cache:
        _cache[name] = MORPHISMS[name]()
    return _cache[name]


def relation(name: str) -> LogicalRelation:
    if name not in _cache:
        _cache[name] = RELATIONS[name]()
    return _cache[name]


def symbolic_relation(theory, arity: int) -> LogicalRelation:
    """Identity morphisms paired with placeholder parameters; fine for syntax-only checks."""
    from lpmr.morphism import identity_morphism

    ms = tuple(identity_morphism(theory) for _ in range(arity))
    names = [d.name for d in theory.primitives]
    return LogicalRelation(ms, {c: Const(c + "_lr") for c in names}, f"sym{arity}")


@st.composite
def typed_terms(draw, theory, ctx_size=(0, 2), depth: int = 3):
    """``(ctx, t, A)`` with ``ctx |- t : A`` in ``theory``; rejects the rare dry run."""
    rng = draw(st.randoms(use_true_random=False))
    gen = TermGenerator(theory, rng, depth)
    ctx = gen.context(draw(st.integers(*ctx_size)))
    got = gen.typed_term(ctx)
    if got is None:
        from hypothesis import reject

        reject()
    return ctx, got[0], got[1]


@st.composite
def substitutions(draw, theory, ctx: Context):
    """``(delta, theta)`` with ``delta |- theta(x) : A[theta]`` for every ``x : A`` in ``ctx``.

    Variables that the generator cannot instantiate become fresh variables of ``delta``.
    """
    from lpmr.terms import Var, subst

    rng = draw(st.randoms(use_true_random=False))
    gen = TermGenerator(theory, rng, 2)
    delta, theta = Context(), {}
    for x, a in ctx:
        goal = subst(a, theta)
        t = gen.inhabit(delta, goal, 2) if rng.random() < 0.8 else None
        if t is None:
            delta = delta.extend("w_" + x, goal)
            t = Var("w_" + x)
        theta[x] = t
    return delta, theta


def proof_library(theory, n: int = 25, seed: int = 0):
    """``n`` distinct theorems over the equational-logic fragment of ``theory``.

    Statements come from a few schemes over random subterms; the proofs are
    found by the generator.  ``eq u v`` with ``v`` the normal form of ``u``
    makes the proof check only modulo the theory's rules.
    """
    import random

    from lpmr.reduce import normalize
    from lpmr.terms import app
    from lpmr.theory import Definition

    rng = random.Random(seed)
    gen = TermGenerator(theory, rng, 3)
    prop, iota = Const("Prop"), Const("iota")
    out, seen = [], set()
    while len(out) < n:
        kind = rng.choice(["refl", "nf", "imp", "k"])
        if kind in ("refl", "nf"):
            u = gen.inhabit(Context(), iota, 3)
            if u is None:
                continue
            v = normalize(theory, u) if kind == "nf" else u
            stmt = app(Const("eq"), u, v)
        else:
            p, q = gen.inhabit(Context(), prop, 2), gen.inhabit(Context(), prop, 2)
            if p is None or q is None:
                continue
            stmt = app(Const("imp"), p, p) if kind == "imp" else app(Const("imp"), p, app(Const("imp"), q, p))
        goal = app(Const("Prf"), stmt)
        if goal in seen:
            continue
        proof = gen.inhabit(Context(), goal, 4)
        if proof is None:
            continue
        seen.add(goal)
        out.append(Definition(f"lemma{len(out)}", goal, proof, opaque=True))
    return out
