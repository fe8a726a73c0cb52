"""The fixture corpus: theories shipped as ``.dk`` files, and the morphisms and
logical relations between them."""

from __future__ import annotations

from functools import cache
from typing import Callable, Mapping

from .loader import CORPUS_DIR, load_theory
from .morphism import Morphism, compose_morphisms, identity_morphism
from .parser import parse_term
from .reduce import DEFAULT, ReductionConfig, Reducer
from .relation import LogicalRelation
from .terms import TYPE, Const, Lam, Pi, Term, close, fresh, open_var
from .theory import Theory

THEORIES = {
    "pl": "pl.dk",
    "pleq": "pleq.dk",
    "mulgr": "mulgr.dk",
    "divgr": "divgr.dk",
    "pl_comp": "pl_comp.dk",
    "q0": "q0.dk",
    "list": "list.dk",
    "tree": "tree.dk",
    "ufol": "ufol.dk",
    "ufol_dep": "ufol_dep.dk",
    "sfol": "sfol.dk",
    "sfol_pair": "sfol_pair.dk",
    "hfol": "hfol.dk",
    "hfol_comp": "hfol_comp.dk",
    "nat": "nat.dk",
    "int": "int.dk",
    "int_pair": "int_pair.dk",
    "unit": "unit.dk",
    "mulgr_rel": "mulgr_rel.dk",
    "tiny3": "tiny3.dk",
    "tiny3_rel": "tiny3_rel.dk",
    "deduction": "demo/deduction.dk",
    "computation": "demo/computation.dk",
}


@cache
def theory(name: str) -> Theory:
    return load_theory(CORPUS_DIR / THEORIES[name], name=name)


def term(text: str) -> Term:
    return parse_term(text)


def _assign(source: Theory, target: Theory, images: Mapping[str, str], name: str) -> Morphism:
    """Parse the given images; every other primitive maps to the same-named constant."""
    assignment: dict[str, Term] = {}
    for d in source.primitives:
        if d.name in images:
            assignment[d.name] = term(images[d.name])
        elif d.name in target:
            assignment[d.name] = Const(d.name)
    return Morphism(source, target, assignment, name)


# ---------------------------------------------------------------------------
# Morphisms


def mul_div() -> Morphism:
    return _assign(theory("mulgr"), theory("divgr"), {
        "times": "x : iota => y : iota => div x (div 1 y)",
        "inv": "x : iota => div 1 x",
    }, "MulDivGr")


def div_mul() -> Morphism:
    return _assign(theory("divgr"), theory("mulgr"), {
        "div": "x : iota => y : iota => times x (inv y)",
    }, "DivMulGr")


def mul_div_mul() -> Morphism:
    return compose_morphisms(mul_div(), div_mul(), "MulDivGr;DivMulGr")


def mul_div_sabotaged() -> Morphism:
    m = mul_div()
    return Morphism(m.source, m.target, {**m.assignment, "inv": term("x : iota => x")}, "MulDivGr-sabotaged")


def deduction_computation() -> Morphism:
    """Natural deduction axioms realized by the computational rules."""
    return _assign(theory("pl"), theory("pl_comp"), {
        "imp_i": "p => q => H => H",
        "imp_e": "p => q => H => H",
        "and_i": "p => hp => q => hq => r => f => f hp hq",
        "and_el": "p => q => H => H p (hp => hq => hp)",
        "and_er": "p => q => H => H q (hp => hq => hq)",
    }, "DedComp")


def demo_morphism() -> Morphism:
    return _assign(theory("deduction"), theory("computation"), {
        "imp_i": "p => q => H => H",
        "imp_e": "p => q => H => H",
    }, "demo")


def pl_q0() -> Morphism:
    return _assign(theory("pl"), theory("q0"), {
        "Prop": "El o",
        "imp": "imp0",
        "and": "and0",
        "imp_i": "imp_i0",
        "imp_e": "imp_e0",
        "and_i": "and_i0",
        "and_el": "and_el0",
        "and_er": "and_er0",
    }, "PLQ0")


def list_tree() -> Morphism:
    return _assign(theory("list"), theory("tree"), {
        "list": "tree",
        "nil": "leaf",
        "cons": "a : Set => x : El a => l : El (tree a) => node a x l (leaf a)",
        "hd": "a : Set => l : El (tree a) => root a l",
        "tl": "a : Set => l : El (tree a) => left a l",
        "concat": "a : Set => l1 : El (tree a) => l2 : El (tree a) => compo a l1 l2",
    }, "ListTree")


def ufol_dep() -> Morphism:
    """Plain implication as the non-dependent case of dependent implication."""
    return _assign(theory("ufol"), theory("ufol_dep"), {
        "imp": "p => q => dimp p (h => q)",
    }, "UFOLdep")


_HS = {
    "El": "a : Set => pair a",
    "all": "a : Set => p : (pair a -> Prop) => all a (x => h => p (mk_pair a x h))",
    "all_i": "a : Set => p : (pair a -> Prop) => H : (m : pair a -> Prf (p m)) =>"
             " x : tm => h : of x a => H (mk_pair a x h)",
    "all_e": "a : Set => p : (pair a -> Prop) =>"
             " H : Prf (all a (x => h => p (mk_pair a x h))) =>"
             " m : pair a => H (fst a m) (snd a m)",
}


def hs() -> Morphism:
    """Hard-sorted to soft-sorted logic, pairing each term with its sorting."""
    return _assign(theory("hfol"), theory("sfol_pair"), _HS, "hs")


def hs_computational() -> Morphism:
    """The same translation from the computational variant; its quantifier rule fails."""
    images = {c: _HS[c] for c in ("El", "all")}
    return _assign(theory("hfol_comp"), theory("sfol_pair"), images, "hs-comp")


def su() -> Morphism:
    """Soft-sorted to unsorted logic, sorts becoming predicates."""
    return _assign(theory("sfol"), theory("ufol_dep"), {
        "Set": "tm -> Prop",
        "of": "x : tm => a : (tm -> Prop) => Prf (a x)",
        "all": "a : (tm -> Prop) => p : (x : tm -> Prf (a x) -> Prop) =>"
               " all (x : tm => dimp (a x) (h => p x h))",
    }, "su")


# Pairs of an integer with a proof that it is non-negative.
_FST = "fst int nn"
_MK = "mk_pair int nn"


def ni() -> Morphism:
    """Naturals as non-negative integers."""
    q = f"x => dimp (geq x 0) (h => P ({_MK} x h))"
    base = f"h => proof_irr (geq 0 0) (ax1 0) h (h => P ({_MK} 0 h)) H0"
    step_succ = (
        f"x => hx => IH => h => proof_irr (geq (succ x) 0) (ax2 (succ x) x 0 (ax3 x) hx) h"
        f" (h => P ({_MK} (succ x) h)) (HS ({_MK} x hx) (IH hx))"
    )
    step_pred = f"x => hx => IH => h => ax6 x (ax2 (pred x) 0 x h hx) (P ({_MK} (pred x) h))"
    return _assign(theory("nat"), theory("int_pair"), {
        "nat": "N",
        "0": f"{_MK} 0 (ax1 0)",
        "succ": f"m : El N => {_MK} (succ ({_FST} m)) (ax2 (succ ({_FST} m)) ({_FST} m) 0 (ax3 ({_FST} m)) (snd int nn m))",
        "geq": f"m1 : El N => m2 : El N => geq ({_FST} m1) ({_FST} m2)",
        "ax1": f"m : El N => ax1 ({_FST} m)",
        "ax2": f"m1 : El N => m2 : El N => m3 : El N => ax2 ({_FST} m1) ({_FST} m2) ({_FST} m3)",
        "ax3": f"m : El N => ax3 ({_FST} m)",
        "ax4": f"m : El N => ax4 ({_FST} m)",
        "rec": f"P => H0 => HS => m => rec ({q}) ({base}) ({step_succ}) ({step_pred}) ({_FST} m) (snd int nn m)",
    }, "NI")


def identities() -> dict[str, Morphism]:
    return {name: identity_morphism(theory(name)) for name in THEORIES}


VALID_MORPHISMS: dict[str, Callable[[], Morphism]] = {
    "MulDivGr": mul_div,
    "DivMulGr": div_mul,
    "DedComp": deduction_computation,
    "demo": demo_morphism,
    "PLQ0": pl_q0,
    "ListTree": list_tree,
    "UFOLdep": ufol_dep,
    "hs": hs,
    "su": su,
    "NI": ni,
}


# ---------------------------------------------------------------------------
# Logical relations


def trivial_parameter(expected: Term, theory_: Theory, unit: str = "unit", point: str = "star") -> Term:
    """Abstract over every argument of ``expected``, then return ``point`` (or
    ``unit`` when a kind is expected).  Suits parameters whose classifier ends
    in the one-element type."""
    r = Reducer(theory_)
    binders: list[tuple[str, str, Term]] = []
    t = r.whnf(expected)
    while isinstance(t, Pi):
        x = fresh(t.hint)
        binders.append((t.hint, x, r.normalize(t.domain)))
        t = r.whnf(open_var(t.body, x))
    out: Term = Const(unit) if t == TYPE else Const(point)
    # Domains are kept: type-level parameters reappear inside classifiers.
    for h, x, d in reversed(binders):
        out = Lam(h, d, close(out, x))
    return out


def _fill_trivial(lr: LogicalRelation, given: Mapping[str, Term]) -> LogicalRelation:
    from .morphism import constant_condition

    assignment = dict(given)
    for d in lr.source.primitives:
        if d.name not in assignment:
            # Classifiers only mention earlier constants, all assigned by now.
            partial = LogicalRelation(lr.morphisms, assignment, lr.name)
            family = constant_condition(lr.source, d, DEFAULT) == 2
            assignment[d.name] = trivial_parameter(partial.expected_type(d.name, d.type, family), lr.target)
    return LogicalRelation(lr.morphisms, assignment, lr.name)


def mulgr_relation() -> LogicalRelation:
    """Binary relation between MulDivGr;DivMulGr and the identity of MulGr."""
    target = theory("mulgr_rel")
    m1 = mul_div_mul().retarget(target)
    m2 = identity_morphism(theory("mulgr")).retarget(target)
    given = {c: term(t) for c, t in {
        "iota": "x1 : iota => x2 : iota => Prf (eq x1 x2)",
        "Prop": "p1 : Prop => p2 : Prop => Prf (iff p1 p2)",
        "Prf": "p1 : Prop => p2 : Prop => H : Prf (iff p1 p2) => h1 : Prf p1 => h2 : Prf p2 => unit",
        "imp": "iff_imp",
        "and": "iff_and",
        "eq": "iff_eq",
        "1": "refl 1",
        "times": "x1 : iota => x2 : iota => Hx : Prf (eq x1 x2) =>"
                 " y1 : iota => y2 : iota => Hy : Prf (eq y1 y2) =>"
                 " leib x1 x2 Hx (z => eq (times x1 y1) (times z y2))"
                 " (leib y1 y2 Hy (z => eq (times x1 y1) (times x1 z)) (refl (times x1 y1)))",
        "inv": "x1 : iota => x2 : iota => H : Prf (eq x1 x2) =>"
               " leib x1 x2 H (z : iota => eq (inv x1) (inv z)) (refl (inv x1))",
    }.items()}
    return _fill_trivial(LogicalRelation((m1, m2), {}, "MulGrRel"), given)


def pl_unary_relation() -> LogicalRelation:
    """The trivially true unary predicate on every type of PL."""
    target = Theory(theory("pl").entries + theory("unit").entries, "pl_unit")
    m = identity_morphism(theory("pl")).retarget(target)
    return _fill_trivial(LogicalRelation((m,), {}, "PLUnary"), {})


def tiny3_relation() -> LogicalRelation:
    target = theory("tiny3_rel")
    ms = tuple(identity_morphism(theory("tiny3")).retarget(target) for _ in range(3))
    given = {"A": term("Eq3"), "a": term("e3 a"), "f": term("cong3"), "g": term("cong3")}
    return LogicalRelation(ms, given, "Tiny3")


VALID_RELATIONS: dict[str, Callable[[], LogicalRelation]] = {
    "MulGrRel": mulgr_relation,
    "PLUnary": pl_unary_relation,
    "Tiny3": tiny3_relation,
}


def eta_config(fuel: int | None = None) -> ReductionConfig:
    return ReductionConfig(eta=True, fuel=fuel or DEFAULT.fuel)
