"""Skeleton files: a copy of the source theory as an extension of the target,
with a ``TODO`` gap for every parameter of a morphism or logical relation.

Morphism mode suffixes every source constant with ``_mu``.  Relation mode
emits ``c_mu_1 .. c_mu_n`` and ``c_lr`` for each constant ``c``.  Each source
rule becomes ``#ASSERT`` pragmas over frozen pattern variables, declared as
constants named ``x__r<k>`` (the ``__r`` infix is reserved for them).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Mapping, Union

from .morphism import Morphism, MorphismError, constant_condition, ensure_elaborated
from .parser import Pragma, SourceFile, parse_term, pretty_item
from .reduce import DEFAULT, ReductionConfig, Reducer
from .relation import LogicalRelation, component, star
from .terms import Const, Term, Var, app, constants, map_consts, subst
from .theory import ConstantDecl, Definition, RewriteRule, Span, Theory
from .typecheck import TheoryChecker, errors

TODO = "TODO"
MU = "_mu"
LR = "_lr"
FROZEN = "__r"

SkeletonItem = Union[ConstantDecl, Definition, Pragma]


class SkeletonError(Exception):
    pass


@dataclass(frozen=True)
class SkeletonFile:
    target: str
    items: tuple[SkeletonItem, ...]
    mode: str = "morphism"
    arity: int = 1

    def render(self) -> str:
        lines = [f"#REQUIRE {self.target}.", ""]
        for item in self.items:
            lines.append(_layout(item))
        return "\n".join(lines) + "\n"

    @property
    def gaps(self) -> list[str]:
        return [d.name for d in self.items if isinstance(d, Definition) and d.body == Const(TODO)]

    def source_file(self) -> SourceFile:
        return SourceFile(self.target + "_skeleton", ((self.target, Span()),), self.items)


def _layout(item: SkeletonItem) -> str:
    text = pretty_item(item)
    if isinstance(item, Definition) and len(text) > 78:
        head, _, body = text.partition(" := ")
        return f"{head}\n  := {body}"
    return text


# ---------------------------------------------------------------------------
# Generation


def _suffixer(names: set[str], suffix: str):
    def image(c: str) -> Term:
        return Const(c + suffix) if c in names else Const(c)

    return image


def _check_fresh(names: list[str], target: Theory) -> None:
    seen: set[str] = set()
    for n in names:
        if n in target or n in seen:
            raise SkeletonError(f"generated name {n} collides with an existing name")
        seen.add(n)


def generate_skeleton(
    source: Theory,
    target: Theory,
    mode: str = "morphism",
    arity: int = 1,
    config: ReductionConfig = DEFAULT,
) -> SkeletonFile:
    if mode not in ("morphism", "relation"):
        raise SkeletonError(f"unknown mode {mode!r}")
    if arity < 1:
        raise SkeletonError("arity must be at least 1")
    source = ensure_elaborated(source, config)
    if mode == "morphism":
        items = _morphism_items(source)
        arity = 1
    else:
        items = _relation_items(source, arity, config)
    _check_fresh([it.name for it in items if not isinstance(it, Pragma)], target)
    return SkeletonFile(target.name, tuple(items), mode, arity)


def _source_names(source: Theory) -> set[str]:
    return {e.name for e in source.entries if not isinstance(e, RewriteRule)}


def _morphism_items(source: Theory) -> list[SkeletonItem]:
    rho = _suffixer(_source_names(source), MU)
    out: list[SkeletonItem] = []
    k = 0
    for e in source.entries:
        match e:
            case ConstantDecl(name, ty):
                out.append(Definition(name + MU, map_consts(ty, rho), Const(TODO)))
            case Definition(name, ty, body, opaque):
                out.append(Definition(name + MU, map_consts(ty, rho), map_consts(body, rho), opaque))
            case RewriteRule():
                k += 1
                rule = e.delinearized()
                frozen = {x: Const(f"{x}{FROZEN}{k}") for x in rule.pattern_vars}
                for x, ty in rule.context:
                    out.append(ConstantDecl(frozen[x].name, subst(map_consts(ty, rho), frozen)))
                lhs = subst(map_consts(rule.lhs, rho), frozen)
                rhs = subst(map_consts(rule.rhs, rho), frozen)
                out.append(Pragma("ASSERT", (lhs, rhs)))
    return out


def _symbolic_relation(source: Theory, arity: int) -> LogicalRelation:
    """A relation whose parameters are the skeleton's own constants."""
    names = _source_names(source)
    ms = []
    for i in range(1, arity + 1):
        suffix = f"{MU}_{i}"
        ms.append(Morphism(source, Theory(), {c: Const(c + suffix) for c in names}, f"mu_{i}"))
    return LogicalRelation(tuple(ms), {c: Const(c + LR) for c in names}, "lr")


def _relation_items(source: Theory, arity: int, config: ReductionConfig) -> list[SkeletonItem]:
    lr = _symbolic_relation(source, arity)
    beta = Reducer(Theory())
    out: list[SkeletonItem] = []
    k = 0
    for e in source.entries:
        match e:
            case ConstantDecl(name, ty):
                family = constant_condition(source, e, config) == 2
                for i in range(1, arity + 1):
                    out.append(Definition(f"{name}{MU}_{i}", lr.mu(i, ty), Const(TODO)))
                out.append(Definition(name + LR, beta.normalize(lr.expected_type(name, ty, family)), Const(TODO)))
            case Definition(name, ty, body, opaque):
                family = constant_condition(source, ConstantDecl(name, ty), config) == 2
                for i in range(1, arity + 1):
                    out.append(Definition(f"{name}{MU}_{i}", lr.mu(i, ty), lr.mu(i, body), opaque))
                expected = beta.normalize(lr.expected_type(name, ty, family))
                out.append(Definition(name + LR, expected, beta.normalize(lr.translate(body)), opaque))
            case RewriteRule():
                k += 1
                rule = e.delinearized()
                frozen: dict[str, Term] = {}
                for x, ty in rule.context:
                    for i in range(1, arity + 1):
                        c = f"{x}{FROZEN}{k}_{i}"
                        out.append(ConstantDecl(c, subst(lr.mu(i, ty), frozen)))
                        frozen[component(x, i)] = Const(c)
                    c = f"{x}{FROZEN}{k}_star"
                    xs = [Var(component(x, i)) for i in range(1, arity + 1)]
                    pred = beta.normalize(app(lr.translate(ty), *xs))
                    out.append(ConstantDecl(c, subst(pred, frozen)))
                    frozen[star(x)] = Const(c)
                for i in range(1, arity + 1):
                    out.append(Pragma("ASSERT", (subst(lr.mu(i, rule.lhs), frozen), subst(lr.mu(i, rule.rhs), frozen))))
                lhs = subst(beta.normalize(lr.translate(rule.lhs)), frozen)
                rhs = subst(beta.normalize(lr.translate(rule.rhs)), frozen)
                out.append(Pragma("ASSERT", (lhs, rhs)))
    return out


# ---------------------------------------------------------------------------
# Filling and ingestion


def fill_skeleton(skeleton: SkeletonFile, bodies: Mapping[str, Term | str]) -> SkeletonFile:
    """Replace ``TODO`` gaps by the given bodies (terms or source text)."""
    unknown = set(bodies) - set(skeleton.gaps)
    if unknown:
        raise SkeletonError(f"no gap named {sorted(unknown)[0]}")
    items = []
    for it in skeleton.items:
        if isinstance(it, Definition) and it.name in bodies:
            b = bodies[it.name]
            it = replace(it, body=parse_term(b) if isinstance(b, str) else b)
        items.append(it)
    return replace(skeleton, items=tuple(items))


def morphism_bodies(m: Morphism) -> dict[str, Term]:
    return {c + MU: t for c, t in m.assignment.items()}


def relation_bodies(lr: LogicalRelation) -> dict[str, Term]:
    out = {}
    for i, m in enumerate(lr.morphisms, 1):
        out.update({f"{c}{MU}_{i}": t for c, t in m.assignment.items()})
    out.update({c + LR: t for c, t in lr.assignment.items()})
    return out


_REL_NAME = re.compile(rf"^(?P<base>.+?)(?:{MU}_(?P<i>\d+)|{LR})$")


def _classify(name: str, mode: str) -> tuple[str, int | None] | None:
    """``(source name, component)`` for generated names; component 0 is the relation."""
    if mode == "morphism":
        return (name[: -len(MU)], 1) if name.endswith(MU) else None
    m = _REL_NAME.match(name)
    if m is None:
        return None
    return m["base"], int(m["i"]) if m["i"] else 0


def ingest_skeleton(
    filled: SourceFile,
    source: Theory,
    target: Theory,
    mode: str = "morphism",
    arity: int = 1,
    config: ReductionConfig = DEFAULT,
) -> Morphism | LogicalRelation:
    """Read the parameters back out of a filled skeleton.

    Entries without a generated name are helpers: they extend the target.
    References to other generated names are inlined, so the resulting
    assignment is expressed over the (extended) target alone.
    """
    source = ensure_elaborated(source, config)
    primitives = {d.name for d in source.primitives}
    definitions = source.definitions
    helpers = []
    params: dict[tuple[str, int], Term] = {}
    for item in filled.items:
        if isinstance(item, Pragma) or isinstance(item, RewriteRule):
            if isinstance(item, RewriteRule):
                helpers.append(item)
            continue
        if FROZEN in item.name:
            continue
        key = _classify(item.name, mode)
        if key is None:
            helpers.append(item)
            continue
        base, i = key
        if base not in primitives and base not in definitions:
            raise SkeletonError(f"{item.name} has no counterpart {base} in the source")
        if base in definitions:
            continue
        if not isinstance(item, Definition):
            raise SkeletonError(f"parameter {item.name} has no body")
        if TODO in constants(item.body):
            raise SkeletonError(f"parameter {item.name} is still TODO")
        if mode == "relation" and i > arity:
            raise SkeletonError(f"{item.name} exceeds the arity {arity}")
        params[(base, i)] = item.body
    for c in primitives:
        for i in ([1] if mode == "morphism" else range(arity + 1)):
            if (c, i) not in params:
                raise SkeletonError(f"parameter for {c} is missing")

    extended = target
    if helpers:
        tc = TheoryChecker(config, target)
        for h in helpers:
            tc.add(h)
        if errors(tc.diagnostics):
            raise SkeletonError(f"helper entries do not check: {errors(tc.diagnostics)[0].text()}")
        extended = Theory(tc.theory.entries, target.name, tc.theory.irrelevant)

    components = [1] if mode == "morphism" else list(range(1, arity + 1))
    morphisms = {}
    for i in components:
        suffix = MU if mode == "morphism" else f"{MU}_{i}"
        morphisms[i] = _resolve(source, extended, params, i, suffix, f"mu_{i}")
    if mode == "morphism":
        return morphisms[1]
    ms = tuple(morphisms[i] for i in components)
    lr_names = {c + LR: c for c in primitives} | {d + LR: d for d in definitions}
    mu_names = {f"{c}{MU}_{i}": (c, i) for c in _source_names(source) for i in components}
    assignment: dict[str, Term] = {}

    def inline(t: Term) -> Term:
        def image(c: str) -> Term:
            if c in lr_names:
                base = lr_names[c]
                if base in assignment:
                    return assignment[base]
                return LogicalRelation(ms, assignment, "lr").translate(definitions[base].body)
            if c in mu_names:
                base, i = mu_names[c]
                return ms[i - 1].apply(Const(base))
            return Const(c)

        return map_consts(t, image)

    for d in source.primitives:
        assignment[d.name] = inline(params[(d.name, 0)])
    return LogicalRelation(ms, assignment, "lr")


def _resolve(
    source: Theory, target: Theory, params: Mapping[tuple[str, int], Term], i: int, suffix: str, name: str
) -> Morphism:
    names = {c + suffix: c for c in _source_names(source)}
    assignment: dict[str, Term] = {}
    m = Morphism(source, target, assignment, name)

    def image(c: str) -> Term:
        base = names.get(c)
        if base is None:
            return Const(c)
        if base in assignment:
            return assignment[base]
        try:
            # Source definitions, and parameters not yet read, go through the morphism.
            return m.apply(Const(base))
        except MorphismError:
            raise SkeletonError(f"{c} is used before it is defined") from None

    for d in source.primitives:
        assignment[d.name] = map_consts(params[(d.name, i)], image)
        m = Morphism(source, target, assignment, name)
    return m


__all__ = [
    "SkeletonError",
    "SkeletonFile",
    "fill_skeleton",
    "generate_skeleton",
    "ingest_skeleton",
    "morphism_bodies",
    "relation_bodies",
]
