"""n-ary logical relations over n theory morphisms.

Every variable ``x`` of the source is duplicated into ``x@1 .. x@n`` (its
images under the morphisms) and ``x@*`` (the proof that the images are
related).  ``@`` never occurs in surface identifiers, so these names cannot
collide with user names.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .morphism import (
    ConditionResult,
    Morphism,
    MorphismError,
    MorphismReport,
    _check_constant,
    _check_rule_images,
    constant_condition,
    ensure_elaborated,
    pretty_rule_sides,
)
from .reduce import DEFAULT, ReductionConfig
from .terms import (
    TYPE,
    App,
    BVar,
    Const,
    KindSort,
    Lam,
    Pi,
    Term,
    TypeSort,
    Var,
    app,
    base_name,
    close,
    free_vars,
    fresh,
    open_var,
    rename_free,
)
from .theory import Context, Theory
from .typecheck import Checker

SEP = "@"


def component(x: str, i: int) -> str:
    return f"{x}{SEP}{i}"


def star(x: str) -> str:
    return f"{x}{SEP}*"


class RelationError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class LogicalRelation:
    morphisms: tuple[Morphism, ...]
    assignment: Mapping[str, Term]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "morphisms", tuple(self.morphisms))
        object.__setattr__(self, "assignment", dict(self.assignment))
        if not self.morphisms:
            raise RelationError("a logical relation needs at least one morphism")
        first = self.morphisms[0]
        for m in self.morphisms[1:]:
            if m.source.entries != first.source.entries or m.target.entries != first.target.entries:
                raise RelationError("all morphisms of a relation must share source and target")

    @property
    def arity(self) -> int:
        return len(self.morphisms)

    @property
    def source(self) -> Theory:
        return self.morphisms[0].source

    @property
    def target(self) -> Theory:
        return self.morphisms[0].target

    # -- images of the underlying morphisms, with variables renamed apart
    def mu(self, i: int, t: Term) -> Term:
        """Image under morphism ``i`` (1-based), free ``x`` becoming ``x@i``."""
        image = self.morphisms[i - 1].apply(t)
        return rename_free(image, {x: component(x, i) for x in free_vars(t)})

    def mus(self, t: Term) -> list[Term]:
        return [self.mu(i, t) for i in range(1, self.arity + 1)]

    # -- the translation
    def translate(self, t: Term) -> Term:
        match t:
            case Var(x):
                return Var(star(x))
            case Const(c):
                if c in self.assignment:
                    return self.assignment[c]
                d = self.source.definitions.get(c)
                if d is not None:
                    return self.translate(d.body)
                raise RelationError(f"no relation parameter for constant {c}")
            case App(f, a):
                return app(self.translate(f), *self.mus(a), self.translate(a))
            case Lam(h, d, b):
                x = fresh(h)
                body = self.translate(open_var(b, x))
                if d is None:
                    doms: list[Term | None] = [None] * self.arity
                    star_dom = None
                else:
                    doms = self.mus(d)
                    star_dom = app(self.translate(d), *(Var(component(x, i)) for i in range(1, self.arity + 1)))
                return self._bind(Lam, x, h, doms, star_dom, body)
            case Pi(h, d, b):
                x = fresh(h)
                fs = [fresh("f") for _ in range(self.arity)]
                xs = [Var(component(x, i)) for i in range(1, self.arity + 1)]
                inner = self.translate(open_var(b, x))
                inner = app(inner, *(App(Var(f), xi) for f, xi in zip(fs, xs)))
                star_dom = app(self.translate(d), *xs)
                out = self._bind(Pi, x, h, self.mus(d), star_dom, inner)
                for f, fty in reversed(list(zip(fs, self.mus(t)))):
                    out = Lam("f", fty, close(out, f))
                return out
            case TypeSort() | KindSort():
                raise RelationError("kinds are translated with translate_kind")
            case BVar():
                raise RelationError("dangling bound variable")
        raise RelationError(f"not a term: {t!r}")

    def _bind(self, cls, x: str, hint: str, doms, star_dom, body: Term) -> Term:
        hint = base_name(hint)
        out = cls(hint + "_star" if hint != "_" else "h", star_dom, close(body, star(x)))
        for i in range(self.arity, 0, -1):
            out = cls(hint if hint != "_" else "x", doms[i - 1], close(out, component(x, i)))
        return out

    def translate_kind(self, r: Term, k: Term) -> Term:
        """The relativized translation of kind ``k`` for a family ``r`` of that kind."""
        match k:
            case TypeSort():
                out: Term = TYPE
                for img in reversed(self.mus(r)):
                    out = Pi("_", img, out)
                return out
            case Pi(h, d, b):
                x = fresh(h)
                xs = [Var(component(x, i)) for i in range(1, self.arity + 1)]
                inner = self.translate_kind(App(r, Var(x)), open_var(b, x))
                star_dom = app(self.translate(d), *xs)
                return self._bind(Pi, x, h, self.mus(d), star_dom, inner)
        raise RelationError(f"not a kind: {k}")

    def translate_context(self, ctx: Context) -> Context:
        out: list[tuple[str, Term]] = []
        for x, a in ctx:
            xs = []
            for i in range(1, self.arity + 1):
                out.append((component(x, i), self.mu(i, a)))
                xs.append(Var(component(x, i)))
            out.append((star(x), app(self.translate(a), *xs)))
        return Context(tuple(out))

    def translate_subst(self, theta: Mapping[str, Term]) -> dict[str, Term]:
        out: dict[str, Term] = {}
        for x, t in theta.items():
            for i in range(1, self.arity + 1):
                out[component(x, i)] = self.mu(i, t)
            out[star(x)] = self.translate(t)
        return out

    def expected_type(self, c: str, classifier: Term, is_family: bool) -> Term:
        """The classifier an assignment for constant ``c`` must have."""
        if is_family:
            return self.translate_kind(Const(c), classifier)
        return app(self.translate(classifier), *self.mus(Const(c)))


def translate_term(lr: LogicalRelation, t: Term) -> Term:
    return lr.translate(t)


def translate_kind(lr: LogicalRelation, r: Term, k: Term) -> Term:
    return lr.translate_kind(r, k)


def translate_context(lr: LogicalRelation, ctx: Context) -> Context:
    return lr.translate_context(ctx)


def check_relation(lr: LogicalRelation, config: ReductionConfig = DEFAULT) -> MorphismReport:
    source = ensure_elaborated(lr.source, config)
    morphisms = [Morphism(source, m.target, m.assignment, m.name) for m in lr.morphisms]
    lr = LogicalRelation(morphisms, lr.assignment, lr.name)
    checker = Checker(lr.target, config)
    results: list[ConditionResult] = []
    for decl in source.primitives:
        cond = constant_condition(source, decl, config)
        try:
            expected = lr.expected_type(decl.name, decl.type, cond == 2)
        except (RelationError, MorphismError) as err:
            results.append(ConditionResult(cond, decl.name, False, "missing", str(err), span=decl.span))
            continue
        results.append(_check_constant(checker, cond, decl.name, lr.assignment.get(decl.name), expected, decl.span))
    for i, rule in enumerate(source.rules):
        rule = rule.delinearized()
        label = rule.label() if rule.name else f"rule {i + 1}: {pretty_rule_sides(rule)}"
        try:
            lhs, rhs = lr.translate(rule.lhs), lr.translate(rule.rhs)
            ctx = lr.translate_context(rule.context)
        except (RelationError, MorphismError) as err:
            results.append(ConditionResult(3, label, False, "missing", str(err), span=rule.span))
            continue
        results.append(_check_rule_images(lr.target, label, lhs, rhs, ctx, config, rule.span))
    return MorphismReport(tuple(results))


def relation_from_parts(morphisms: Sequence[Morphism], assignment: Mapping[str, Term], name: str = "") -> LogicalRelation:
    return LogicalRelation(tuple(morphisms), assignment, name)


__all__ = [
    "LogicalRelation",
    "RelationError",
    "check_relation",
    "component",
    "star",
    "translate_context",
    "translate_kind",
    "translate_term",
]
