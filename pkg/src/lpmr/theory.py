"""Contexts, theory entries and theories."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

from .terms import Const, Term, Var, spine, subst


@dataclass(frozen=True)
class Span:
    file: str = "<input>"
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NOWHERE = Span()


@dataclass(frozen=True)
class Context:
    entries: tuple[tuple[str, Term], ...] = ()

    def extend(self, name: str, type: Term) -> Context:
        if any(n == name for n, _ in self.entries):
            raise ValueError(f"variable {name} already declared in context")
        return Context(self.entries + ((name, type),))

    def lookup(self, name: str) -> Term | None:
        for n, t in reversed(self.entries):
            if n == name:
                return t
        return None

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, Term]]:
        return iter(self.entries)


EMPTY_CONTEXT = Context()


@dataclass(frozen=True)
class ConstantDecl:
    name: str
    type: Term
    span: Span = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class Definition:
    """``def`` (transparent, unfolds by rewriting) or ``thm`` (opaque)."""

    name: str
    type: Term
    body: Term
    opaque: bool = False
    span: Span = field(default=NOWHERE, compare=False)

    def unfolding_rule(self) -> RewriteRule:
        return RewriteRule(Const(self.name), self.body, (), name=f"{self.name}/def", span=self.span)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term
    pattern_vars: tuple[str, ...]
    # Filled by the type checker: pattern-variable typing in first-occurrence order.
    context: Context = field(default=EMPTY_CONTEXT, compare=False)
    unchecked: bool = False
    # Identifications (linear copy -> original) recovering the rule before
    # linearization, found by the type checker.
    identified: tuple[tuple[str, str], ...] = field(default=(), compare=False)
    name: str = field(default="", compare=False)
    span: Span = field(default=NOWHERE, compare=False)

    @property
    def head(self) -> str | None:
        h, _ = spine(self.lhs)
        return h.name if isinstance(h, Const) else None

    @property
    def arity(self) -> int:
        return len(spine(self.lhs)[1])

    def delinearized(self) -> RewriteRule:
        """The rule with linearized copies re-identified (itself if none)."""
        if not self.identified:
            return self
        theta = {copy: Var(orig) for copy, orig in self.identified}
        gone = {copy for copy, _ in self.identified}
        return RewriteRule(
            subst(self.lhs, theta),
            subst(self.rhs, theta),
            tuple(v for v in self.pattern_vars if v not in gone),
            Context(tuple((n, subst(t, theta)) for n, t in self.context if n not in gone)),
            self.unchecked,
            (),
            self.name,
            self.span,
        )

    def label(self) -> str:
        from .parser import pretty

        return self.name or f"{pretty(self.lhs)} --> {pretty(self.rhs)}"


Entry = Union[ConstantDecl, RewriteRule, Definition]


@dataclass(frozen=True)
class Theory:
    entries: tuple[Entry, ...] = ()
    name: str = ""
    # Type families whose inhabitants are identified when comparing proofs.
    irrelevant: frozenset[str] = frozenset()

    def extend(self, *entries: Entry, name: str | None = None) -> Theory:
        return Theory(self.entries + tuple(entries), self.name if name is None else name, self.irrelevant)

    def with_irrelevant(self, *names: str) -> Theory:
        return Theory(self.entries, self.name, self.irrelevant | frozenset(names))

    def renamed(self, name: str) -> Theory:
        return Theory(self.entries, name, self.irrelevant)

    @cached_property
    def signature(self) -> dict[str, Term]:
        return {e.name: e.type for e in self.entries if not isinstance(e, RewriteRule)}

    @cached_property
    def definitions(self) -> dict[str, Definition]:
        return {e.name: e for e in self.entries if isinstance(e, Definition)}

    @cached_property
    def primitives(self) -> list[ConstantDecl]:
        return [e for e in self.entries if isinstance(e, ConstantDecl)]

    @cached_property
    def rules(self) -> list[RewriteRule]:
        return [e for e in self.entries if isinstance(e, RewriteRule)]

    @cached_property
    def rules_by_head(self) -> dict[str, list[RewriteRule]]:
        index: dict[str, list[RewriteRule]] = {}
        for e in self.entries:
            if isinstance(e, RewriteRule):
                rule = e
            elif isinstance(e, Definition) and not e.opaque:
                rule = e.unfolding_rule()
            else:
                continue
            if rule.head is not None:
                index.setdefault(rule.head, []).append(rule)
        return index

    def lookup(self, name: str) -> Term | None:
        return self.signature.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.signature

    def names(self) -> list[str]:
        return list(self.signature)


def concat(theories: Iterable[Theory], name: str = "") -> Theory:
    entries: list[Entry] = []
    irrelevant: frozenset[str] = frozenset()
    for t in theories:
        entries.extend(t.entries)
        irrelevant |= t.irrelevant
    return Theory(tuple(entries), name, irrelevant)
