"""Random well-typed terms, for property tests and synthetic libraries.

Generation is goal directed: to inhabit a classifier we pick a head (a
constant or a context variable), open its Pi telescope with placeholders,
match the codomain against the goal to fix some arguments and generate the
others.  Every result is rechecked, so a bad guess costs a retry, never an
ill-typed output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .reduce import DEFAULT, FuelExhausted, ReductionConfig, Reducer
from .terms import TYPE, Const, Lam, Pi, Term, TypeSort, Var, app, close, free_vars, fresh, instantiate, open_var, spine, subst
from .theory import EMPTY_CONTEXT, Context, Theory
from .typecheck import CheckError, Checker

HOLE = "?"


# Head shapes per theory object, shared by all generators over it.
_HEADS: dict[int, tuple[Theory, list]] = {}


@dataclass(frozen=True)
class _Shape:
    """A head's classifier opened into holes and a normal codomain."""

    holes: tuple[tuple[str, Term], ...]
    codomain: Term
    key: str | None  # head symbol of the codomain; None when it is a hole


def _key(t: Term) -> str | None:
    head, _ = spine(t)
    match head:
        case Const(c) | Var(c):
            return None if c.startswith(HOLE) else c
        case TypeSort():
            return "Type"
    return "?other"


@dataclass
class TermGenerator:
    theory: Theory
    rng: random.Random = field(default_factory=lambda: random.Random(0))
    max_depth: int = 3
    config: ReductionConfig = DEFAULT
    exclude: frozenset[str] = frozenset()

    def __post_init__(self):
        self.checker = Checker(self.theory, self.config)
        self.reducer = Reducer(self.theory, self.config)
        self._shapes: dict[Term, _Shape] = {}
        cached = _HEADS.get(id(self.theory))
        if cached is None or cached[0] is not self.theory:
            cached = (self.theory, [(Const(c), self._shape(a)) for c, a in self.theory.signature.items()])
            _HEADS[id(self.theory)] = cached
        self.heads = [(h, s) for h, s in cached[1] if h.name not in self.exclude]

    def _shape(self, a: Term) -> _Shape:
        if a in self._shapes:
            return self._shapes[a]
        r = Reducer(self.theory, self.config)
        holes: list[tuple[str, Term]] = []
        cod = r.whnf(a)
        while isinstance(cod, Pi):
            h = f"{HOLE}{len(holes)}"
            holes.append((h, cod.domain))
            cod = r.whnf(instantiate(cod.body, Var(h)))
        cod = r.normalize(cod)
        shape = _Shape(tuple(holes), cod, _key(cod))
        self._shapes[a] = shape
        return shape

    # -- public entry points
    def type_(self, ctx: Context = EMPTY_CONTEXT, depth: int | None = None) -> Term | None:
        """A type (something of classifier Type) in ``ctx``."""
        depth = self.max_depth if depth is None else depth
        if depth > 0 and self.rng.random() < 0.2:
            dom = self.type_(ctx, depth - 1)
            if dom is not None:
                x = fresh("x")
                cod = self.type_(ctx.extend(x, dom), depth - 1)
                if cod is not None:
                    return Pi("x", dom, close(cod, x))
        return self.inhabit(ctx, TYPE, depth)

    def context(self, size: int) -> Context:
        ctx = EMPTY_CONTEXT
        for i in range(size):
            a = self.type_(ctx, 1)
            if a is None:
                break
            ctx = ctx.extend(f"v{i}", a)
        return ctx

    def typed_term(self, ctx: Context = EMPTY_CONTEXT, tries: int = 20) -> tuple[Term, Term] | None:
        """Some ``(t, A)`` with ``ctx |- t : A`` and ``A : Type``."""
        for _ in range(tries):
            a = self.type_(ctx, 1)
            if a is None:
                continue
            t = self.inhabit(ctx, a, self.max_depth)
            if t is not None:
                return t, a
        return None

    def inhabit(self, ctx: Context, goal: Term, depth: int) -> Term | None:
        try:
            self.reducer = Reducer(self.theory, self.config)
            t = self._inhabit(ctx, goal, depth)
            if t is None:
                return None
            self.checker.check(ctx, t, goal)
            return t
        except (CheckError, FuelExhausted, RecursionError):
            return None

    # -- search
    def _inhabit(self, ctx: Context, goal: Term, depth: int) -> Term | None:
        g = self.reducer.whnf(goal)
        if isinstance(g, Pi):
            x = fresh(g.hint)
            body = self._inhabit(ctx.extend(x, g.domain), open_var(g.body, x), depth)
            return None if body is None else Lam(g.hint, g.domain, close(body, x))
        key = _key(g)
        heads = [(Var(x), self._shape(a)) for x, a in ctx] + self.heads
        heads = [(h, s) for h, s in heads if s.key is None or s.key == key]
        if depth <= 0:
            heads = [(h, s) for h, s in heads if not s.holes]
        self.rng.shuffle(heads)
        for head, shape in heads[:8]:
            t = self._apply(ctx, head, shape, g, depth)
            if t is not None:
                return t
        return None

    def _apply(self, ctx: Context, head: Term, shape: _Shape, goal: Term, depth: int) -> Term | None:
        sigma: dict[str, Term] = {}
        if not self.reducer.match(shape.codomain, goal, frozenset(h for h, _ in shape.holes), sigma):
            return None
        args = []
        for h, dom in shape.holes:
            if h not in sigma:
                dom = subst(dom, sigma)
                if any(v.startswith(HOLE) for v in free_vars(dom)):
                    return None
                arg = self._inhabit(ctx, dom, depth - 1)
                if arg is None:
                    return None
                sigma[h] = arg
            args.append(sigma[h])
        return app(head, *args)


__all__ = ["TermGenerator"]
