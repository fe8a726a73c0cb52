"""Matching, weak-head and full normalization, and untyped conversion."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterator

from .terms import (
    App,
    Const,
    KindSort,
    Lam,
    Pi,
    Term,
    TypeSort,
    Var,
    app,
    close,
    fresh,
    instantiate,
    open_var,
    spine,
    subst,
)
from .theory import RewriteRule, Theory

# Terms are traversed recursively; deep spines need more room than the default.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

DEFAULT_FUEL = 100_000


@dataclass(frozen=True)
class ReductionConfig:
    eta: bool = False
    fuel: int = DEFAULT_FUEL

    def __post_init__(self):
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")


DEFAULT = ReductionConfig()


class FuelExhausted(Exception):
    """Raised when a reduction exceeds its step budget (possible divergence)."""


class Reducer:
    """Reduction machinery for one theory with a shared step budget.

    Each public helper below builds a fresh reducer, so budgets and the
    conversion cache are local to one call.
    """

    def __init__(self, theory: Theory, config: ReductionConfig = DEFAULT):
        self.theory = theory
        self.config = config
        self.rules = theory.rules_by_head
        self.steps = 0
        self._known_convertible: set[tuple[Term, Term]] = set()
        # Weak head normal forms by object identity: matching asks for the same
        # argument once per candidate rule.  The key term is kept alive with it.
        self._whnf_memo: dict[int, tuple[Term, Term]] = {}

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.config.fuel:
            raise FuelExhausted(f"reduction exceeded {self.config.fuel} steps")

    # -- matching
    def match(self, pattern: Term, t: Term, pvars: frozenset[str], sigma: dict[str, Term]) -> bool:
        if isinstance(pattern, Var) and pattern.name in pvars:
            bound = sigma.get(pattern.name)
            if bound is None:
                sigma[pattern.name] = t
                return True
            # Nonlinear occurrence: instances must agree up to conversion.
            return self.convertible(bound, t)
        phead, pargs = spine(pattern)
        thead, targs = spine(self.whnf(t))
        if len(pargs) != len(targs):
            return False
        match phead, thead:
            case Const(a), Const(b) if a == b:
                pass
            case Var(a), Var(b) if a == b:
                pass
            case TypeSort(), TypeSort():
                pass
            case _:
                return False
        return all(self.match(p, a, pvars, sigma) for p, a in zip(pargs, targs))

    def match_rule(self, rule: RewriteRule, args: list[Term]) -> dict[str, Term] | None:
        _, pargs = spine(rule.lhs)
        if len(pargs) > len(args):
            return None
        sigma: dict[str, Term] = {}
        pvars = frozenset(rule.pattern_vars)
        for p, a in zip(pargs, args):
            if not self.match(p, a, pvars, sigma):
                return None
        return sigma

    # -- head reduction
    def head_step(self, t: Term) -> Term | None:
        """One root step (beta or the first matching rule), or None."""
        head, args = spine(t)
        if isinstance(head, Lam) and args:
            return app(instantiate(head.body, args[0]), *args[1:])
        if isinstance(head, Const):
            for rule in self.rules.get(head.name, ()):
                sigma = self.match_rule(rule, args)
                if sigma is not None:
                    return app(subst(rule.rhs, sigma), *args[rule.arity :])
        return None

    def whnf(self, t: Term) -> Term:
        hit = self._whnf_memo.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        start = t
        while True:
            nxt = self.head_step(t)
            if nxt is None:
                break
            self.tick()
            t = nxt
        self._whnf_memo[id(start)] = (start, t)
        return t

    # -- normal forms
    def normalize(self, t: Term) -> Term:
        t = self.whnf(t)
        head, args = spine(t)
        match head:
            case Lam(h, d, b):
                x = fresh(h)
                head = Lam(h, None if d is None else self.normalize(d), close(self.normalize(open_var(b, x)), x))
            case Pi(h, d, b):
                x = fresh(h)
                head = Pi(h, self.normalize(d), close(self.normalize(open_var(b, x)), x))
        return app(head, *(self.normalize(a) for a in args))

    def normalize_innermost(self, t: Term) -> Term:
        """Arguments first (right to left), then the root."""
        match t:
            case App(f, a):
                a = self.normalize_innermost(a)
                f = self.normalize_innermost(f)
                return self._root_innermost(App(f, a))
            case Const():
                return self._root_innermost(t)
            case Lam(h, d, b):
                x = fresh(h)
                body = close(self.normalize_innermost(open_var(b, x)), x)
                return Lam(h, None if d is None else self.normalize_innermost(d), body)
            case Pi(h, d, b):
                x = fresh(h)
                body = close(self.normalize_innermost(open_var(b, x)), x)
                return Pi(h, self.normalize_innermost(d), body)
        return t

    def _root_innermost(self, t: Term) -> Term:
        # Only the outermost application node of a spine sees every argument;
        # inner nodes are tried too so that rules of smaller arity fire first.
        nxt = self.head_step(t)
        if nxt is None:
            return t
        self.tick()
        return self.normalize_innermost(nxt)

    # -- conversion
    def convertible(self, t: Term, u: Term) -> bool:
        if t == u:
            return True
        key = (t, u)
        if key in self._known_convertible:
            return True
        ok = self._convertible(self.whnf(t), self.whnf(u))
        if ok:
            self._known_convertible.add(key)
        return ok

    def _convertible(self, t: Term, u: Term) -> bool:
        if t == u:
            return True
        match t, u:
            case Lam(h, _, b1), Lam(_, _, b2):
                # Domains play no part in untyped conversion.
                x = fresh(h)
                return self.convertible(open_var(b1, x), open_var(b2, x))
            case Pi(h, d1, b1), Pi(_, d2, b2):
                x = fresh(h)
                return self.convertible(d1, d2) and self.convertible(open_var(b1, x), open_var(b2, x))
            case Lam(h, _, b), _ if self.config.eta and not isinstance(u, (Pi, TypeSort, KindSort)):
                x = fresh(h)
                return self.convertible(open_var(b, x), App(u, Var(x)))
            case _, Lam(h, _, b) if self.config.eta and not isinstance(t, (Pi, TypeSort, KindSort)):
                x = fresh(h)
                return self.convertible(App(t, Var(x)), open_var(b, x))
        h1, args1 = spine(t)
        h2, args2 = spine(u)
        if len(args1) != len(args2) or isinstance(h1, (Lam, Pi)) or h1 != h2:
            return False
        return all(self.convertible(a, b) for a, b in zip(args1, args2))


# ---------------------------------------------------------------------------
# Public entry points (one budget per call)


def whnf(theory: Theory, t: Term, config: ReductionConfig = DEFAULT) -> Term:
    return Reducer(theory, config).whnf(t)


def normalize(theory: Theory, t: Term, config: ReductionConfig = DEFAULT, strategy: str = "outermost") -> Term:
    r = Reducer(theory, config)
    if strategy == "outermost":
        return r.normalize(t)
    if strategy == "innermost":
        return r.normalize_innermost(t)
    raise ValueError(f"unknown strategy {strategy!r}")


def convertible(theory: Theory, t: Term, u: Term, config: ReductionConfig = DEFAULT) -> bool:
    return Reducer(theory, config).convertible(t, u)


def match_pattern(lhs: Term, t: Term, config: ReductionConfig = DEFAULT, theory: Theory = Theory()) -> dict[str, Term] | None:
    """Match an algebraic pattern whose free variables are the pattern variables."""
    from .terms import free_vars

    sigma: dict[str, Term] = {}
    ok = Reducer(theory, config).match(lhs, t, frozenset(free_vars(lhs)), sigma)
    return sigma if ok else None


# ---------------------------------------------------------------------------
# One-step reducts, for building convertible pairs in tests


def _syntactic_match(pattern: Term, t: Term, pvars: frozenset[str], sigma: dict[str, Term]) -> bool:
    if isinstance(pattern, Var) and pattern.name in pvars:
        if pattern.name in sigma:
            return sigma[pattern.name] == t
        sigma[pattern.name] = t
        return True
    match pattern, t:
        case App(pf, pa), App(tf, ta):
            return _syntactic_match(pf, tf, pvars, sigma) and _syntactic_match(pa, ta, pvars, sigma)
    return pattern == t


def root_reducts(theory: Theory, t: Term) -> Iterator[Term]:
    head, args = spine(t)
    if isinstance(head, Lam) and args:
        yield app(instantiate(head.body, args[0]), *args[1:])
    if isinstance(head, Const):
        for rule in theory.rules_by_head.get(head.name, ()):
            if rule.arity > len(args):
                continue
            sigma: dict[str, Term] = {}
            lhs_args = spine(rule.lhs)[1]
            pvars = frozenset(rule.pattern_vars)
            if all(_syntactic_match(p, a, pvars, sigma) for p, a in zip(lhs_args, args)):
                yield app(subst(rule.rhs, sigma), *args[rule.arity :])


def reducts(theory: Theory, t: Term) -> Iterator[Term]:
    """All terms reachable from ``t`` in exactly one rewrite or beta step."""
    yield from root_reducts(theory, t)
    match t:
        case App(f, a):
            for f2 in reducts(theory, f):
                yield App(f2, a)
            for a2 in reducts(theory, a):
                yield App(f, a2)
        case Lam(h, d, b) | Pi(h, d, b):
            if d is not None:
                for d2 in reducts(theory, d):
                    yield type(t)(h, d2, b)
            x = fresh(h)
            for b2 in reducts(theory, open_var(b, x)):
                yield type(t)(h, d, close(b2, x))


__all__ = [
    "DEFAULT",
    "FuelExhausted",
    "ReductionConfig",
    "Reducer",
    "convertible",
    "match_pattern",
    "normalize",
    "reducts",
    "root_reducts",
    "whnf",
]
