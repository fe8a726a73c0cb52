"""Locally nameless terms.

Bound variables are de Bruijn indices carrying a printing hint; free
variables are names.  Hints never take part in equality, so ``==`` on terms
is alpha-equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from .parser import pretty

        return pretty(self)


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Var(Term):
    """A free variable (context entry, pattern variable or opened binder)."""

    name: str


@dataclass(frozen=True, slots=True)
class BVar(Term):
    index: int
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class Lam(Term):
    hint: str = field(compare=False)
    domain: Term | None
    body: Term


@dataclass(frozen=True, slots=True)
class Pi(Term):
    hint: str = field(compare=False)
    domain: Term
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class TypeSort(Term):
    pass


@dataclass(frozen=True, slots=True)
class KindSort(Term):
    pass


TYPE = TypeSort()
KIND = KindSort()

Substitution = Mapping[str, Term]

_counter = itertools.count(1)

# Characters that can never occur in a surface identifier.
FRESH_SEP = "#"


def fresh(hint: str = "x") -> str:
    return f"{base_name(hint)}{FRESH_SEP}{next(_counter)}"


def base_name(name: str) -> str:
    """Strip generated suffixes so the name is usable as a printing hint."""
    return name.split(FRESH_SEP, 1)[0] or "x"


# ---------------------------------------------------------------------------
# Construction helpers


def app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def lam(name: str, domain: Term | None, body: Term) -> Lam:
    """Abstract the free variable ``name`` of ``body``."""
    return Lam(base_name(name), domain, close(body, name))


def pi(name: str, domain: Term, body: Term) -> Pi:
    return Pi(base_name(name), domain, close(body, name))


def arrow(domain: Term, codomain: Term) -> Pi:
    return Pi("_", domain, codomain)


# ---------------------------------------------------------------------------
# Binding operations


def instantiate(t: Term, u: Term, depth: int = 0) -> Term:
    """Replace bound index ``depth`` by the locally closed term ``u``."""
    match t:
        case BVar(index=i):
            if i == depth:
                return u
            if i > depth:
                return BVar(i - 1, t.hint)
            return t
        case App(f, a):
            return App(instantiate(f, u, depth), instantiate(a, u, depth))
        case Lam(h, d, b):
            return Lam(h, None if d is None else instantiate(d, u, depth), instantiate(b, u, depth + 1))
        case Pi(h, d, b):
            return Pi(h, instantiate(d, u, depth), instantiate(b, u, depth + 1))
        case _:
            return t


def open_var(body: Term, name: str) -> Term:
    return instantiate(body, Var(name))


def close(t: Term, name: str, depth: int = 0) -> Term:
    """Turn free occurrences of ``name`` into the bound index ``depth``."""
    match t:
        case Var(n) if n == name:
            return BVar(depth, base_name(name))
        case App(f, a):
            return App(close(f, name, depth), close(a, name, depth))
        case Lam(h, d, b):
            return Lam(h, None if d is None else close(d, name, depth), close(b, name, depth + 1))
        case Pi(h, d, b):
            return Pi(h, close(d, name, depth), close(b, name, depth + 1))
        case _:
            return t


def subst(t: Term, theta: Substitution) -> Term:
    """Simultaneous substitution of free variables.

    Capture cannot happen: binders are nameless and the substituted terms
    are locally closed.
    """
    if not theta:
        return t
    return _subst(t, theta)


def _subst(t: Term, theta: Substitution) -> Term:
    match t:
        case Var(n):
            return theta.get(n, t)
        case App(f, a):
            return App(_subst(f, theta), _subst(a, theta))
        case Lam(h, d, b):
            return Lam(h, None if d is None else _subst(d, theta), _subst(b, theta))
        case Pi(h, d, b):
            return Pi(h, _subst(d, theta), _subst(b, theta))
        case _:
            return t


def compose_subst(first: Substitution, second: Substitution) -> dict[str, Term]:
    """The substitution equivalent to applying ``first`` and then ``second``."""
    out = {x: subst(t, second) for x, t in first.items()}
    for x, t in second.items():
        out.setdefault(x, t)
    return out


def rename_free(t: Term, renaming: Mapping[str, str]) -> Term:
    return subst(t, {old: Var(new) for old, new in renaming.items()})


def map_consts(t: Term, f) -> Term:
    """Replace every constant ``c`` by ``f(c)`` (which must be locally closed)."""
    match t:
        case Const(c):
            return f(c)
        case App(fn, a):
            return App(map_consts(fn, f), map_consts(a, f))
        case Lam(h, d, b):
            return Lam(h, None if d is None else map_consts(d, f), map_consts(b, f))
        case Pi(h, d, b):
            return Pi(h, map_consts(d, f), map_consts(b, f))
        case _:
            return t


# ---------------------------------------------------------------------------
# Queries


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    _collect(t, out, Var)
    return out


def constants(t: Term) -> set[str]:
    out: set[str] = set()
    _collect(t, out, Const)
    return out


def _collect(t: Term, out: set[str], cls) -> None:
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, cls):
            out.add(t.name)
        elif isinstance(t, App):
            stack.append(t.fn)
            stack.append(t.arg)
        elif isinstance(t, (Lam, Pi)):
            if t.domain is not None:
                stack.append(t.domain)
            stack.append(t.body)


def is_locally_closed(t: Term, depth: int = 0) -> bool:
    match t:
        case BVar(index=i):
            return i < depth
        case App(f, a):
            return is_locally_closed(f, depth) and is_locally_closed(a, depth)
        case Lam(_, d, b) | Pi(_, d, b):
            return (d is None or is_locally_closed(d, depth)) and is_locally_closed(b, depth + 1)
        case _:
            return True


def occurs_bound(body: Term, depth: int = 0) -> bool:
    """Whether bound index ``depth`` occurs in ``body``."""
    match body:
        case BVar(index=i):
            return i == depth
        case App(f, a):
            return occurs_bound(f, depth) or occurs_bound(a, depth)
        case Lam(_, d, b) | Pi(_, d, b):
            return (d is not None and occurs_bound(d, depth)) or occurs_bound(b, depth + 1)
        case _:
            return False


def size(t: Term) -> int:
    match t:
        case App(f, a):
            return 1 + size(f) + size(a)
        case Lam(_, d, b) | Pi(_, d, b):
            return 1 + (0 if d is None else size(d)) + size(b)
        case _:
            return 1


def names_in(ts: Iterable[Term]) -> set[str]:
    out: set[str] = set()
    for t in ts:
        out |= free_vars(t) | constants(t)
    return out
