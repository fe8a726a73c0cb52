"""Concrete syntax: a small Dedukti-like format.

    c : A.                      declaration
    def c : A := t.             definition (unfolds)
    def c : A.                  declaration of a symbol defined by rules
    thm c : A := t.             opaque definition
    [x, y] lhs --> rhs.         rewrite rule with pattern variables x, y
    #REQUIRE m.   #ASSERT t == u.   #CHECK t : A.   #EVAL t.   #IRRELEVANT c.

Terms: ``x : A -> B``, ``A -> B``, ``x => t``, ``x : A => t``, application by
juxtaposition, parentheses, ``Type``.  Comments are ``(; ... ;)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .terms import (
    KIND,
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
    constants,
    free_vars,
    occurs_bound,
)
from .theory import ConstantDecl, Definition, RewriteRule, Span

KEYWORDS = frozenset({"def", "thm", "Type", "Kind"})
SYMBOLS = ("-->", "->", "=>", ":=", "==", ":", ".", ",", "(", ")", "[", "]")
_IDENT_CHARS = re.compile(r"[\w']+", re.UNICODE)
_VALID_IDENT = re.compile(r"[A-Za-z0-9_']+")


class ParseError(Exception):
    def __init__(self, message: str, span: Span, expected: Iterable[str] = ()):
        self.message = message
        self.span = span
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{span}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "pragma", a symbol, or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in text[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(1)
            continue
        if text.startswith("(;", i):
            start = Span(file, line, col)
            depth = 0
            while i < n:
                if text.startswith("(;", i):
                    depth += 1
                    advance(2)
                elif text.startswith(";)", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            if depth:
                raise ParseError("unterminated comment", start, {";)"})
            continue
        if ch == "#":
            m = _IDENT_CHARS.match(text, i + 1)
            if not m:
                raise ParseError("expected pragma name after '#'", Span(file, line, col), {"pragma"})
            tokens.append(Token("pragma", m.group(0).upper(), line, col))
            advance(m.end() - i)
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                advance(len(sym))
                break
        else:
            m = _IDENT_CHARS.match(text, i)
            if not m:
                raise ParseError(f"unexpected character {ch!r}", Span(file, line, col), {"identifier"})
            tokens.append(Token("ident", m.group(0), line, col))
            advance(m.end() - i)
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Source files


@dataclass(frozen=True)
class Pragma:
    kind: str  # ASSERT | CHECK | EVAL | IRRELEVANT
    terms: tuple[Term, ...] = ()
    name: str = ""
    span: Span = field(default=Span(), compare=False)

    def __post_init__(self):
        if self.kind == "ASSERT" and len(self.terms) != 2:
            raise ValueError("#ASSERT carries exactly two terms")


Item = Union[ConstantDecl, Definition, RewriteRule, Pragma]


@dataclass(frozen=True)
class SourceFile:
    module: str
    requires: tuple[tuple[str, Span], ...] = ()
    items: tuple[Item, ...] = ()

    @property
    def entries(self) -> list[Union[ConstantDecl, Definition, RewriteRule]]:
        return [it for it in self.items if not isinstance(it, Pragma)]

    @property
    def pragmas(self) -> list[Pragma]:
        return [it for it in self.items if isinstance(it, Pragma)]


class _Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.toks = tokenize(text, file)
        self.pos = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def span(self, tok: Token | None = None) -> Span:
        tok = tok or self.tok
        return Span(self.file, tok.line, tok.col)

    def error(self, message: str, expected: Iterable[str]) -> ParseError:
        return ParseError(message, self.span(), expected)

    def expect(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", {kind})
        self.pos += 1
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            found = tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", {"identifier"})
        self.pos += 1
        return tok

    # -- terms
    def term(self, bound: list[str], free: frozenset[str]) -> Term:
        tok = self.tok
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            nxt = self.peek()
            if nxt.kind == "=>":
                self.pos += 2
                body = self.term(bound + [tok.text], free)
                return Lam(tok.text, None, body)
            if nxt.kind == ":":
                self.pos += 2
                dom = self.app_term(bound, free)
                if self.tok.kind == "->":
                    self.pos += 1
                    return Pi(tok.text, dom, self.term(bound + [tok.text], free))
                if self.tok.kind == "=>":
                    self.pos += 1
                    return Lam(tok.text, dom, self.term(bound + [tok.text], free))
                raise self.error("expected '->' or '=>' after binder domain", {"->", "=>"})
        left = self.app_term(bound, free)
        if self.tok.kind == "->":
            self.pos += 1
            # The codomain lives under an anonymous binder.
            return Pi("_", left, self.term(bound + [None], free))
        return left

    def app_term(self, bound: list, free: frozenset[str]) -> Term:
        t = self.atom(bound, free)
        while self.tok.kind in ("ident", "("):
            t = App(t, self.atom(bound, free))
        return t

    def atom(self, bound: list, free: frozenset[str]) -> Term:
        tok = self.tok
        if tok.kind == "(":
            self.pos += 1
            t = self.term(bound, free)
            self.expect(")")
            return t
        if tok.kind == "ident":
            self.pos += 1
            if tok.text == "Type":
                return TYPE
            if tok.text == "Kind":
                return KIND
            if tok.text in KEYWORDS:
                self.pos -= 1
                raise self.error(f"unexpected keyword {tok.text!r}", {"identifier", "("})
            for depth, name in enumerate(reversed(bound)):
                if name == tok.text:
                    return BVar(depth, name)
            if tok.text in free:
                return Var(tok.text)
            return Const(tok.text)
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}", {"identifier", "(", "Type"})

    # -- entries
    def file_(self, module: str) -> SourceFile:
        requires: list[tuple[str, Span]] = []
        items: list[Item] = []
        while self.tok.kind != "eof":
            start = self.span()
            tok = self.tok
            if tok.kind == "pragma":
                self.pos += 1
                if tok.text == "REQUIRE":
                    name = self.ident().text
                    requires.append((name, start))
                elif tok.text == "ASSERT":
                    t = self.term([], frozenset())
                    self.expect("==")
                    u = self.term([], frozenset())
                    items.append(Pragma("ASSERT", (t, u), span=start))
                elif tok.text == "CHECK":
                    t = self.app_term([], frozenset())
                    self.expect(":")
                    a = self.term([], frozenset())
                    items.append(Pragma("CHECK", (t, a), span=start))
                elif tok.text == "EVAL":
                    items.append(Pragma("EVAL", (self.term([], frozenset()),), span=start))
                elif tok.text == "IRRELEVANT":
                    items.append(Pragma("IRRELEVANT", name=self.ident().text, span=start))
                else:
                    self.pos -= 1
                    raise self.error(
                        f"unknown pragma #{tok.text}", {"#REQUIRE", "#ASSERT", "#CHECK", "#EVAL", "#IRRELEVANT"}
                    )
                self.expect(".")
                continue
            if tok.kind == "[":
                items.append(self.rule(start))
                continue
            if tok.kind == "ident" and tok.text in ("def", "thm"):
                self.pos += 1
                name = self.ident().text
                self.expect(":")
                ty = self.term([], frozenset())
                if self.tok.kind == ":=":
                    self.pos += 1
                    body = self.term([], frozenset())
                    self.expect(".")
                    items.append(Definition(name, ty, body, opaque=tok.text == "thm", span=start))
                else:
                    if tok.text == "thm":
                        raise self.error("a theorem needs a body", {":="})
                    self.expect(".")
                    items.append(ConstantDecl(name, ty, span=start))
                continue
            name = self.ident().text
            self.expect(":")
            ty = self.term([], frozenset())
            self.expect(".")
            items.append(ConstantDecl(name, ty, span=start))
        return SourceFile(module, tuple(requires), tuple(items))

    def rule(self, start: Span) -> RewriteRule:
        self.expect("[")
        pvars: list[str] = []
        while self.tok.kind != "]":
            pvars.append(self.ident().text)
            if self.tok.kind == ",":
                self.pos += 1
            elif self.tok.kind != "]":
                raise self.error("expected ',' or ']'", {",", "]"})
        self.pos += 1
        free = frozenset(pvars)
        lhs = self.term([], free)
        self.expect("-->")
        rhs = self.term([], free)
        self.expect(".")
        return RewriteRule(lhs, rhs, tuple(pvars), span=start)


def parse_file(text: str, module: str = "main", file: str | None = None) -> SourceFile:
    return _Parser(text, file or f"{module}.dk").file_(module)


def parse_path(path: str | Path) -> SourceFile:
    path = Path(path)
    return parse_file(path.read_text(encoding="utf-8"), path.stem, str(path))


def parse_term(text: str, free: Iterable[str] = ()) -> Term:
    """Parse a single term; names in ``free`` become free variables."""
    p = _Parser(text, "<term>")
    t = p.term([], frozenset(free))
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after term", {"end of input"})
    return t


# ---------------------------------------------------------------------------
# Printing


def sanitize(name: str) -> str:
    name = name.replace("@*", "_star").replace("*", "_star").replace("@", "_").replace("#", "_")
    name = "".join(ch for ch in name if _VALID_IDENT.fullmatch(ch))
    if not name or name in KEYWORDS or name == "_":
        return "x"
    return name


class _Printer:
    def __init__(self, avoid: set[str]):
        self.avoid = avoid

    def pick(self, hint: str, scope: list[str]) -> str:
        base = sanitize(hint)
        name, k = base, 0
        while name in self.avoid or name in scope:
            k += 1
            name = f"{base}{k}"
        return name

    def show(self, t: Term, level: int, scope: list[str]) -> str:
        match t:
            case Const(c):
                return c
            case Var(n):
                return sanitize(n)
            case BVar(index=i):
                if i < len(scope):
                    return scope[-1 - i]
                return f"?{i}"
            case TypeSort():
                return "Type"
            case KindSort():
                return "Kind"
            case App(f, a):
                s = f"{self.show(f, 1, scope)} {self.show(a, 2, scope)}"
                return f"({s})" if level > 1 else s
            case Pi(h, d, b):
                dom = self.show(d, 1, scope)
                if occurs_bound(b):
                    x = self.pick(h, scope)
                    s = f"{x} : {dom} -> {self.show(b, 0, scope + [x])}"
                else:
                    # The anonymous binder must still occupy a scope slot.
                    s = f"{dom} -> {self.show(b, 0, scope + ['_'])}"
                return f"({s})" if level > 0 else s
            case Lam(h, d, b):
                x = self.pick(h, scope)
                head = x if d is None else f"{x} : {self.show(d, 1, scope)}"
                s = f"{head} => {self.show(b, 0, scope + [x])}"
                return f"({s})" if level > 0 else s
        raise TypeError(f"not a term: {t!r}")


def pretty(t: Term) -> str:
    avoid = {sanitize(n) for n in free_vars(t)} | constants(t)
    return _Printer(avoid).show(t, 0, [])


def pretty_rule(rule: RewriteRule) -> str:
    avoid = set(rule.pattern_vars) | constants(rule.lhs) | constants(rule.rhs)
    p = _Printer(avoid)
    return f"[{', '.join(rule.pattern_vars)}] {p.show(rule.lhs, 0, [])} --> {p.show(rule.rhs, 0, [])}."


def pretty_item(item: Item) -> str:
    match item:
        case ConstantDecl(name, ty):
            return f"{name} : {pretty(ty)}."
        case Definition(name, ty, body, opaque):
            kw = "thm" if opaque else "def"
            return f"{kw} {name} : {pretty(ty)} := {pretty(body)}."
        case RewriteRule():
            return pretty_rule(item)
        case Pragma(kind="ASSERT", terms=(t, u)):
            return f"#ASSERT {pretty(t)} == {pretty(u)}."
        case Pragma(kind="CHECK", terms=(t, a)):
            return f"#CHECK {_Printer(set()).show(t, 1, [])} : {pretty(a)}."
        case Pragma(kind="EVAL", terms=(t,)):
            return f"#EVAL {pretty(t)}."
        case Pragma(kind="IRRELEVANT", name=name):
            return f"#IRRELEVANT {name}."
    raise TypeError(f"cannot print {item!r}")


def pretty_file(src: SourceFile) -> str:
    lines = [f"#REQUIRE {name}." for name, _ in src.requires]
    if lines:
        lines.append("")
    lines.extend(pretty_item(it) for it in src.items)
    return "\n".join(lines) + "\n"


__all__ = [
    "ParseError",
    "Pragma",
    "SourceFile",
    "parse_file",
    "parse_path",
    "parse_term",
    "pretty",
    "pretty_file",
    "pretty_item",
    "pretty_rule",
    "tokenize",
]
