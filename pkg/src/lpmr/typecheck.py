"""Bidirectional type checking for lambda-Pi modulo rewriting.

``infer`` implements the syntax-directed rules; conversion is consulted at
every checking position.  ``TheoryChecker`` processes theory entries and
pragmas in order and produces diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable

from .parser import Pragma, pretty
from .reduce import DEFAULT, FuelExhausted, ReductionConfig, Reducer
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
    app,
    close,
    free_vars,
    fresh,
    instantiate,
    occurs_bound,
    open_var,
    spine,
    subst,
)
from .theory import (
    EMPTY_CONTEXT,
    NOWHERE,
    ConstantDecl,
    Context,
    Definition,
    Entry,
    RewriteRule,
    Span,
    Theory,
)


class CheckError(Exception):
    def __init__(self, code: str, message: str, expected: Term | None = None, actual: Term | None = None):
        self.code = code
        self.message = message
        self.expected = expected
        self.actual = actual
        super().__init__(message)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning | info
    code: str
    message: str
    span: Span = NOWHERE
    expected: Term | None = None
    actual: Term | None = None

    def text(self) -> str:
        where = "" if self.span == NOWHERE else f" {self.span}"
        out = f"{self.severity}{where} {self.code} {self.message}"
        if self.expected is not None and self.actual is not None:
            out += f" (expected {pretty(self.expected)}, got {pretty(self.actual)})"
        return out

    def to_json(self) -> str:
        obj = {
            "severity": self.severity,
            "file": self.span.file,
            "line": self.span.line,
            "col": self.span.col,
            "code": self.code,
            "message": self.message,
        }
        if self.expected is not None:
            obj["expected"] = pretty(self.expected)
        if self.actual is not None:
            obj["actual"] = pretty(self.actual)
        return json.dumps(obj)

    @classmethod
    def from_error(cls, err: CheckError, span: Span, severity: str = "error") -> Diagnostic:
        return cls(severity, err.code, err.message, span, err.expected, err.actual)


def errors(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


# ---------------------------------------------------------------------------
# Terms


class Checker:
    def __init__(self, theory: Theory, config: ReductionConfig = DEFAULT):
        self.theory = theory
        self.config = config

    def reducer(self) -> Reducer:
        # A fresh budget for each conversion question.
        return Reducer(self.theory, self.config)

    def whnf(self, t: Term) -> Term:
        return self.reducer().whnf(t)

    def convertible(self, t: Term, u: Term) -> bool:
        return self.reducer().convertible(t, u)

    def mismatch(self, expected: Term, actual: Term, what: str = "classifier mismatch") -> CheckError:
        r = self.reducer()
        try:
            expected, actual = r.whnf(expected), r.whnf(actual)
        except FuelExhausted:
            pass
        return CheckError("mismatch", what, expected, actual)

    def infer(self, ctx: Context, t: Term) -> Term:
        match t:
            case TypeSort():
                return KIND
            case KindSort():
                raise CheckError("kind", "Kind has no classifier")
            case Const(c):
                ty = self.theory.lookup(c)
                if ty is None:
                    raise CheckError("unbound", f"unbound constant {c}")
                return ty
            case Var(x):
                ty = ctx.lookup(x)
                if ty is None:
                    raise CheckError("unbound", f"unbound variable {x}")
                return ty
            case BVar():
                raise CheckError("scope", "dangling bound variable")
            case App() if (u := self._contract_untyped(ctx, t)) is not None:
                return self.infer(ctx, u)
            case App(f, a):
                fty = self.whnf(self.infer(ctx, f))
                if not isinstance(fty, Pi):
                    raise CheckError("not-a-product", f"{pretty(f)} is applied but has classifier {pretty(fty)}")
                self.check(ctx, a, fty.domain)
                return instantiate(fty.body, a)
            case Lam(h, None, _):
                raise CheckError("cannot-infer", f"cannot infer the type of the unannotated abstraction over {h}")
            case Lam(h, d, b):
                self.check_type(ctx, d)
                x = fresh(h)
                inner = ctx.extend(x, d)
                bty = self.infer(inner, open_var(b, x))
                if bty == KIND:
                    raise CheckError("abstraction-over-kind", "cannot abstract over a term whose classifier is Kind")
                # The codomain must itself be a type or a kind.
                self.sort(inner, bty)
                return Pi(h, d, close(bty, x))
            case Pi(h, d, b):
                self.check_type(ctx, d)
                x = fresh(h)
                return self.sort(ctx.extend(x, d), open_var(b, x))
        raise CheckError("internal", f"not a term: {t!r}")

    def sort(self, ctx: Context, t: Term) -> Term:
        """Classifier of ``t``, which must be Type or Kind."""
        s = self.whnf(self.infer(ctx, t))
        if s not in (TYPE, KIND):
            raise CheckError("not-a-type", f"{pretty(t)} is neither a type nor a kind (classifier {pretty(s)})")
        return s

    def check_type(self, ctx: Context, t: Term) -> None:
        s = self.whnf(self.infer(ctx, t))
        if s != TYPE:
            raise CheckError("not-a-type", f"domain {pretty(t)} is not a type", TYPE, s)

    def check(self, ctx: Context, t: Term, expected: Term) -> None:
        if isinstance(t, Lam):
            e = self.whnf(expected)
            if isinstance(e, Pi):
                if t.domain is not None:
                    self.check_type(ctx, t.domain)
                    if not self.convertible(t.domain, e.domain):
                        raise self.mismatch(e.domain, t.domain, "abstraction domain mismatch")
                x = fresh(t.hint)
                self.check(ctx.extend(x, t.domain or e.domain), open_var(t.body, x), open_var(e.body, x))
                return
            if t.domain is None:
                raise CheckError("cannot-infer", f"abstraction checked against non-product {pretty(e)}")
        if isinstance(t, App) and (u := self._contract_untyped(ctx, t)) is not None:
            return self.check(ctx, u, expected)
        actual = self.infer(ctx, t)
        if not self.convertible(actual, expected):
            raise self.mismatch(expected, actual)

    def _contract_untyped(self, ctx: Context, t: Term) -> Term | None:
        """Contract a head redex whose abstraction has no annotation.

        Such redexes are left behind by translation.  The argument is typed
        first, unless it is itself unannotated and gets checked where used.
        """
        head, args = spine(t)
        if not (isinstance(head, Lam) and head.domain is None):
            return None
        try:
            self.infer(ctx, args[0])
        except CheckError as err:
            if err.code != "cannot-infer" or not occurs_bound(head.body):
                raise
        return app(instantiate(head.body, args[0]), *args[1:])


def infer(theory: Theory, ctx: Context, t: Term, config: ReductionConfig = DEFAULT) -> Term:
    return Checker(theory, config).infer(ctx, t)


def check(theory: Theory, ctx: Context, t: Term, expected: Term, config: ReductionConfig = DEFAULT) -> None:
    Checker(theory, config).check(ctx, t, expected)


def check_context(theory: Theory, ctx: Context, config: ReductionConfig = DEFAULT) -> None:
    c = Checker(theory, config)
    so_far = EMPTY_CONTEXT
    for name, ty in ctx:
        c.check_type(so_far, ty)
        so_far = so_far.extend(name, ty)


def classifies(theory: Theory, ctx: Context, t: Term, config: ReductionConfig = DEFAULT) -> bool:
    try:
        infer(theory, ctx, t, config)
        return True
    except (CheckError, FuelExhausted):
        return False


# ---------------------------------------------------------------------------
# Rewrite rules


def _algebraic(t: Term, pvars: frozenset[str]) -> bool:
    if isinstance(t, Var):
        return t.name in pvars
    head, args = spine(t)
    return isinstance(head, Const) and all(_algebraic(a, pvars) for a in args)


class _Linearized(Exception):
    """Pattern typing needs some pattern variables identified."""

    def __init__(self, pairs: list[tuple[str, str]]):
        self.pairs = pairs


class _PatternTyper:
    """Infer a typing context for the pattern variables of a left-hand side.

    Variables are typed by their first occurrence, reading the spine left to
    right and outside in, from the declared types of the constants above them.
    """

    def __init__(self, checker: Checker, pvars: frozenset[str]):
        self.checker = checker
        self.pvars = pvars
        self.ctx = EMPTY_CONTEXT

    def type_of(self, t: Term) -> Term:
        head, args = spine(t)
        assert isinstance(head, Const)
        ty = self.checker.theory.lookup(head.name)
        if ty is None:
            raise CheckError("unbound", f"unbound constant {head.name} in left-hand side")
        for arg in args:
            fty = self.checker.whnf(ty)
            if not isinstance(fty, Pi):
                raise CheckError("not-a-product", f"{head.name} is applied to too many arguments in left-hand side")
            if isinstance(arg, Var):
                known = self.ctx.lookup(arg.name)
                if known is None:
                    self.ctx = self.ctx.extend(arg.name, fty.domain)
                elif not self.checker.convertible(known, fty.domain):
                    self.conflict(fty.domain, known)
            else:
                actual = self.type_of(arg)
                if not self.checker.convertible(actual, fty.domain):
                    self.conflict(fty.domain, actual)
            ty = instantiate(fty.body, arg)
        return ty

    def conflict(self, expected: Term, actual: Term):
        r = self.checker.reducer()
        pairs: list[tuple[str, str]] = []
        order = self.ctx.names
        if _unify_vars(r.normalize(expected), r.normalize(actual), self.pvars, pairs):
            found = []
            for a, b in pairs:
                if a == b:
                    continue
                # The later variable is the linear copy of the earlier one.
                ia = order.index(a) if a in order else len(order)
                ib = order.index(b) if b in order else len(order)
                found.append((b, a) if ia < ib else (a, b))
            if found:
                raise _Linearized(found)
        raise self.checker.mismatch(expected, actual, "ill-typed left-hand side")


def _unify_vars(t: Term, u: Term, pvars: frozenset[str], pairs: list[tuple[str, str]]) -> bool:
    """Structural comparison where pattern variables may be paired with each other."""
    if t == u:
        return True
    match t, u:
        case Var(a), Var(b) if a in pvars and b in pvars:
            pairs.append((a, b))
            return True
        case App(f1, a1), App(f2, a2):
            return _unify_vars(f1, f2, pvars, pairs) and _unify_vars(a1, a2, pvars, pairs)
        case (Lam(_, d1, b1), Lam(_, d2, b2)) | (Pi(_, d1, b1), Pi(_, d2, b2)):
            if d1 is not None and d2 is not None and not _unify_vars(d1, d2, pvars, pairs):
                return False
            return _unify_vars(b1, b2, pvars, pairs)
    return False


def check_rule(
    theory: Theory, rule: RewriteRule, config: ReductionConfig = DEFAULT
) -> tuple[RewriteRule, list[Diagnostic]]:
    """Well-formedness of a rewrite rule.

    Returns the rule annotated with its pattern context (and any
    identifications recovering a linearized rule) plus diagnostics.
    """
    span = rule.span
    pvars = frozenset(rule.pattern_vars)
    if isinstance(rule.lhs, Var):
        return rule, [Diagnostic("error", "lhs-variable", "left-hand side is a variable", span)]
    if not _algebraic(rule.lhs, pvars):
        return rule, [Diagnostic("error", "lhs-not-algebraic", "left-hand side is not algebraic", span)]
    extra = free_vars(rule.rhs) - free_vars(rule.lhs)
    if extra:
        names = ", ".join(sorted(extra))
        return rule, [Diagnostic("error", "rhs-free-vars", f"right-hand side has variables not in the left-hand side: {names}", span)]

    diags: list[Diagnostic] = []
    checker = Checker(theory, config)
    identified: dict[str, str] = {}  # linear copy -> original
    lhs, rhs = rule.lhs, rule.rhs
    try:
        for _ in range(len(pvars) + 1):
            theta = {c: Var(o) for c, o in identified.items()}
            lhs, rhs = subst(rule.lhs, theta), subst(rule.rhs, theta)
            typer = _PatternTyper(checker, pvars)
            try:
                lhs_type = typer.type_of(lhs)
                break
            except _Linearized as lin:
                for c, o in lin.pairs:
                    o = identified.get(o, o)
                    identified = {k: (o if v == c else v) for k, v in identified.items()}
                    identified[c] = o
        else:
            raise CheckError("rule-ill-typed", "could not type the left-hand side")
        ctx = typer.ctx
        if not rule.unchecked:
            checker.infer(ctx, lhs)
            checker.check(ctx, rhs, lhs_type)
    except (CheckError, FuelExhausted) as err:
        if rule.unchecked:
            diags.append(Diagnostic("warning", "unchecked", "rule accepted without type-preservation check", span))
            return rule, diags
        if isinstance(err, FuelExhausted):
            return rule, [Diagnostic("error", "fuel", str(err), span)]
        diag = Diagnostic.from_error(err, span)
        return rule, [replace(diag, message=f"rule does not preserve typing: {diag.message}")]

    if rule.unchecked:
        diags.append(Diagnostic("warning", "unchecked", "rule accepted without type-preservation check", span))
    if identified:
        pairs = ", ".join(f"{c} as {o}" for c, o in identified.items())
        diags.append(
            Diagnostic("warning", "linearized", f"left-hand side is ill-typed as written; checked with {pairs}", span)
        )
        # Context of the rule as written: copies share the type of their original.
        ctx = Context(ctx.entries + tuple((c, ctx.lookup(o)) for c, o in identified.items()))
    return replace(rule, context=ctx, identified=tuple(identified.items())), diags


# ---------------------------------------------------------------------------
# Theories


@dataclass
class TheoryChecker:
    """Incremental checker: feed entries and pragmas in file order."""

    config: ReductionConfig = DEFAULT
    theory: Theory = field(default_factory=Theory)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    output: list[str] = field(default_factory=list)

    def report(self, diag: Diagnostic) -> None:
        self.diagnostics.append(diag)

    @property
    def ok(self) -> bool:
        return not errors(self.diagnostics)

    def add(self, entry: Entry | Pragma) -> bool:
        if isinstance(entry, Pragma):
            return self.pragma(entry)
        span = entry.span
        checker = Checker(self.theory, self.config)
        try:
            match entry:
                case RewriteRule():
                    rule, diags = check_rule(self.theory, entry, self.config)
                    for d in diags:
                        self.report(d)
                    if errors(diags):
                        return False
                    self.theory = self.theory.extend(rule)
                    return True
                case ConstantDecl(name, ty) | Definition(name, ty):
                    if name in self.theory:
                        raise CheckError("duplicate", f"{name} is already declared")
                    if ty == KIND:
                        raise CheckError("bad-classifier", f"classifier of {name} cannot be Kind itself")
                    checker.sort(EMPTY_CONTEXT, ty)
                    if isinstance(entry, Definition):
                        checker.check(EMPTY_CONTEXT, entry.body, ty)
        except CheckError as err:
            self.report(Diagnostic.from_error(err, span))
            return False
        except FuelExhausted as err:
            self.report(Diagnostic("error", "fuel", str(err), span))
            return False
        self.theory = self.theory.extend(entry)
        return True

    def pragma(self, p: Pragma) -> bool:
        checker = Checker(self.theory, self.config)
        try:
            match p.kind:
                case "IRRELEVANT":
                    if p.name not in self.theory:
                        raise CheckError("unbound", f"unbound constant {p.name}")
                    self.theory = self.theory.with_irrelevant(p.name)
                case "CHECK":
                    t, a = p.terms
                    checker.sort(EMPTY_CONTEXT, a)
                    checker.check(EMPTY_CONTEXT, t, a)
                case "EVAL":
                    (t,) = p.terms
                    checker.infer(EMPTY_CONTEXT, t)
                    nf = checker.reducer().normalize(t)
                    self.output.append(pretty(nf))
                    self.report(Diagnostic("info", "eval", pretty(nf), p.span))
                case "ASSERT":
                    t, u = p.terms
                    if not assert_convertible(self.theory, t, u, self.config):
                        r = checker.reducer()
                        raise CheckError("assert-failed", "terms are not convertible", r.normalize(t), r.normalize(u))
        except CheckError as err:
            self.report(Diagnostic.from_error(err, p.span))
            return False
        except FuelExhausted as err:
            self.report(Diagnostic("error", "fuel", str(err), p.span))
            return False
        return True


def irrelevant_equal(
    theory: Theory, ctx: Context, t: Term, u: Term, config: ReductionConfig = DEFAULT
) -> bool:
    """Equality up to proof irrelevance (a typed fallback to conversion).

    Inhabitants of an irrelevant family are all equal; functions into one are
    compared pointwise, and neutral terms argument by argument.
    """
    if not theory.irrelevant:
        return False
    c = Checker(theory, config)
    return _irrelevant_equal(c, ctx, t, u, 8)


def _irrelevant_equal(c: Checker, ctx: Context, t: Term, u: Term, depth: int) -> bool:
    if c.convertible(t, u):
        return True
    if depth == 0:
        return False
    try:
        a, b = c.infer(ctx, t), c.infer(ctx, u)
    except CheckError:
        return False
    if not c.convertible(a, b):
        return False
    a = c.whnf(a)
    if isinstance(a, Pi):
        x = fresh(a.hint)
        inner = ctx.extend(x, a.domain)
        return _irrelevant_equal(c, inner, App(t, Var(x)), App(u, Var(x)), depth - 1)
    head, _ = spine(a)
    if isinstance(head, Const) and head.name in c.theory.irrelevant:
        return True
    r = c.reducer()
    (th, targs), (uh, uargs) = spine(r.whnf(t)), spine(r.whnf(u))
    if th != uh or len(targs) != len(uargs) or not isinstance(th, (Const, Var)):
        return False
    return all(_irrelevant_equal(c, ctx, p, q, depth - 1) for p, q in zip(targs, uargs))


def assert_convertible(
    theory: Theory, t: Term, u: Term, config: ReductionConfig = DEFAULT, ctx: Context = EMPTY_CONTEXT
) -> bool:
    c = Checker(theory, config)
    c.infer(ctx, t)
    c.infer(ctx, u)
    return c.convertible(t, u) or irrelevant_equal(theory, ctx, t, u, config)


def elaborate_theory(
    theory: Theory | Iterable[Entry], config: ReductionConfig = DEFAULT
) -> tuple[Theory, list[Diagnostic]]:
    """Check entries in order; returns the accepted theory (rules annotated)."""
    entries = theory.entries if isinstance(theory, Theory) else tuple(theory)
    tc = TheoryChecker(config)
    for e in entries:
        tc.add(e)
    result = tc.theory
    if isinstance(theory, Theory):
        result = Theory(result.entries, theory.name, theory.irrelevant | result.irrelevant)
    return result, tc.diagnostics


def check_theory(theory: Theory, config: ReductionConfig = DEFAULT) -> list[Diagnostic]:
    return elaborate_theory(theory, config)[1]


__all__ = [
    "CheckError",
    "Checker",
    "Diagnostic",
    "TheoryChecker",
    "assert_convertible",
    "check",
    "check_context",
    "check_rule",
    "check_theory",
    "classifies",
    "elaborate_theory",
    "errors",
    "infer",
    "irrelevant_equal",
]
