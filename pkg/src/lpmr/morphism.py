"""Theory morphisms: homomorphic translation and its well-formedness conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .parser import pretty
from .reduce import DEFAULT, FuelExhausted, ReductionConfig, Reducer
from .terms import KIND, TYPE, Const, Substitution, Term, map_consts
from .theory import EMPTY_CONTEXT, ConstantDecl, Context, Definition, RewriteRule, Span, Theory
from .typecheck import (
    CheckError,
    Checker,
    Diagnostic,
    TheoryChecker,
    elaborate_theory,
    errors,
    irrelevant_equal,
)


class MorphismError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class Morphism:
    source: Theory
    target: Theory
    assignment: Mapping[str, Term]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))

    def apply(self, t: Term) -> Term:
        return map_consts(t, self._image)

    __call__ = apply

    def _image(self, c: str) -> Term:
        if c in self.assignment:
            return self.assignment[c]
        d = self.source.definitions.get(c)
        if d is not None:
            # Definitions are translated, never assigned: inline the image of the body.
            return self.apply(d.body)
        raise MorphismError(f"{self.name or 'morphism'}: no image for constant {c}")

    def apply_ctx(self, ctx: Context) -> Context:
        return Context(tuple((x, self.apply(a)) for x, a in ctx))

    def apply_subst(self, theta: Substitution) -> dict[str, Term]:
        return {x: self.apply(t) for x, t in theta.items()}

    def retarget(self, target: Theory) -> Morphism:
        """The same assignment into an extension of the target."""
        return Morphism(self.source, target, self.assignment, self.name)


def identity_morphism(theory: Theory) -> Morphism:
    return Morphism(theory, theory, {d.name: Const(d.name) for d in theory.primitives}, f"id_{theory.name}")


def compose_morphisms(m1: Morphism, m2: Morphism, name: str = "") -> Morphism:
    """``m1 ; m2``: first ``m1``, then ``m2``."""
    if m1.target is not m2.source and m1.target.entries != m2.source.entries:
        raise MorphismError(f"cannot compose: target of {m1.name} is not the source of {m2.name}")
    # Beta-normal images keep composites readable; rules are left alone.
    beta = Reducer(Theory())
    assignment = {c: beta.normalize(m2.apply(t)) for c, t in m1.assignment.items()}
    return Morphism(m1.source, m2.target, assignment, name or f"{m1.name};{m2.name}")


def morphisms_equal(m1: Morphism, m2: Morphism, config: ReductionConfig = DEFAULT) -> bool:
    """Definitional equality of two morphisms with the same source and target."""
    if set(m1.assignment) != set(m2.assignment):
        return False
    r = Reducer(m1.target, config)
    return all(r.convertible(t, m2.assignment[c]) for c, t in m1.assignment.items())


# ---------------------------------------------------------------------------
# Condition checking


@dataclass(frozen=True)
class ConditionResult:
    condition: int  # 1 object constant, 2 type-family constant, 3 rewrite rule
    subject: str
    ok: bool
    code: str = "ok"
    message: str = ""
    expected: Term | None = None
    actual: Term | None = None
    span: Span = field(default=Span(), compare=False)

    def diagnostic(self) -> Diagnostic:
        severity = "info" if self.ok else "error"
        msg = f"condition {self.condition} for {self.subject}: {self.message or self.code}"
        return Diagnostic(severity, self.code, msg, self.span, self.expected, self.actual)


@dataclass(frozen=True)
class MorphismReport:
    results: tuple[ConditionResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> list[ConditionResult]:
        return [r for r in self.results if not r.ok]

    def verdicts(self) -> dict[tuple[int, str], bool]:
        return {(r.condition, r.subject): r.ok for r in self.results}

    def diagnostics(self) -> list[Diagnostic]:
        return [r.diagnostic() for r in self.failures]

    def summary(self) -> str:
        lines = [f"{len(self.results) - len(self.failures)}/{len(self.results)} conditions hold"]
        lines += [d.text() for d in self.diagnostics()]
        return "\n".join(lines)


def ensure_elaborated(theory: Theory, config: ReductionConfig = DEFAULT) -> Theory:
    """Rules need their pattern contexts; check the theory if they are missing."""
    if all(len(r.context) or not r.pattern_vars for r in theory.rules):
        return theory
    elaborated, diags = elaborate_theory(theory, config)
    if errors(diags):
        raise MorphismError(f"theory {theory.name} does not check: {errors(diags)[0].text()}")
    return elaborated


def constant_condition(source: Theory, decl: ConstantDecl, config: ReductionConfig) -> int:
    s = Reducer(source, config).whnf(Checker(source, config).infer(EMPTY_CONTEXT, decl.type))
    return 1 if s == TYPE else 2


def _check_constant(
    checker: Checker, cond: int, name: str, value: Term | None, expected: Term, span: Span
) -> ConditionResult:
    if value is None:
        return ConditionResult(cond, name, False, "missing", "no assignment", span=span)
    try:
        if expected != KIND:
            checker.sort(EMPTY_CONTEXT, expected)
        checker.check(EMPTY_CONTEXT, value, expected)
    except CheckError as err:
        return ConditionResult(cond, name, False, err.code, err.message, err.expected, err.actual, span)
    except FuelExhausted as err:
        return ConditionResult(cond, name, False, "fuel", str(err), span=span)
    return ConditionResult(cond, name, True, span=span)


def _check_rule_images(
    target: Theory,
    name: str,
    lhs: Term,
    rhs: Term,
    ctx: Context,
    config: ReductionConfig,
    span: Span,
) -> ConditionResult:
    try:
        r = Reducer(target, config)
        if r.convertible(lhs, rhs):
            return ConditionResult(3, name, True, span=span)
        if irrelevant_equal(target, ctx, lhs, rhs, config):
            return ConditionResult(3, name, True, "irrelevant", "equal by proof irrelevance", span=span)
        r = Reducer(target, config)
        return ConditionResult(3, name, False, "not-convertible", "images are not convertible", r.normalize(lhs), r.normalize(rhs), span)
    except FuelExhausted as err:
        return ConditionResult(3, name, False, "fuel", str(err), span=span)


def check_morphism(m: Morphism, config: ReductionConfig = DEFAULT) -> MorphismReport:
    source = ensure_elaborated(m.source, config)
    m = Morphism(source, m.target, m.assignment, m.name)
    checker = Checker(m.target, config)
    results: list[ConditionResult] = []
    primitives = {d.name for d in source.primitives}
    for extra in sorted(set(m.assignment) - primitives):
        results.append(ConditionResult(1, extra, False, "extra", "assignment for a name that is not a primitive of the source"))
    for decl in source.primitives:
        cond = constant_condition(source, decl, config)
        try:
            expected = m.apply(decl.type)
        except MorphismError as err:
            results.append(ConditionResult(cond, decl.name, False, "missing", str(err), span=decl.span))
            continue
        results.append(_check_constant(checker, cond, decl.name, m.assignment.get(decl.name), expected, decl.span))
    for i, rule in enumerate(source.rules):
        rule = rule.delinearized()
        label = rule.label() if rule.name else f"rule {i + 1}: {pretty_rule_sides(rule)}"
        try:
            lhs, rhs, ctx = m.apply(rule.lhs), m.apply(rule.rhs), m.apply_ctx(rule.context)
        except MorphismError as err:
            results.append(ConditionResult(3, label, False, "missing", str(err), span=rule.span))
            continue
        results.append(_check_rule_images(m.target, label, lhs, rhs, ctx, config, rule.span))
    return MorphismReport(tuple(results))


def pretty_rule_sides(rule: RewriteRule) -> str:
    return f"{pretty(rule.lhs)} --> {pretty(rule.rhs)}"


# ---------------------------------------------------------------------------
# Transport


class TransportError(Exception):
    """A transported definition failed to recheck: a bug, given a valid morphism."""


def transport_definitions(
    m: Morphism,
    suffix: str = "_mu",
    config: ReductionConfig = DEFAULT,
    definitions: list[Definition] | None = None,
) -> list[Definition]:
    """Translate every source definition and recheck it in the target.

    Later definitions refer to the transported names of earlier ones.
    """
    defs = list(m.source.definitions.values()) if definitions is None else definitions
    renamed: dict[str, Term] = {}

    def image(c: str) -> Term:
        if c in renamed:
            return renamed[c]
        return m._image(c)

    out: list[Definition] = []
    tc = TheoryChecker(config, m.target)
    for d in defs:
        new_name = d.name + suffix
        if new_name in tc.theory:
            raise TransportError(f"transported name {new_name} already exists in the target")
        ty = map_consts(d.type, image)
        body = map_consts(d.body, image)
        nd = Definition(new_name, ty, body, d.opaque, d.span)
        if not tc.add(nd):
            raise TransportError(f"transported {new_name} does not recheck: {tc.diagnostics[-1].text()}")
        renamed[d.name] = Const(new_name)
        out.append(nd)
    return out


__all__ = [
    "ConditionResult",
    "Morphism",
    "MorphismError",
    "MorphismReport",
    "TransportError",
    "check_morphism",
    "compose_morphisms",
    "ensure_elaborated",
    "identity_morphism",
    "morphisms_equal",
    "transport_definitions",
]
