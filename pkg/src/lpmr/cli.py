"""Command line entry point: ``lpmr check | translate | transport``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import THEORIES
from .loader import CORPUS_DIR, CheckRun, LoadError, check_files, load_theory
from .morphism import Morphism, TransportError, check_morphism, transport_definitions
from .parser import ParseError, SourceFile, parse_path, pretty_file
from .reduce import DEFAULT_FUEL, ReductionConfig
from .relation import check_relation
from .skeleton import SkeletonError, generate_skeleton, ingest_skeleton
from .theory import NOWHERE, Theory
from .typecheck import Diagnostic, errors

OK, FAILED, USAGE = 0, 1, 2


@dataclass(frozen=True)
class CliConfig:
    mode: str = "check"
    paths: tuple[str, ...] = ()
    source: str | None = None
    target: str | None = None
    filled: str | None = None
    out: str | None = None
    kind: str = "morphism"
    arity: int = 1
    eta: bool = False
    fuel: int = DEFAULT_FUEL
    format: str = "text"
    include: tuple[str, ...] = field(default=())
    jobs: int = 1

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        if self.kind == "morphism" and self.arity != 1:
            raise ValueError("--arity is only meaningful with --mode relation")

    @property
    def reduction(self) -> ReductionConfig:
        return ReductionConfig(eta=self.eta, fuel=self.fuel)

    @property
    def include_dirs(self) -> list[Path]:
        return [Path(d) for d in self.include] + [CORPUS_DIR, CORPUS_DIR / "demo"]


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def diagnostic(self, d: Diagnostic) -> None:
        print(d.to_json() if self.fmt == "json" else d.text(), file=self.stream)

    def note(self, text: str) -> None:
        if self.fmt == "text":
            print(text, file=self.stream)


def _error(err: Exception, code: str) -> Diagnostic:
    """A diagnostic for a parse or load failure, located where the error is."""
    span = getattr(err, "span", NOWHERE)
    text, prefix = str(err), f"{span}: "
    return Diagnostic("error", code, text[len(prefix):] if text.startswith(prefix) else text, span)


def _resolve_theory_path(spec: str) -> Path:
    """A ``.dk`` path, or the name of a bundled corpus theory."""
    p = Path(spec)
    if p.exists():
        return p
    if spec in THEORIES:
        return CORPUS_DIR / THEORIES[spec]
    raise LoadError(f"no such file or corpus theory: {spec}")


def _load(spec: str, cfg: CliConfig) -> Theory:
    path = _resolve_theory_path(spec)
    return load_theory(path, cfg.reduction, [path.parent, *cfg.include_dirs])


def _check_one(path: str, cfg: CliConfig) -> tuple[list[Diagnostic], list[str]]:
    run = check_files([path], cfg.reduction, [Path(path).parent, *cfg.include_dirs])
    return run.diagnostics, run.checker.output


def cmd_check(cfg: CliConfig, out: Output) -> int:
    """Each file is checked with its requirements; files are independent."""
    paths = list(cfg.paths)
    try:
        if cfg.jobs > 1 and len(paths) > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                results = list(pool.map(_check_one, paths, [cfg] * len(paths)))
        else:
            results = [_check_one(p, cfg) for p in paths]
    except (ParseError, LoadError) as err:
        out.diagnostic(_error(err, "parse"))
        return USAGE
    failed = 0
    for path, (diags, printed) in zip(paths, results):
        for line in printed:
            out.note(line)
        for d in diags:
            if d.severity != "info":
                out.diagnostic(d)
        n = len(errors(diags))
        failed += n
        out.note(f"{path}: {'OK' if n == 0 else f'{n} error(s)'}")
    return OK if failed == 0 else FAILED


def cmd_translate(cfg: CliConfig, out: Output) -> int:
    source, target = _load(cfg.source, cfg), _load(cfg.target, cfg)
    sk = generate_skeleton(source, target, cfg.kind, cfg.arity, cfg.reduction)
    text = sk.render()
    if cfg.out:
        Path(cfg.out).write_text(text)
        out.note(f"wrote {cfg.out}: {len(sk.gaps)} parameter(s) to fill")
    else:
        sys.stdout.write(text)
    return OK


def _ingest(cfg: CliConfig, out: Output) -> tuple[Morphism, SourceFile, Theory] | int:
    source, target = _load(cfg.source, cfg), _load(cfg.target, cfg)
    filled_path = Path(cfg.filled)
    target_dir = _resolve_theory_path(cfg.target).parent
    run: CheckRun = check_files([filled_path], cfg.reduction, [filled_path.parent, target_dir, *cfg.include_dirs])
    for d in errors(run.diagnostics):
        out.diagnostic(d)
    if not run.ok:
        return FAILED
    filled = parse_path(filled_path)
    m = ingest_skeleton(filled, source, target, cfg.kind, cfg.arity, cfg.reduction)
    report = check_relation(m, cfg.reduction) if cfg.kind == "relation" else check_morphism(m, cfg.reduction)
    for d in report.diagnostics():
        out.diagnostic(d)
    out.note(report.summary().splitlines()[0])
    if not report.ok:
        return FAILED
    return m, filled, target


def cmd_transport(cfg: CliConfig, out: Output) -> int:
    if cfg.kind != "morphism":
        out.diagnostic(Diagnostic("error", "usage", "transport works along morphisms only"))
        return USAGE
    got = _ingest(cfg, out)
    if isinstance(got, int):
        return got
    m, filled, target = got
    try:
        defs = transport_definitions(m, config=cfg.reduction)
    except TransportError as err:
        out.diagnostic(Diagnostic("error", "internal", str(err)))
        return FAILED
    helpers = [e for e in m.target.entries if e not in set(target.entries)]
    module = SourceFile(Path(cfg.out).stem if cfg.out else "transported", filled.requires, tuple(helpers + defs))
    text = pretty_file(module)
    if not cfg.out:
        sys.stdout.write(text)
        return OK
    Path(cfg.out).write_text(text)
    target_dir = _resolve_theory_path(cfg.target).parent
    run = check_files([cfg.out], cfg.reduction, [Path(cfg.out).parent, target_dir, *cfg.include_dirs])
    for d in errors(run.diagnostics):
        out.diagnostic(d)
    out.note(f"wrote {cfg.out}: {len(defs)} definition(s) transported")
    return OK if run.ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpmr", description="Check theories, morphisms and logical relations.")
    sub = p.add_subparsers(dest="mode", required=True)

    def common(sp):
        sp.add_argument("--eta", action="store_true", help="enable eta in conversion")
        sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="reduction step budget per query")
        sp.add_argument("--format", choices=("text", "json"), default="text", help="diagnostic format")
        sp.add_argument("-I", "--include", action="append", default=[], help="directory searched by #REQUIRE")

    c = sub.add_parser("check", help="check .dk files")
    c.add_argument("paths", nargs="*")
    c.add_argument("-j", "--jobs", type=int, default=1, help="check files in parallel")
    common(c)

    for name, help_ in (("translate", "emit a skeleton to fill"), ("transport", "translate definitions along a filled skeleton")):
        t = sub.add_parser(name, help=help_)
        t.add_argument("--mode", dest="kind", choices=("morphism", "relation"), default="morphism")
        t.add_argument("--arity", type=int, default=1)
        t.add_argument("--source", required=True)
        t.add_argument("--target", required=True)
        t.add_argument("--out")
        if name == "transport":
            t.add_argument("--filled", required=True)
        common(t)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    args = vars(ns)
    args["paths"] = tuple(args.pop("paths", ()))
    args["include"] = tuple(args["include"])
    try:
        cfg = CliConfig(**args)
    except ValueError as err:
        print(f"lpmr: {err}", file=sys.stderr)
        return USAGE
    out = Output(cfg.format)
    commands = {"check": cmd_check, "translate": cmd_translate, "transport": cmd_transport}
    try:
        return commands[cfg.mode](cfg, out)
    except (ParseError, LoadError, SkeletonError) as err:
        out.diagnostic(_error(err, "usage"))
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
