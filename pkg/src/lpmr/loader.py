"""Resolving ``#REQUIRE`` and checking whole files."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .parser import ParseError, SourceFile, parse_path
from .reduce import DEFAULT, ReductionConfig
from .theory import Span, Theory
from .typecheck import Diagnostic, TheoryChecker, errors

CORPUS_DIR = Path(__file__).parent / "corpus"


class LoadError(Exception):
    def __init__(self, message: str, span: Span = Span()):
        self.span = span
        super().__init__(f"{span}: {message}")


@dataclass
class Loader:
    """Loads files and their requirements, each module once, dependencies first."""

    include_dirs: Sequence[Path] = ()
    files: list[SourceFile] = field(default_factory=list)
    paths: dict[str, Path] = field(default_factory=dict)
    _active: list[str] = field(default_factory=list)

    def resolve(self, module: str, near: Path, span: Span) -> Path:
        for d in (near, *self.include_dirs):
            p = Path(d) / f"{module}.dk"
            if p.exists():
                return p
        raise LoadError(f"cannot find module {module}", span)

    def load(self, path: str | Path) -> SourceFile:
        path = Path(path)
        module = path.stem
        if module in self._active:
            cycle = " -> ".join(self._active[self._active.index(module) :] + [module])
            raise LoadError(f"cyclic #REQUIRE: {cycle}")
        if module in self.paths:
            for f in self.files:
                if f.module == module:
                    return f
        self._active.append(module)
        try:
            src = parse_path(path)
            for dep, span in src.requires:
                if dep in self._active:
                    cycle = " -> ".join(self._active[self._active.index(dep) :] + [dep])
                    raise LoadError(f"cyclic #REQUIRE: {cycle}", span)
                if dep not in self.paths:
                    self.load(self.resolve(dep, path.parent, span))
        finally:
            self._active.pop()
        self.paths[module] = path
        self.files.append(src)
        return src


def load_files(paths: Iterable[str | Path], include_dirs: Sequence[str | Path] = ()) -> list[SourceFile]:
    loader = Loader([Path(d) for d in include_dirs])
    for p in paths:
        loader.load(p)
    return loader.files


@dataclass
class CheckRun:
    checker: TheoryChecker
    files: list[SourceFile]

    @property
    def theory(self) -> Theory:
        return self.checker.theory

    @property
    def diagnostics(self) -> list[Diagnostic]:
        return self.checker.diagnostics

    @property
    def ok(self) -> bool:
        return not errors(self.diagnostics)


def check_files(
    paths: Iterable[str | Path],
    config: ReductionConfig = DEFAULT,
    include_dirs: Sequence[str | Path] = (),
) -> CheckRun:
    """Load, concatenate in dependency order and check everything.

    Parse and resolution failures propagate as ``ParseError``/``LoadError``.
    """
    files = load_files(paths, include_dirs)
    tc = TheoryChecker(config)
    for f in files:
        for item in f.items:
            tc.add(item)
    return CheckRun(tc, files)


def load_theory(
    path: str | Path,
    config: ReductionConfig = DEFAULT,
    include_dirs: Sequence[str | Path] = (),
    name: str | None = None,
) -> Theory:
    """A checked theory (with everything it requires); raises on errors."""
    run = check_files([path], config, include_dirs)
    if not run.ok:
        raise LoadError("; ".join(d.text() for d in errors(run.diagnostics)))
    th = run.theory
    return Theory(th.entries, name or Path(path).stem, th.irrelevant)


__all__ = ["CORPUS_DIR", "CheckRun", "LoadError", "Loader", "ParseError", "check_files", "load_files", "load_theory"]
