"""The translate, fill, transport loop on the deduction/computation demo.

Writes its files to a scratch directory (or the one given) and runs the CLI
on them, echoing each step.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from lpmr.cli import main as lpmr

BODIES = {
    "Prop_mu": "Prop",
    "Prf_mu": "Prf",
    "imp_mu": "imp",
    "imp_i_mu": "p => q => H => H",
    "imp_e_mu": "p => q => H => H",
}


def fill(text: str) -> str:
    for name, body in BODIES.items():
        head = f"def {name} :"
        start = text.index(head)
        todo = text.index(":= TODO.", start)
        text = text[:todo] + f":= {body}." + text[todo + len(":= TODO."):]
    return text


def run(argv: list[str]) -> None:
    print("$ lpmr " + " ".join(argv))
    code = lpmr(argv)
    if code:
        sys.exit(code)


def main(workdir: Path) -> None:
    skeleton, filled, out = workdir / "skeleton.dk", workdir / "filled.dk", workdir / "transported.dk"
    pair = ["--source", "deduction", "--target", "computation"]
    run(["translate", *pair, "--out", str(skeleton)])
    print(skeleton.read_text())
    filled.write_text(fill(skeleton.read_text()))
    print(f"filled the parameters into {filled}")
    run(["transport", *pair, "--filled", str(filled), "--out", str(out)])
    print(out.read_text())
    run(["check", str(out)])


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="lpmr-demo-")))
