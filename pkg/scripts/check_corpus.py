"""Check every bundled theory, morphism and logical relation, printing one line each."""

from __future__ import annotations

import sys

from lpmr import corpus as C
from lpmr.cli import main as cli_main
from lpmr.loader import CORPUS_DIR
from lpmr.morphism import check_morphism
from lpmr.relation import check_relation


def main() -> int:
    failed = cli_main(["check", "-j", "4", *sorted(str(p) for p in CORPUS_DIR.rglob("*.dk"))]) != 0
    for name, make in C.VALID_MORPHISMS.items():
        report = check_morphism(make())
        print(f"morphism {name}: {report.summary()}")
        failed |= not report.ok
    report = check_morphism(C.mul_div_mul(), C.eta_config())
    print(f"morphism MulDivGr;DivMulGr (eta): {report.summary()}")
    failed |= not report.ok
    for name, make in C.VALID_RELATIONS.items():
        report = check_relation(make())
        print(f"relation {name}: {report.summary()}")
        failed |= not report.ok
    for name, make in (("sabotaged MulDivGr", C.mul_div_sabotaged), ("computational hs", C.hs_computational)):
        print(f"expected failure {name}: {check_morphism(make()).summary()}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
