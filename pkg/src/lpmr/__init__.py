"""Theory morphisms and logical relations for the lambda-Pi calculus modulo rewriting."""

from .loader import check_files, load_theory
from .morphism import Morphism, check_morphism, compose_morphisms, identity_morphism, transport_definitions
from .parser import parse_file, parse_term, pretty
from .reduce import ReductionConfig, convertible, normalize, whnf
from .relation import LogicalRelation, check_relation, translate_context, translate_kind, translate_term
from .skeleton import generate_skeleton, ingest_skeleton
from .theory import Context, Theory
from .typecheck import check_rule, check_theory

__version__ = "0.1.0"

__all__ = [
    "Context",
    "LogicalRelation",
    "Morphism",
    "ReductionConfig",
    "Theory",
    "check_files",
    "check_morphism",
    "check_relation",
    "check_rule",
    "check_theory",
    "compose_morphisms",
    "convertible",
    "generate_skeleton",
    "identity_morphism",
    "ingest_skeleton",
    "load_theory",
    "normalize",
    "parse_file",
    "parse_term",
    "pretty",
    "translate_context",
    "translate_kind",
    "translate_term",
    "transport_definitions",
    "whnf",
]
