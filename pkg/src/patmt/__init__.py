"""Pattern-based machine translation with synchronized CFG skeletons."""

from importlib import resources

from .dsl import (
    GrammarSyntaxError,
    ParseError,
    load_grammar,
    parse_document,
    parse_grammar,
    serialize_grammar,
)
from .engine import (
    Derivation,
    Penalties,
    Translation,
    TranslationFailure,
    build_target,
    check_constraints,
    count_derivations,
    emit,
    enumerate_derivations,
    rank_candidates,
    render_trace,
    translate,
)
from .equivalence import (
    PlainCfg,
    SizeCapExceeded,
    cfg_recognize,
    check_bounds,
    check_equivalence,
    enumerate_accepted,
    head_annotated_cfg,
    random_grammar,
    skeleton_cfg,
    unconstrained_cfg,
)
from .grammar import (
    Element,
    FeatureRegistry,
    FeatureVector,
    Grammar,
    Pattern,
    Provenance,
    Skeleton,
    UnifyFailure,
    unify,
    validate,
)
from .integration import (
    BilingualPair,
    IntegrationOutcome,
    OutcomeKind,
    find_synchronized_derivation,
    integrate_corpus,
    integrate_pair,
    lexicalize,
    read_corpus,
)
from .parser import Chart, parse, recognize


def fixture_path(name: str):
    """Path of a grammar or corpus shipped in ``patmt/data``."""
    return resources.files(__name__).joinpath("data", name)


def load_fixture(name: str) -> Grammar:
    return load_grammar(fixture_path(name if "." in name else name + ".pcfg"))


__version__ = "0.1.0"

__all__ = [
    "GrammarSyntaxError",
    "ParseError",
    "load_grammar",
    "parse_document",
    "parse_grammar",
    "serialize_grammar",
    "Derivation",
    "Penalties",
    "Translation",
    "TranslationFailure",
    "build_target",
    "check_constraints",
    "count_derivations",
    "emit",
    "enumerate_derivations",
    "rank_candidates",
    "render_trace",
    "translate",
    "PlainCfg",
    "SizeCapExceeded",
    "cfg_recognize",
    "check_bounds",
    "check_equivalence",
    "enumerate_accepted",
    "head_annotated_cfg",
    "random_grammar",
    "skeleton_cfg",
    "unconstrained_cfg",
    "Element",
    "FeatureRegistry",
    "FeatureVector",
    "Grammar",
    "Pattern",
    "Provenance",
    "Skeleton",
    "UnifyFailure",
    "unify",
    "validate",
    "BilingualPair",
    "IntegrationOutcome",
    "OutcomeKind",
    "find_synchronized_derivation",
    "integrate_corpus",
    "integrate_pair",
    "lexicalize",
    "read_corpus",
    "Chart",
    "parse",
    "recognize",
    "fixture_path",
    "load_fixture",
    "__version__",
]
