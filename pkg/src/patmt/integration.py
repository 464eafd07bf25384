"""Growing a grammar from bilingual sentence pairs.

For each pair (s, t) the current grammar is in one of three situations:

* it already translates s into t, and nothing happens;
* it translates s into something else, but some synchronized derivation of
  s yields t.  The patterns on that derivation are copied with their heads
  filled in and the copies are made cheaper until t comes out first;
* neither, in which case the pair itself is memorized as a sentence pattern.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .engine import (
    Derivation,
    TranslationFailure,
    build_target,
    emit,
    enumerate_derivations,
    normalize_tokens,
    translate,
)
from .grammar import Element, Grammar, Pattern, Provenance, Skeleton, validate

SENTENCE_WEIGHT = -100


@dataclass(frozen=True)
class BilingualPair:
    source: tuple[str, ...]
    target: tuple[str, ...]

    def __post_init__(self):
        if not self.source or not self.target:
            raise ValueError("both sides of a bilingual pair must be nonempty")

    @classmethod
    def from_text(cls, source: str, target: str) -> "BilingualPair":
        return cls(tuple(source.split()), tuple(target.split()))

    def __str__(self):
        return " ".join(self.source) + "\t" + " ".join(self.target)


class OutcomeKind(str, enum.Enum):
    ALREADY_CORRECT = "AlreadyCorrect"
    LEXICALIZED = "Lexicalized"
    NEW_SENTENCE_PATTERN = "NewSentencePattern"
    NOT_INTEGRABLE = "NotIntegrable"


@dataclass
class IntegrationOutcome:
    pair: BilingualPair
    kind: OutcomeKind
    added_patterns: list[Pattern] = field(default_factory=list)
    weight_adjustments: list[tuple[str, float, float]] = field(default_factory=list)
    iterations: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "source": " ".join(self.pair.source),
            "target": " ".join(self.pair.target),
            "kind": self.kind.value,
            "added": [p.id for p in self.added_patterns],
            "weight_adjustments": [list(a) for a in self.weight_adjustments],
            "iterations": self.iterations,
            "note": self.note,
        }


@dataclass(frozen=True)
class Schedule:
    """How hard the competitive step pushes new patterns."""

    step: float = 10
    rounds: int = 20
    node_budget: Optional[int] = 100_000


def best_translation(g: Grammar, source: Sequence[str], node_budget=100_000) -> Optional[tuple[str, ...]]:
    try:
        return tuple(translate(list(source), g, m=1, node_budget=node_budget, trace=False)[0].tokens)
    except TranslationFailure:
        return None


def find_synchronized_derivation(g: Grammar, source: Sequence[str], target: Sequence[str],
                                 node_budget: Optional[int] = 100_000) -> Optional[Derivation]:
    """Least-cost lenient derivation of ``source`` whose target yield is
    exactly ``target``; None if there is none within the budget."""
    toks = normalize_tokens(list(source), g)
    want = list(target)
    for _, d in enumerate_derivations(toks, g, strict=False, node_budget=node_budget):
        tree, _, _ = build_target(d, g, False, toks)
        if emit(tree) == want:
            return d
    return None


def _heads(d: Derivation, g: Grammar, memo: dict) -> tuple[Optional[str], Optional[str]]:
    """(source head, target head) realized at a derivation node."""
    key = id(d)
    if key in memo:
        return memo[key]
    p = g[d.pattern_id]
    if p.preterminal:
        out = (p.source_head, p.target_head)
    else:
        by_link = {e.link: c for e, c in zip(p.source.nonterminals, d.children)}
        src = _heads(by_link[p.source.lhs.link], g, memo)[0] if p.source.lhs.link is not None else None
        tgt = _heads(by_link[p.target.lhs.link], g, memo)[1] if p.target.lhs.link is not None else None
        out = (src, tgt)
    memo[key] = out
    return out


def _fresh_id(base: str, taken: set) -> str:
    n = 1
    while f"{base}.{n}" in taken:
        n += 1
    pid = f"{base}.{n}"
    taken.add(pid)
    return pid


def lexicalize(g: Grammar, d: Derivation) -> list[Pattern]:
    """Copies of the phrasal patterns used in ``d`` with every unconstrained
    nonterminal given the head it had in ``d``.  Copies that already exist
    in ``g`` (or earlier in the result) are skipped."""
    memo: dict = {}
    known = {p.body() for p in g.patterns}
    taken = {p.id for p in g.patterns}
    out = []
    for node in d.nodes():
        p = g[node.pattern_id]
        if p.preterminal:
            continue
        by_link = {e.link: _heads(c, g, memo) for e, c in zip(p.source.nonterminals, node.children)}

        def fill(side: Skeleton, which: int) -> Skeleton:
            rhs = tuple(replace(e, head=by_link[e.link][which])
                        if e.nonterminal and e.head is None and by_link[e.link][which] is not None else e
                        for e in side.rhs)
            return Skeleton(side.lhs, rhs)

        src, tgt = fill(p.source, 0), fill(p.target, 1)
        if (src, tgt) == p.body() or (src, tgt) in known:
            continue
        known.add((src, tgt))
        out.append(Pattern(_fresh_id(p.id, taken), src, tgt, p.weight, Provenance.INTEGRATED))
    return out


def sentence_pattern(g: Grammar, source: Sequence[str], target: Sequence[str]) -> Pattern:
    taken = {p.id for p in g.patterns}
    src = Skeleton(Element(g.start), tuple(Element(w, True) for w in source))
    tgt = Skeleton(Element(g.start), tuple(Element(w, True) for w in target))
    return Pattern(_fresh_id("sent", taken), src, tgt, SENTENCE_WEIGHT, Provenance.INTEGRATED)


def _correct(g: Grammar, pair: BilingualPair, budget) -> bool:
    return best_translation(g, pair.source, budget) == pair.target


def _push_down(g: Grammar, new: list[Pattern], pair: BilingualPair, schedule: Schedule,
               protect: Sequence[BilingualPair]):
    """Lower the weights of ``new`` until ``pair`` comes out first while
    every protected pair still does.  Returns (grammar, adjustments,
    rounds) or None."""
    for k in range(schedule.rounds + 1):
        shift = -schedule.step * k
        cur = [replace(p, weight=p.weight + shift) for p in new]
        cand = g.with_patterns(cur)
        if _correct(cand, pair, schedule.node_budget):
            if all(_correct(cand, q, schedule.node_budget) for q in protect):
                adj = [(p.id, p.weight, p.weight + shift) for p in new if shift]
                return cand, adj, k
            # pushing further only makes the new patterns more intrusive
            return None
    return None


def integrate_pair(g: Grammar, pair: BilingualPair, schedule: Schedule = Schedule(),
                   protect: Sequence[BilingualPair] = ()) -> tuple[Grammar, IntegrationOutcome]:
    """Refine ``g`` so that it translates ``pair.source`` into ``pair.target``.

    ``protect`` lists pairs that must stay correctly translated; a
    lexicalization that would break one of them is abandoned in favour of a
    sentence pattern.
    """
    toks = tuple(normalize_tokens(list(pair.source), g))
    pair = BilingualPair(toks, pair.target)
    best = best_translation(g, toks, schedule.node_budget)
    if best == pair.target:
        return g, IntegrationOutcome(pair, OutcomeKind.ALREADY_CORRECT)

    note = "no parse" if best is None else "no synchronized derivation yields the target"
    if best is not None:
        d = find_synchronized_derivation(g, toks, pair.target, schedule.node_budget)
        if d is not None:
            new = lexicalize(g, d)
            if new:
                res = _push_down(g, new, pair, schedule, protect)
                if res is not None:
                    g2, adj, rounds = res
                    added = [g2[p.id] for p in new]
                    return g2, IntegrationOutcome(pair, OutcomeKind.LEXICALIZED, added, adj, rounds)
                note = "lexicalized patterns could not be made to win"
            else:
                note = "derivation has nothing left to lexicalize"

    sent = sentence_pattern(g, toks, pair.target)
    res = _push_down(g, [sent], pair, schedule, protect)
    if res is None:
        return g, IntegrationOutcome(pair, OutcomeKind.NOT_INTEGRABLE, note=note)
    g2, adj, rounds = res
    return g2, IntegrationOutcome(pair, OutcomeKind.NEW_SENTENCE_PATTERN, [g2[sent.id]], adj, rounds,
                                  note=note + "; flagged for manual pattern authoring")


@dataclass
class CorpusReport:
    outcomes: list[IntegrationOutcome]
    patterns_before: int
    patterns_after: int

    @property
    def counts(self) -> dict[str, int]:
        out = {k.value: 0 for k in OutcomeKind}
        for o in self.outcomes:
            out[o.kind.value] += 1
        return out

    @property
    def growth(self) -> int:
        return self.patterns_after - self.patterns_before

    def to_dict(self) -> dict:
        return {"counts": self.counts, "patterns_before": self.patterns_before,
                "patterns_after": self.patterns_after, "growth": self.growth,
                "pairs": [o.to_dict() for o in self.outcomes]}

    def render(self) -> str:
        lines = []
        for i, o in enumerate(self.outcomes, 1):
            extra = f" +{','.join(p.id for p in o.added_patterns)}" if o.added_patterns else ""
            lines.append(f"{i}\t{o.kind.value}{extra}\t{' '.join(o.pair.source)}")
            if o.note:
                lines.append(f"\t# {o.note}")
        summary = " ".join(f"{k}={v}" for k, v in self.counts.items())
        lines.append(f"summary: {summary} patterns {self.patterns_before} -> {self.patterns_after}")
        return "\n".join(lines)


def integrate_corpus(g: Grammar, pairs: Iterable[BilingualPair],
                     schedule: Schedule = Schedule()) -> tuple[Grammar, CorpusReport]:
    """Fold :func:`integrate_pair` over ``pairs`` in order.  Pairs that were
    handled earlier in the pass are protected from later refinements."""
    before = len(g.patterns)
    outcomes = []
    done: list[BilingualPair] = []
    for pair in pairs:
        g, o = integrate_pair(g, pair, schedule, protect=done)
        outcomes.append(o)
        if o.kind is not OutcomeKind.NOT_INTEGRABLE:
            done.append(o.pair)
    assert not validate(g)
    return g, CorpusReport(outcomes, before, len(g.patterns))


def read_corpus(path) -> list[BilingualPair]:
    """One ``source<TAB>target`` pair per line; blank and ``#`` lines skipped."""
    pairs = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise ValueError(f"{path}:{n}: expected source<TAB>target")
        src, tgt = line.split("\t", 1)
        pairs.append(BilingualPair.from_text(src, tgt))
    return pairs
