"""Plain CFGs derived from a pattern grammar, and brute-force language checks.

* ``skeleton_cfg``       every source skeleton, constraints stripped (upper bound G)
* ``unconstrained_cfg``  skeletons of patterns without head constraints (lower bound H)
* ``head_annotated_cfg`` the weakly equivalent CFG whose nonterminals carry heads (G_T)

``cfg_recognize`` is a bottom-up dotted-rule recognizer written separately
from :mod:`patmt.parser`; it serves as the oracle for it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from .grammar import (
    Element,
    FeatureRegistry,
    Grammar,
    GrammarError,
    Pattern,
    Skeleton,
    validate,
)
from .parser import EarleyParser

EPSILON = "ε"
DEFAULT_SIZE_CAP = 50_000
DEFAULT_LENGTH_CAP = 6


class SizeCapExceeded(GrammarError):
    def __init__(self, projected: int, cap: int):
        super().__init__(f"head-annotated CFG would have {projected} rules (cap {cap})")
        self.projected = projected
        self.cap = cap


class EnumerationCapExceeded(GrammarError, ValueError):
    pass


@dataclass(frozen=True)
class PlainCfg:
    terminals: tuple[str, ...]
    nonterminals: tuple[str, ...]
    rules: tuple[tuple[str, tuple[str, ...]], ...]
    start: str

    def __str__(self):
        return "\n".join(f"{lhs} <- {' '.join(rhs)}" for lhs, rhs in self.rules)


def _cfg(rules: Iterable[tuple[str, tuple[str, ...]]], nonterminals: Iterable[str], start: str) -> PlainCfg:
    rules = tuple(dict.fromkeys(rules))
    nts = tuple(dict.fromkeys([start, *nonterminals, *(lhs for lhs, _ in rules)]))
    nt_set = set(nts)
    terms = tuple(dict.fromkeys(s for _, rhs in rules for s in rhs if s not in nt_set))
    return PlainCfg(terms, nts, rules, start)


def skeleton_cfg(g: Grammar) -> PlainCfg:
    return _cfg((p.source.cfg_rule() for p in g.patterns), g.nonterminals, g.start)


def unconstrained_cfg(g: Grammar) -> PlainCfg:
    return _cfg((p.source.cfg_rule() for p in g.patterns if p.head_constraints() == 0),
                g.nonterminals, g.start)


def head_alphabet(g: Grammar) -> tuple[str, ...]:
    """Every word that can be a head: lexicon heads plus head constraints."""
    heads = {}
    for p in g.patterns:
        if p.preterminal:
            if p.source_head is not None:
                heads.setdefault(p.source_head, None)
        else:
            for e in p.source.nonterminals:
                if e.head is not None:
                    heads.setdefault(e.head, None)
    return tuple(heads)


def _head_options(p: Pattern, alphabet) -> list[list[Optional[str]]]:
    return [[e.head] if e.head is not None else [*alphabet, None] for e in p.source.nonterminals]


def projected_rule_count(g: Grammar) -> int:
    alphabet = head_alphabet(g)
    total = len(alphabet) + 1  # super-start rules
    for p in g.patterns:
        if p.preterminal:
            total += 1
        else:
            n = 1
            for opts in _head_options(p, alphabet):
                n *= len(opts)
            total += n
    return total


def annotated(symbol: str, head: Optional[str]) -> str:
    return f"{symbol}_{EPSILON if head is None else head}"


def head_annotated_cfg(g: Grammar, cap: int = DEFAULT_SIZE_CAP) -> PlainCfg:
    """CFG whose nonterminal ``X_w`` derives what X derives with head w.

    Unconstrained RHS positions are expanded over every head and epsilon,
    which can multiply the rule count; the construction is refused when the
    projected size exceeds ``cap``.
    """
    projected = projected_rule_count(g)
    if projected > cap:
        raise SizeCapExceeded(projected, cap)
    alphabet = head_alphabet(g)
    rules = []
    for p in g.patterns:
        lhs = p.source.lhs
        if p.preterminal:
            rules.append((annotated(lhs.symbol, p.source_head), tuple(e.symbol for e in p.source.rhs)))
            continue
        nts = p.source.nonterminals
        for choice in itertools.product(*_head_options(p, alphabet)):
            heads = {e.link: h for e, h in zip(nts, choice)}
            it = iter(choice)
            rhs = tuple(e.symbol if e.terminal else annotated(e.symbol, next(it)) for e in p.source.rhs)
            head = heads.get(lhs.link) if lhs.link is not None else None
            rules.append((annotated(lhs.symbol, head), rhs))
    names = set(g.nonterminals) | {lhs for lhs, _ in rules}
    start = "START"
    while start in names:
        start += "'"
    for h in (*alphabet, None):
        rules.append((start, (annotated(g.start, h),)))
    return _cfg(rules, (), start)


# -- oracle recognizer ---------------------------------------------------------

class CfgRecognizer:
    """Bottom-up dotted-rule chart over (start, end) spans, extended one
    token at a time.  No prediction step: every rule is tried at every span.
    Non-generating symbols are dropped before recognition."""

    def __init__(self, c: PlainCfg):
        self.cfg = c
        nts = set(c.nonterminals)
        generating: set = set()
        changed = True
        while changed:
            changed = False
            for lhs, rhs in c.rules:
                if lhs not in generating and all(s in generating or s not in nts for s in rhs):
                    generating.add(lhs)
                    changed = True
        self.rules = [(lhs, rhs) for lhs, rhs in c.rules
                      if lhs in generating and all(s in generating or s not in nts for s in rhs)]
        self.by_first: dict[str, list[int]] = {}
        for r, (_, rhs) in enumerate(self.rules):
            self.by_first.setdefault(rhs[0], []).append(r)
        self.tokens: list[str] = []
        # cols[e][i] = (complete symbols over (i, e), {next symbol: [(rule, matched)]})
        self.cols: list[dict[int, tuple[set, dict]]] = [{}]

    def push(self, tok: str) -> None:
        j = len(self.tokens)
        e = j + 1
        self.tokens.append(tok)
        col: dict[int, tuple[set, dict]] = {}
        self.cols.append(col)
        for i in range(j, -1, -1):
            done: set = set()
            waiting: dict = {}
            col[i] = (done, waiting)
            fresh = []
            if i == j:
                fresh += [(r, 1) for r in self.by_first.get(tok, ())]
            else:
                _, w_prev = self.cols[j][i]
                fresh += [(r, k + 1) for r, k in w_prev.get(tok, ())]
                for m in range(i + 1, e):
                    syms, _ = col[m]
                    if not syms:
                        continue
                    _, w = self.cols[m][i]
                    for sym in syms:
                        fresh += [(r, k + 1) for r, k in w.get(sym, ())]
            while fresh:
                r, k = fresh.pop()
                lhs, rhs = self.rules[r]
                if k == len(rhs):
                    if lhs not in done:
                        done.add(lhs)
                        fresh += [(r2, 1) for r2 in self.by_first.get(lhs, ())]
                else:
                    waiting.setdefault(rhs[k], []).append((r, k))

    def pop(self) -> None:
        self.tokens.pop()
        self.cols.pop()

    def spans(self) -> set[tuple[str, int, int]]:
        return {(sym, i, e) for e, col in enumerate(self.cols) for i, (syms, _) in col.items()
                for sym in syms}

    def accepts(self) -> bool:
        n = len(self.tokens)
        return n > 0 and self.cfg.start in self.cols[n][0][0]


def cfg_recognize(c: PlainCfg, tokens: Sequence[str]) -> bool:
    rec = CfgRecognizer(c)
    for t in tokens:
        rec.push(t)
    return rec.accepts()


def cfg_spans(c: PlainCfg, tokens: Sequence[str]) -> set[tuple[str, int, int]]:
    """Every (nonterminal, start, end) derivable over ``tokens``."""
    rec = CfgRecognizer(c)
    for t in tokens:
        rec.push(t)
    return rec.spans()


# -- enumeration ---------------------------------------------------------------

Acceptor = Union[PlainCfg, Grammar]


def _incremental(acceptor: Acceptor, head_aware: bool = True):
    if isinstance(acceptor, Grammar):
        return EarleyParser(acceptor, head_aware=head_aware)
    return CfgRecognizer(acceptor)


def _vocabulary(acceptor: Acceptor) -> tuple[str, ...]:
    return acceptor.terminals


def iter_strings(vocabulary: Sequence[str], max_len: int) -> Iterator[tuple[str, ...]]:
    for n in range(1, max_len + 1):
        yield from itertools.product(vocabulary, repeat=n)


def joint_acceptance(recognizers: Sequence, vocabulary: Sequence[str], max_len: int):
    """Yield ``(string, [accepted by each recognizer])`` for every string up
    to ``max_len``, sharing work between strings with a common prefix."""
    prefix: list[str] = []

    def walk():
        for w in vocabulary:
            prefix.append(w)
            for r in recognizers:
                r.push(w)
            yield tuple(prefix), [r.accepts() for r in recognizers]
            if len(prefix) < max_len:
                yield from walk()
            for r in recognizers:
                r.pop()
            prefix.pop()

    yield from walk()


def _check_cap(max_len: int, cap: int):
    if max_len > cap:
        raise EnumerationCapExceeded(f"max_len {max_len} exceeds cap {cap}")


def enumerate_accepted(acceptor: Acceptor, max_len: int, cap: int = DEFAULT_LENGTH_CAP,
                       vocabulary: Optional[Sequence[str]] = None) -> set[tuple[str, ...]]:
    """All strings up to ``max_len`` over the terminal vocabulary that the
    acceptor accepts (a Grammar accepts with head constraints enforced)."""
    _check_cap(max_len, cap)
    vocab = _vocabulary(acceptor) if vocabulary is None else tuple(vocabulary)
    rec = _incremental(acceptor)
    return {s for s, (ok,) in joint_acceptance([rec], vocab, max_len) if ok}


@dataclass
class EquivalenceReport:
    kind: str
    max_len: int
    vocabulary_size: int
    checked: int = 0
    disagreements: list = field(default_factory=list)
    features_erased: bool = False
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "max_len": self.max_len,
            "vocabulary_size": self.vocabulary_size,
            "checked": self.checked,
            "features_erased": self.features_erased,
            "ok": self.ok,
            "counts": self.counts,
            "disagreements": [{"string": " ".join(s), **flags} for s, flags in self.disagreements],
            "witnesses": [" ".join(s) for s in self.witnesses],
        }

    def render(self) -> str:
        lines = []
        if self.features_erased:
            lines.append("# features and aggregates erased before the check")
        lines.append(f"{self.kind}: {'PASS' if self.ok else 'FAIL'}  max_len={self.max_len} "
                     f"vocabulary={self.vocabulary_size} checked={self.checked}")
        for name, n in self.counts.items():
            lines.append(f"  |{name}| = {n}")
        for s, flags in self.disagreements:
            lines.append("  disagree: " + " ".join(s) + "  " +
                         " ".join(f"{k}={v}" for k, v in flags.items()))
        if self.witnesses:
            lines.append("  L(T) is strictly smaller than L(G); e.g.:")
            lines.extend("    " + " ".join(s) for s in self.witnesses)
        return "\n".join(lines)


def check_equivalence(g: Grammar, max_len: int = 5, cap: int = DEFAULT_LENGTH_CAP,
                      size_cap: int = DEFAULT_SIZE_CAP) -> EquivalenceReport:
    """Compare pattern-grammar acceptance with the head-annotated CFG on
    every string up to ``max_len``."""
    _check_cap(max_len, cap)
    erased = g.erase_features()
    gt = head_annotated_cfg(erased, size_cap)
    vocab = erased.terminals
    report = EquivalenceReport("equivalence", max_len, len(vocab), features_erased=True)
    t_count = gt_count = 0
    recs = [EarleyParser(erased, head_aware=True), CfgRecognizer(gt)]
    for s, (by_t, by_gt) in joint_acceptance(recs, vocab, max_len):
        report.checked += 1
        t_count += by_t
        gt_count += by_gt
        if by_t != by_gt:
            report.disagreements.append((s, {"T": by_t, "G_T": by_gt}))
    report.counts = {"L(T)": t_count, "L(G_T)": gt_count, "rules(G_T)": len(gt.rules)}
    return report


def check_bounds(g: Grammar, max_len: int = 5, cap: int = DEFAULT_LENGTH_CAP,
                 witness_limit: int = 5) -> EquivalenceReport:
    """Check L(H) ⊆ L(T) ⊆ L(G) on every string up to ``max_len``."""
    _check_cap(max_len, cap)
    vocab = g.terminals
    report = EquivalenceReport("bounds", max_len, len(vocab))
    recs = [CfgRecognizer(unconstrained_cfg(g)), EarleyParser(g, head_aware=True),
            CfgRecognizer(skeleton_cfg(g))]
    counts = [0, 0, 0]
    for s, flags in joint_acceptance(recs, vocab, max_len):
        report.checked += 1
        h, t, big = flags
        counts = [c + f for c, f in zip(counts, flags)]
        if (h and not t) or (t and not big):
            report.disagreements.append((s, {"H": h, "T": t, "G": big}))
        elif big and not t and len(report.witnesses) < witness_limit:
            report.witnesses.append(s)
    report.counts = {"L(H)": counts[0], "L(T)": counts[1], "L(G)": counts[2]}
    return report


# -- random grammars for property checks ----------------------------------------

def random_grammar(seed: int, max_patterns: int = 8, max_terminals: int = 6, max_rhs: int = 3,
                   features: bool = False, min_terminals: int = 2) -> Grammar:
    """A small validated grammar drawn from ``seed``.

    Lexicon entries sometimes share a lemma across surface words, phrasal
    rules mix terminals and nonterminals, and about a third of the RHS
    nonterminals carry a head constraint.
    """
    rng = random.Random(seed)
    while True:
        g = _draw(rng, max_patterns, max_terminals, max_rhs, features, min_terminals)
        if not validate(g):
            return g


def _draw(rng, max_patterns, max_terminals, max_rhs, features, min_terminals) -> Grammar:
    nts = ["S", "A", "B"]
    words = [f"w{i}" for i in range(rng.randint(min_terminals, max_terminals))]
    feats = (("F", "head"), ("L", "local")) if features else ()
    registry = FeatureRegistry(feats)

    def spec():
        if not features or rng.random() < 0.6:
            return ()
        name = rng.choice(["F", "L"])
        return ((name, rng.random() < 0.5),)

    n_lex = rng.randint(2, min(len(words) + 1, max_patterns - 2))
    n_phr = rng.randint(1, max_patterns - n_lex)
    patterns = []
    heads = []
    lex_words = list(words)
    rng.shuffle(lex_words)
    for k in range(n_lex):
        w = lex_words[k % len(lex_words)]
        lemma = rng.choice([w, w, "h" + w[-1], "hx"])
        heads.append(lemma)
        sym = rng.choice(nts)
        f = spec()
        src = Skeleton(Element(sym, head=None if lemma == w else lemma, features=f), (Element(w, True),))
        tgt = Skeleton(Element(sym, head=None if lemma == w else f"t{lemma}", features=f),
                       (Element(f"t{w}", True),))
        patterns.append(Pattern(f"x{k}", src, tgt))
    for k in range(n_phr):
        lhs_sym = "S" if k == 0 else rng.choice(nts)
        n = rng.randint(1, max_rhs)
        rhs = []
        link = 0
        for _ in range(n):
            if rng.random() < 0.7:
                link += 1
                head = rng.choice(heads) if rng.random() < 0.35 else None
                rhs.append(Element(rng.choice(nts), head=head, link=link, features=spec()))
            else:
                rhs.append(Element(rng.choice(words), True))
        links = [e.link for e in rhs if e.nonterminal]
        lhs_link = rng.choice(links + [None]) if links else None
        order = [e for e in rhs if e.nonterminal]
        rng.shuffle(order)
        tgt_rhs = [Element(e.symbol, head=(f"t{e.head}" if e.head and rng.random() < 0.5 else None),
                           link=e.link, features=spec()) for e in order]
        if rng.random() < 0.3 or not tgt_rhs:
            tgt_rhs.insert(rng.randint(0, len(tgt_rhs)), Element("tz", True))
        f = spec()
        patterns.append(Pattern(f"r{k}", Skeleton(Element(lhs_sym, link=lhs_link, features=f), tuple(rhs)),
                                Skeleton(Element(lhs_sym, link=lhs_link, features=f), tuple(tgt_rhs))))
    return Grammar(registry, tuple(patterns), "S")
