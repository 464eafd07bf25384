"""Constraint checking, candidate ranking and target generation.

Translation runs in three phases:

1. the source chart is built with head and link constraints ignored
   (:func:`patmt.parser.parse`);
2. every packed analysis in the chart is checked against head, feature and
   aggregate constraints.  Sub-derivations are grouped into *states* by
   what a parent can observe of them (symbols, heads and synthesized
   feature vectors), which keeps every check local to one pattern;
3. derivations are enumerated lazily in ascending cost over those states
   and turned into target token sequences.

Costs follow the preference order for patterns: more head constraints and
more source terminals make a pattern cheaper, every node adds a fixed
charge, and target head violations add a large penalty.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from .grammar import (
    FeatureVector,
    Grammar,
    GrammarError,
    Pattern,
    Provenance,
    UnifyFailure,
)
from .parser import Chart, parse


@dataclass(frozen=True)
class Penalties:
    """Constants turning pattern preferences into numeric cost."""

    violation: float = 100
    head_bonus: float = 2
    terminal_bonus: float = 1
    node_charge: float = 1
    user_bonus: float = 50

    @classmethod
    def from_mapping(cls, data: dict) -> "Penalties":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


DEFAULT_PENALTIES = Penalties()


def static_weight(p: Pattern, pen: Penalties = DEFAULT_PENALTIES) -> float:
    w = (p.weight - pen.head_bonus * p.head_constraints()
         - pen.terminal_bonus * p.source_terminals() + pen.node_charge)
    if p.provenance == Provenance.USER:
        w -= pen.user_bonus
    return w


class ConstraintFailure(GrammarError):
    def __init__(self, span, pattern_id, reason):
        super().__init__(f"[{span[0]} {span[1]}] ({pattern_id}) {reason}")
        self.span = span
        self.pattern_id = pattern_id
        self.reason = reason


class GenerationFailure(GrammarError):
    def __init__(self, span, reason):
        super().__init__(f"[{span[0]} {span[1]}] {reason}")
        self.span = span
        self.reason = reason


class TranslationFailure(GrammarError):
    NO_PARSE = "NoParse"
    ALL_FAILED = "AllCandidatesFailed"
    BUDGET = "BudgetExhaustedEmpty"

    def __init__(self, kind: str, trace=()):
        super().__init__(kind)
        self.kind = kind
        self.trace = list(trace)


# -- derivations ---------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    """A tree of pattern applications; children follow the source RHS
    nonterminals left to right."""

    pattern_id: str
    span: tuple[int, int]
    children: tuple["Derivation", ...] = ()

    def nodes(self) -> Iterator["Derivation"]:
        yield self
        for c in self.children:
            yield from c.nodes()

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def __str__(self):
        if not self.children:
            return f"({self.pattern_id})"
        return f"({self.pattern_id} " + " ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class NodeInfo:
    """What a parent pattern can see of a sub-derivation."""

    src_symbol: str
    tgt_symbol: str
    src_head: Optional[str]
    tgt_head: Optional[str]
    src_vec: FeatureVector
    tgt_vec: FeatureVector


def _side(g: Grammar, side, heads, vecs, fail):
    """Unify one side of a phrasal pattern.  ``heads`` and ``vecs`` line up
    with the RHS nonterminals; returns (LHS head, LHS vector, unified RHS
    vectors)."""
    reg = g.registry
    elems = side.nonterminals
    unified = []
    for e, vec in zip(elems, vecs):
        try:
            unified.append(reg.unify(g.vector(e), vec))
        except UnifyFailure as x:
            fail(f"feature {x.feature} clashes on {e.symbol}:{e.link}")
    if reg.aggregates:
        cols = reg.aggregate_columns()
        pairs: dict[str, list] = {}
        for k, e in enumerate(elems):
            if e.aggregate in cols:
                pair, col = cols[e.aggregate]
                slot = pairs.setdefault(pair, [None, None])
                slot[col] = k
        for pair, (ka, kb) in pairs.items():
            try:
                unified[ka], unified[kb] = reg.unify_aggregate(pair, unified[ka], unified[kb])
            except UnifyFailure:
                fail(f"aggregate {pair} has no unifiable row")
    lhs = side.lhs
    vec = g.vector(lhs)
    head = None
    if lhs.link is not None:
        for k, e in enumerate(elems):
            if e.link == lhs.link:
                head = heads[k]
                try:
                    vec = reg.unify(vec, reg.head_projection(unified[k]))
                except UnifyFailure as x:
                    fail(f"head feature {x.feature} clashes with the LHS")
                break
    return head, vec, unified


def apply_pattern(g: Grammar, p: Pattern, children: Sequence[NodeInfo], span=(0, 0),
                  strict: bool = False) -> tuple[NodeInfo, int]:
    """Check one pattern application given its children's infos.

    Returns the synthesized info and the number of soft (target head)
    violations; raises ConstraintFailure for any hard failure.
    """
    def fail(reason):
        raise ConstraintFailure(span, p.id, reason)

    if p.preterminal:
        if children:
            fail("preterminal pattern with children")
        return NodeInfo(p.source.lhs.symbol, p.target.lhs.symbol, p.source_head, p.target_head,
                        g.vector(p.source.lhs), g.vector(p.target.lhs)), 0

    src = p.source.nonterminals
    if len(src) != len(children):
        fail(f"expected {len(src)} children, got {len(children)}")
    by_link = {}
    for e, c in zip(src, children):
        if c.src_symbol != e.symbol:
            fail(f"source child is {c.src_symbol}, expected {e.symbol}")
        if e.head is not None and c.src_head != e.head:
            fail(f"source head {c.src_head} does not satisfy {e.head}:{e.symbol}")
        by_link[e.link] = c
    s_head, s_vec, _ = _side(g, p.source, [c.src_head for c in children],
                             [c.src_vec for c in children], fail)

    tgt = p.target.nonterminals
    kids = []
    violations = 0
    for f in tgt:
        c = by_link.get(f.link)
        if c is None:
            fail(f"target link {f.link} has no source partner")
        if c.tgt_symbol != f.symbol:
            fail(f"target child is {c.tgt_symbol}, expected {f.symbol}")
        if f.head is not None and c.tgt_head != f.head:
            if strict:
                fail(f"target head {c.tgt_head} does not satisfy {f.head}:{f.symbol}")
            violations += 1
        kids.append(c)
    t_head, t_vec, _ = _side(g, p.target, [c.tgt_head for c in kids],
                             [c.tgt_vec for c in kids], fail)
    if p.target.lhs.link is None:
        t_head = None
    return NodeInfo(p.source.lhs.symbol, p.target.lhs.symbol, s_head, t_head, s_vec, t_vec), violations


def check_constraints(d: Derivation, g: Grammar, strict: bool = False,
                      tokens: Optional[Sequence[str]] = None) -> tuple[NodeInfo, int]:
    """Check every node of ``d`` bottom-up.

    Returns the root info and the total number of soft violations.  Raises
    ConstraintFailure at the first node that fails.
    """
    p = g[d.pattern_id]
    start, end = d.span
    pos = start
    kids = iter(d.children)
    for e in p.source.rhs:
        if e.terminal:
            if tokens is not None and (pos >= len(tokens) or tokens[pos] != e.symbol):
                raise ConstraintFailure(d.span, p.id, f"terminal {e.symbol!r} not at {pos}")
            pos += 1
        else:
            c = next(kids, None)
            if c is None or c.span[0] != pos:
                raise ConstraintFailure(d.span, p.id, "children do not tile the span")
            pos = c.span[1]
    if pos != end or next(kids, None) is not None:
        raise ConstraintFailure(d.span, p.id, "children do not tile the span")
    infos, total = [], 0
    for c in d.children:
        info, v = check_constraints(c, g, strict, tokens)
        infos.append(info)
        total += v
    info, v = apply_pattern(g, p, infos, d.span, strict)
    return info, total + v


def derivation_cost(d: Derivation, g: Grammar, pen: Penalties = DEFAULT_PENALTIES,
                    strict: bool = False) -> float:
    _, violations = check_constraints(d, g, strict)
    return sum(static_weight(g[n.pattern_id], pen) for n in d.nodes()) + pen.violation * violations


# -- target trees --------------------------------------------------------------

@dataclass(frozen=True)
class TargetTree:
    pattern_id: str
    symbol: str
    span: tuple[int, int]
    items: tuple[Union[str, "TargetTree"], ...]

    def leaves(self) -> Iterator[str]:
        for x in self.items:
            if isinstance(x, TargetTree):
                yield from x.leaves()
            else:
                yield x


def emit(t: TargetTree) -> list[str]:
    """Left-to-right terminal yield."""
    return list(t.leaves())


@dataclass(frozen=True)
class TraceEvent:
    phase: int
    span: tuple[int, int]
    kind: str
    patterns: tuple[str, ...] = ()
    text: str = ""


def _same_source(p: Pattern, q: Pattern) -> bool:
    return (p.source == q.source and q.preterminal
            and q.target.lhs.symbol == p.target.lhs.symbol)


def build_target(d: Derivation, g: Grammar, strict: bool = False,
                 tokens: Optional[Sequence[str]] = None):
    """Instantiate the target side of ``d``.

    Target head constraints are pushed down the head chain to the lexicon
    entry that supplies the head.  Lexicon alternatives for the same source
    word that violate the constraint are reported as rejected; if the entry
    actually used violates it, strict mode raises GenerationFailure and
    lenient mode records the violation.

    Returns ``(tree, events, violations)``.
    """
    governing: dict[int, Optional[str]] = {}
    events: list[TraceEvent] = []
    violations = 0

    def words(span):
        return " ".join(tokens[span[0]:span[1]]) if tokens is not None else ""

    def push(node, constraint):
        nonlocal violations
        governing[id(node)] = constraint
        p = g[node.pattern_id]
        if p.preterminal:
            target = " ".join(e.symbol for e in p.target.rhs)
            events.append(TraceEvent(3, node.span, "emit", (p.id,), f"{words(node.span)} ---> {target}"))
            if constraint is None:
                return
            for q in g.patterns:
                if q is not p and _same_source(p, q) and q.target_head != constraint:
                    events.append(TraceEvent(3, node.span, "alternative-rejected", (q.id,),
                                             f"({q.id}) violates a head constraint"))
            if p.target_head != constraint:
                if strict:
                    raise GenerationFailure(node.span, f"({p.id}) violates head constraint {constraint}")
                violations += 1
                events.append(TraceEvent(3, node.span, "head-violation", (p.id,),
                                         f"({p.id}) kept despite head constraint {constraint}"))
            return
        events.append(TraceEvent(3, node.span, "apply", (p.id,),
                                 f"{words(node.span)} ---> ({p.id}) {p.source.lhs.symbol}"))
        if constraint is not None and p.target.lhs.link is None:
            if strict:
                raise GenerationFailure(node.span, f"({p.id}) has no head for {constraint}")
            violations += 1
            events.append(TraceEvent(3, node.span, "head-violation", (p.id,),
                                     f"({p.id}) has no head for constraint {constraint}"))
        src_links = [e.link for e in p.source.nonterminals]
        tgt = {f.link: f for f in p.target.nonterminals}
        for link, child in zip(src_links, node.children):
            f = tgt[link]
            if f.head is not None:
                c = f.head
            elif f.link == p.target.lhs.link:
                c = constraint
            else:
                c = None
            push(child, c)

    push(d, None)

    def build(node) -> TargetTree:
        p = g[node.pattern_id]
        if p.preterminal:
            return TargetTree(p.id, p.target.lhs.symbol, node.span, tuple(e.symbol for e in p.target.rhs))
        child = {e.link: c for e, c in zip(p.source.nonterminals, node.children)}
        items = tuple(f.symbol if f.terminal else build(child[f.link]) for f in p.target.rhs)
        return TargetTree(p.id, p.target.lhs.symbol, node.span, items)

    return build(d), events, violations


# -- phase 2: state-split forest -----------------------------------------------

@dataclass(frozen=True)
class Candidate:
    item: tuple  # (symbol, start, end)
    pattern_id: str
    weight: float
    violations: int


class _Hyperedge:
    __slots__ = ("pattern", "order", "children", "cost")

    def __init__(self, pattern, order, children, cost):
        self.pattern = pattern
        self.order = order
        self.children = children
        self.cost = cost


class _State:
    __slots__ = ("key", "info", "span", "incoming", "edge_keys", "derivs", "heap", "seen", "pending")

    def __init__(self, key, info, span):
        self.key = key
        self.info = info
        self.span = span
        self.incoming: list[_Hyperedge] = []
        self.edge_keys: set = set()
        self.derivs = None
        self.heap = None
        self.seen = None
        self.pending = None


class _BudgetExhausted(Exception):
    pass


class Forest:
    """Phase-2 result: constraint-checked states for every chart item."""

    def __init__(self, chart: Chart, g: Grammar, strict: bool = False,
                 penalties: Penalties = DEFAULT_PENALTIES):
        self.chart = chart
        self.grammar = g
        self.strict = strict
        self.penalties = penalties
        self.states: dict[tuple, dict[tuple, _State]] = {}
        self.failures: dict[tuple, dict[str, str]] = {}
        self._outcome: dict[tuple, dict[str, Optional[int]]] = {}
        self._weights = {p.id: static_weight(p, penalties) for p in g.patterns}
        self._build()

    def _items_by_span(self):
        groups: dict[tuple[int, int], list] = {}
        for sym, s, e, _ in self.chart.inactive_keys():
            groups.setdefault((s, e), []).append((sym, s, e))
        return [groups[k] for k in sorted(groups, key=lambda se: (se[1] - se[0], se[0]))]

    def _build(self):
        g = self.grammar
        for items in self._items_by_span():
            analyses = {}
            for item in items:
                self.states.setdefault(item, {})
                outcome = self._outcome.setdefault(item, {})
                found = []
                for pid, kids in self.chart.derivations(item + (None,)):
                    nts = tuple(k[:3] for k in kids if not isinstance(k, int))
                    found.append((g[pid], nts))
                    outcome.setdefault(pid, None)
                analyses[item] = found
            changed = True
            while changed:
                changed = False
                for item in items:
                    for p, nts in analyses[item]:
                        if self._expand(item, p, nts):
                            changed = True
            for item in items:
                fails = self.failures.setdefault(item, {})
                for pid, v in self._outcome[item].items():
                    if v is None:
                        fails.setdefault(pid, "no child combination satisfies the constraints")
                    else:
                        fails.pop(pid, None)

    def _expand(self, item, p: Pattern, nts) -> bool:
        g = self.grammar
        tgt_symbol = {f.link: f.symbol for f in p.target.nonterminals}
        pools = []
        for e, key in zip(p.source.nonterminals, nts):
            want = tgt_symbol.get(e.link)
            pools.append([st for st in self.states.get(key, {}).values() if st.info.tgt_symbol == want])
        added = False
        span = item[1:]
        outcome = self._outcome[item]
        for combo in itertools.product(*pools):
            try:
                info, violations = apply_pattern(g, p, [c.info for c in combo], span, self.strict)
            except ConstraintFailure as x:
                self.failures.setdefault(item, {}).setdefault(p.id, x.reason)
                continue
            prev = outcome.get(p.id)
            outcome[p.id] = violations if prev is None else min(prev, violations)
            key = (info.src_symbol, span, info.tgt_symbol, info.src_head, info.tgt_head,
                   info.src_vec, info.tgt_vec)
            table = self.states[item]
            st = table.get(key)
            if st is None:
                st = table[key] = _State(key, info, span)
                added = True
            ekey = (p.id, tuple(c.key for c in combo))
            if ekey not in st.edge_keys:
                st.edge_keys.add(ekey)
                cost = self._weights[p.id] + self.penalties.violation * violations
                st.incoming.append(_Hyperedge(p, g.order(p.id), combo, cost))
                added = True
        return added

    # -- queries ---------------------------------------------------------------

    def candidates(self) -> dict[tuple, list[Candidate]]:
        """Per chart item, the constraint-satisfying patterns ordered by
        effective weight, then grammar order."""
        out = {}
        g = self.grammar
        for item, outcome in self._outcome.items():
            cands = [Candidate(item, pid, self._weights[pid] + self.penalties.violation * v, v)
                     for pid, v in outcome.items() if v is not None]
            cands.sort(key=lambda c: (c.weight, g.order(c.pattern_id)))
            if cands:
                out[item] = cands
        return out

    def root_states(self) -> list[_State]:
        n = len(self.chart.tokens)
        return list(self.states.get((self.grammar.start, 0, n), {}).values())

    def count_derivations(self) -> int:
        """Number of constraint-satisfying synchronized derivations (exact)."""
        memo: dict[int, int] = {}

        def count(st):
            k = id(st)
            if k not in memo:
                total = 0
                for e in st.incoming:
                    prod = 1
                    for c in e.children:
                        prod *= count(c)
                    total += prod
                memo[k] = total
            return memo[k]

        return sum(count(st) for st in self.root_states())


class _KBest:
    """Lazy k-best enumeration over an acyclic state hypergraph."""

    def __init__(self, budget: Optional[int]):
        self.budget = budget
        self.pops = 0

    def kth(self, st: _State, k: int):
        if st.derivs is None:
            st.derivs, st.heap, st.seen, st.pending = [], [], set(), None
            for ei, e in enumerate(st.incoming):
                ranks = (0,) * len(e.children)
                c = self._cost(e, ranks)
                if c is not None:
                    st.seen.add((ei, ranks))
                    heapq.heappush(st.heap, (c, e.order, ranks, ei))
        while len(st.derivs) <= k:
            if st.pending is not None:
                _, _, ranks, ei = st.pending
                st.pending = None
                e = st.incoming[ei]
                for j in range(len(ranks)):
                    r2 = ranks[:j] + (ranks[j] + 1,) + ranks[j + 1:]
                    if (ei, r2) in st.seen:
                        continue
                    c = self._cost(e, r2)
                    if c is not None:
                        st.seen.add((ei, r2))
                        heapq.heappush(st.heap, (c, e.order, r2, ei))
            if not st.heap:
                return None
            if self.budget is not None and self.pops >= self.budget:
                raise _BudgetExhausted()
            self.pops += 1
            best = heapq.heappop(st.heap)
            st.derivs.append(best)
            st.pending = best
        return st.derivs[k]

    def _cost(self, e: _Hyperedge, ranks):
        total = e.cost
        for child, r in zip(e.children, ranks):
            d = self.kth(child, r)
            if d is None:
                return None
            total += d[0]
        return total

    def derivation(self, st: _State, k: int) -> Derivation:
        _, _, ranks, ei = st.derivs[k]
        e = st.incoming[ei]
        kids = tuple(self.derivation(c, r) for c, r in zip(e.children, ranks))
        return Derivation(e.pattern.id, st.span, kids)


def _enumerate(forest: Forest, budget: Optional[int], exhausted: list):
    """Yield ``(cost, Derivation)`` over all root states in ascending cost."""
    kb = _KBest(budget)
    roots = forest.root_states()
    heap = []
    try:
        for i, st in enumerate(roots):
            d = kb.kth(st, 0)
            if d is not None:
                heap.append((d[0], i, 0))
        heapq.heapify(heap)
        while heap:
            cost, i, k = heapq.heappop(heap)
            yield cost, kb.derivation(roots[i], k)
            d = kb.kth(roots[i], k + 1)
            if d is not None:
                heapq.heappush(heap, (d[0], i, k + 1))
    except _BudgetExhausted:
        exhausted.append(True)


# -- public API ----------------------------------------------------------------

@dataclass
class Translation:
    tokens: list[str]
    cost: float
    derivation: Derivation
    target: TargetTree
    violations: int = 0
    trace: list[TraceEvent] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


class TranslationList(list):
    """A list of translations that also records budget exhaustion."""

    budget_exhausted: bool = False
    source: tuple = ()


def normalize_tokens(tokens: Union[str, Sequence[str]], g: Grammar) -> list[str]:
    """Split on whitespace; lower-case the first token when only its
    lower-case form is in the source vocabulary."""
    toks = tokens.split() if isinstance(tokens, str) else list(tokens)
    if toks:
        vocab = set(g.terminals)
        first = toks[0]
        if first not in vocab and first.lower() in vocab:
            toks[0] = first.lower()
    return toks


def rank_candidates(chart: Chart, g: Grammar, strict: bool = False,
                    penalties: Penalties = DEFAULT_PENALTIES) -> dict[tuple, list[Candidate]]:
    return Forest(chart, g, strict, penalties).candidates()


def _phase_events(chart: Chart, forest: Forest) -> list[TraceEvent]:
    toks = chart.tokens
    g = chart.grammar

    def order(item):
        return (item[2], -item[1])

    def words(s, e):
        return " ".join(toks[s:e])

    events = []
    items = sorted({k[:3] for k in chart.inactive_keys()}, key=order)
    for sym, s, e in items:
        pids = list(dict.fromkeys(pid for pid, _ in chart.derivations((sym, s, e, None))))
        events.append(TraceEvent(1, (s, e), "inactive", tuple(pids),
                                 f"{words(s, e)} ---> " + ", ".join(f"({p})" for p in pids) + f" {sym}"))
    cands = forest.candidates()
    for item in items:
        sym, s, e = item
        ranked = [c.pattern_id for c in cands.get(item, [])]
        if ranked:
            events.append(TraceEvent(2, (s, e), "candidates", tuple(ranked),
                                     f"{words(s, e)} ---> " + ", ".join(f"({p})" for p in ranked) + f" {sym}"))
        else:
            events.append(TraceEvent(2, (s, e), "no-candidates", (), f"{words(s, e)} ---> none"))
        for pid in sorted(forest.failures.get(item, {}), key=g.order):
            if pid not in ranked:
                events.append(TraceEvent(2, (s, e), "pattern-fails", (pid,),
                                         f"(pattern ({pid}) fails: {forest.failures[item][pid]})"))
        if len(ranked) > 1:
            events.append(TraceEvent(2, (s, e), "preference", tuple(ranked),
                                     "(preference ordering " + ", ".join(f"({p})" for p in ranked) + ")"))
    return events


def translate(tokens: Union[str, Sequence[str]], g: Grammar, m: Optional[int] = 1,
              node_budget: Optional[int] = 100_000, strict: bool = False,
              penalties: Penalties = DEFAULT_PENALTIES, trace: bool = True) -> TranslationList:
    """Return up to ``m`` distinct translations in ascending cost.

    ``m=None`` asks for every distinct translation.  Raises
    TranslationFailure when nothing can be produced.
    """
    if m is not None and m < 1:
        raise ValueError("m must be >= 1")
    toks = normalize_tokens(tokens, g)
    if not toks:
        raise TranslationFailure(TranslationFailure.NO_PARSE)
    chart = parse(toks, g, head_aware=False)
    if not chart.complete_parses():
        events = []
        if trace:
            events = [TraceEvent(1, (k[1], k[2]), "inactive", (), "") for k in chart.inactive_keys()]
        raise TranslationFailure(TranslationFailure.NO_PARSE, events)
    forest = Forest(chart, g, strict, penalties)
    shared = _phase_events(chart, forest) if trace else []
    if not forest.root_states():
        raise TranslationFailure(TranslationFailure.ALL_FAILED, shared)

    out = TranslationList()
    out.source = tuple(toks)
    seen = set()
    exhausted: list = []
    for cost, d in _enumerate(forest, node_budget, exhausted):
        try:
            tree, events, violations = build_target(d, g, strict, toks)
        except GenerationFailure:
            continue
        words = tuple(emit(tree))
        if words in seen:
            continue
        seen.add(words)
        out.append(Translation(list(words), cost, d, tree, violations,
                               shared + events if trace else []))
        if m is not None and len(out) >= m:
            break
    out.budget_exhausted = bool(exhausted)
    if not out:
        kind = TranslationFailure.BUDGET if exhausted else TranslationFailure.ALL_FAILED
        raise TranslationFailure(kind, shared)
    return out


def enumerate_derivations(tokens: Union[str, Sequence[str]], g: Grammar, strict: bool = False,
                          penalties: Penalties = DEFAULT_PENALTIES,
                          node_budget: Optional[int] = None) -> Iterator[tuple[float, Derivation]]:
    """Every synchronized derivation of the input in ascending cost
    (no collapsing of duplicate target strings)."""
    toks = normalize_tokens(tokens, g)
    if not toks:
        return
    chart = parse(toks, g)
    forest = Forest(chart, g, strict, penalties)
    yield from _enumerate(forest, node_budget, [])


def count_derivations(tokens: Union[str, Sequence[str]], g: Grammar, strict: bool = False) -> int:
    toks = normalize_tokens(tokens, g)
    if not toks:
        return 0
    return Forest(parse(toks, g), g, strict).count_derivations()


def render_trace(source: Sequence[str], events: Iterable[TraceEvent],
                 translation: Optional[Sequence[str]] = None) -> str:
    """Format events the way the sample translation figure lays them out."""
    headings = {1: "Phase 1: Source Analysis", 2: "Phase 2: Constraint Checking",
                3: "Phase 3: Target Generation"}
    lines = ["Input: " + " ".join(source)]
    phase = None
    for ev in events:
        if ev.phase != phase:
            phase = ev.phase
            lines += ["", headings[phase], ""]
        span = f"[{ev.span[0]} {ev.span[1]}]"
        if ev.kind in ("inactive", "candidates", "no-candidates", "emit", "apply"):
            lines.append(f"{span} {ev.text}")
        else:
            lines.append(f"   {ev.text}")
    if translation is not None:
        lines += ["", "Translation: " + " ".join(translation)]
    return "\n".join(lines)
