"""Earley parsing over the source skeletons of a pattern grammar.

Every pattern is predicted at every position, so the chart holds every
(symbol, span) derivable from the input, not only those reachable from the
start symbol.  Inactive items are packed: one item per (symbol, span, head)
with any number of backpointer sets.

With ``head_aware=False`` head constraints are ignored and heads are not
tracked.  With ``head_aware=True`` an item also records its head word and a
head-constrained RHS element only accepts children with that head.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .grammar import Grammar

ItemKey = tuple  # (symbol, start, end, head)
ChildRef = Union[ItemKey, int]  # int = token position of a scanned terminal


@dataclass(frozen=True)
class Edge:
    """A chart edge.  ``backpointers`` holds one children tuple per packed
    analysis; each tuple has one entry per completed RHS element."""

    span: tuple[int, int]
    pattern_id: str
    dot: int
    head: Optional[str]
    backpointers: tuple[tuple[ChildRef, ...], ...]
    active: bool


class _Index:
    """Per-grammar lookup tables, shared by all parses of one grammar."""

    def __init__(self, g: Grammar):
        self.grammar = g
        self.patterns = g.patterns
        self.rhs = [p.source.rhs for p in g.patterns]
        self.lhs = [p.source.lhs for p in g.patterns]
        self.lex_head = [p.source_head for p in g.patterns]
        self.pre = [p.preterminal for p in g.patterns]
        self.first_nt: dict[str, list[int]] = {}
        self.first_t: dict[str, list[int]] = {}
        for i, rhs in enumerate(self.rhs):
            table = self.first_t if rhs[0].terminal else self.first_nt
            table.setdefault(rhs[0].symbol, []).append(i)


_INDEX_CACHE: dict[int, _Index] = {}


def _index(g: Grammar) -> _Index:
    idx = _INDEX_CACHE.get(id(g))
    if idx is None or idx.grammar is not g:
        idx = _Index(g)
        if len(_INDEX_CACHE) > 64:
            _INDEX_CACHE.clear()
        _INDEX_CACHE[id(g)] = idx
    return idx


class _Column:
    __slots__ = ("active", "waiting", "scanning", "inactive")

    def __init__(self):
        # (pattern index, dot, start, head) -> {(prev key, prev column, child): None}
        self.active: dict[tuple, dict] = {}
        self.waiting: dict[str, list[tuple]] = {}
        self.scanning: dict[str, list[tuple]] = {}
        # (symbol, start, head) -> [completed active keys]
        self.inactive: dict[tuple, list[tuple]] = {}


class EarleyParser:
    """Incremental parser: ``push`` a token, ``pop`` it back off."""

    def __init__(self, g: Grammar, head_aware: bool = False):
        self.grammar = g
        self.head_aware = head_aware
        self.ix = _index(g)
        self.tokens: list[str] = []
        self.columns: list[_Column] = [_Column()]

    def push(self, token: str) -> None:
        j = len(self.tokens)
        prev = self.columns[j]
        col = _Column()
        self.tokens.append(token)
        self.columns.append(col)
        agenda: list[tuple] = []
        for key in prev.scanning.get(token, ()):
            self._advance(key, j, j, j + 1, agenda)
        for pidx in self.ix.first_t.get(token, ()):
            self._advance((pidx, 0, j, None), j, j, j + 1, agenda)
        while agenda:
            sym, start, head = agenda.pop()
            child = (sym, start, j + 1, head)
            source = self.columns[start]
            for key in source.waiting.get(sym, ()):
                self._advance(key, start, child, j + 1, agenda, head)
            for pidx in self.ix.first_nt.get(sym, ()):
                self._advance((pidx, 0, start, None), start, child, j + 1, agenda, head)

    def pop(self) -> None:
        self.tokens.pop()
        self.columns.pop()

    def _advance(self, key, k, child, end, agenda, child_head=None):
        pidx, dot, start, head = key
        rhs = self.ix.rhs[pidx]
        elem = rhs[dot]
        if self.head_aware:
            if elem.nonterminal and elem.head is not None and elem.head != child_head:
                return
            if elem.nonterminal and elem.link is not None and elem.link == self.ix.lhs[pidx].link:
                head = child_head
        col = self.columns[end]
        new = (pidx, dot + 1, start, head)
        bps = col.active.get(new)
        if bps is not None:
            bps[(key, k, child)] = None
            return
        col.active[new] = {(key, k, child): None}
        if dot + 1 == len(rhs):
            if self.head_aware and self.ix.pre[pidx]:
                head = self.ix.lex_head[pidx]
            ikey = (self.ix.lhs[pidx].symbol, start, head)
            done = col.inactive.get(ikey)
            if done is None:
                col.inactive[ikey] = [new]
                agenda.append(ikey)
            else:
                done.append(new)
        else:
            nxt = rhs[dot + 1]
            table = col.scanning if nxt.terminal else col.waiting
            table.setdefault(nxt.symbol, []).append(new)

    # -- queries ---------------------------------------------------------------

    def accepts(self) -> bool:
        """True iff the start symbol spans everything pushed so far."""
        n = len(self.tokens)
        if n == 0:
            return False
        start = self.grammar.start
        return any(sym == start and s == 0 for sym, s, _ in self.columns[n].inactive)


class Chart:
    """Closed Earley chart for a whole token sequence."""

    def __init__(self, parser: EarleyParser):
        self._p = parser
        self.tokens = tuple(parser.tokens)
        self.grammar = parser.grammar
        self.head_aware = parser.head_aware

    def __len__(self):
        return len(self.tokens)

    def inactive_keys(self) -> list[ItemKey]:
        out = []
        for end, col in enumerate(self._p.columns):
            for sym, start, head in col.inactive:
                out.append((sym, start, end, head))
        return out

    def spans(self) -> set[tuple[str, int, int]]:
        """The (symbol, start, end) facts of all inactive items."""
        return {(sym, s, e) for sym, s, e, _ in self.inactive_keys()}

    def has(self, symbol: str, start: int, end: int) -> bool:
        return any(sym == symbol and s == start for sym, s, _ in self._p.columns[end].inactive)

    def _tuples(self, end, key, memo):
        mk = (end, key)
        if mk in memo:
            return memo[mk]
        if key[1] == 0:
            out = [()]
        else:
            out = []
            for prev, k, child in self._p.columns[end].active[key]:
                for t in self._tuples(k, prev, memo):
                    out.append(t + (child,))
        memo[mk] = out
        return out

    def derivations(self, item: ItemKey) -> list[tuple[str, tuple[ChildRef, ...]]]:
        """Packed analyses of an inactive item as ``(pattern id, children)``.
        Children are aligned to the full source RHS; terminals appear as the
        token position they were scanned at."""
        sym, start, end, head = item
        memo: dict = {}
        out = []
        for key in self._p.columns[end].inactive.get((sym, start, head), ()):
            pid = self.grammar.patterns[key[0]].id
            for t in self._tuples(end, key, memo):
                out.append((pid, t))
        return out

    def edges(self, include_active: bool = False) -> Iterator[Edge]:
        memo: dict = {}
        for end, col in enumerate(self._p.columns):
            for key in col.active:
                pidx, dot, start, head = key
                done = dot == len(self._p.ix.rhs[pidx])
                if not done and not include_active:
                    continue
                if done and self.head_aware and self._p.ix.pre[pidx]:
                    head = self._p.ix.lex_head[pidx]
                yield Edge((start, end), self.grammar.patterns[pidx].id, dot, head,
                           tuple(self._tuples(end, key, memo)), not done)

    def complete_parses(self) -> list[ItemKey]:
        n = len(self.tokens)
        return [(sym, 0, n, h) for sym, s, h in self._p.columns[n].inactive
                if sym == self.grammar.start and s == 0]


def parse(tokens: Sequence[str], g: Grammar, head_aware: bool = False) -> Chart:
    p = EarleyParser(g, head_aware)
    for t in tokens:
        p.push(t)
    return Chart(p)


def recognize(tokens: Sequence[str], g: Grammar, head_aware: bool = True) -> bool:
    """Acceptance by the pattern grammar (head constraints enforced)."""
    if not tokens:
        return False
    p = EarleyParser(g, head_aware)
    for t in tokens:
        p.push(t)
    return p.accepts()
