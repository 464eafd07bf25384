"""Data model for translation patterns, binary feature unification and
whole-grammar validation.

A pattern pairs a source CFG rule with a target CFG rule.  Nonterminals on
either side may carry a head constraint (``miss:V``), a link index shared
with the other side (``V:2``) and a feature specification (``+FIN+3SG`` or an
aggregate reference ``*AGRS``).  Everything here is immutable once built.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

PLUS = 1
MINUS = -1
UNBOUND = 0

HEAD = "head"
LOCAL = "local"


class GrammarError(Exception):
    """Base class for errors raised by this package."""


class UnifyFailure(GrammarError):
    """Raised when two feature vectors (or an aggregate pair) clash."""

    def __init__(self, feature: str, index: Optional[int] = None):
        super().__init__(f"unification failed on {feature}")
        self.feature = feature
        self.index = index


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length vector of PLUS / MINUS / UNBOUND slots."""

    slots: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.slots)

    @classmethod
    def empty(cls, size: int) -> "FeatureVector":
        return cls((UNBOUND,) * size)

    def is_empty(self) -> bool:
        return not any(self.slots)


def unify(a: FeatureVector, b: FeatureVector, names: Optional[Sequence[str]] = None) -> FeatureVector:
    """Slotwise unification; unbound is the identity, a +/- clash fails."""
    if len(a.slots) != len(b.slots):
        raise ValueError("feature vectors differ in length")
    out = []
    for i, (x, y) in enumerate(zip(a.slots, b.slots)):
        if x == UNBOUND:
            out.append(y)
        elif y == UNBOUND or x == y:
            out.append(x)
        else:
            raise UnifyFailure(names[i] if names else f"#{i}", i)
    return FeatureVector(tuple(out))


@dataclass(frozen=True)
class FeatureRegistry:
    """Ordered feature names with their class, plus aggregate tables.

    ``aggregates`` maps a pair name such as ``"AGRS/AGRV"`` to its disjuncts,
    each a ``(vector_a, vector_b)`` pair given as feature specs.
    """

    features: tuple[tuple[str, str], ...] = ()
    aggregates: tuple[tuple[str, tuple[tuple["FeatureSpec", "FeatureSpec"], ...]], ...] = ()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.features)

    def __len__(self) -> int:
        return len(self.features)

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.features):
            if n == name:
                return i
        raise KeyError(name)

    def has(self, name: str) -> bool:
        return any(n == name for n, _ in self.features)

    def vector(self, spec: "FeatureSpec") -> FeatureVector:
        slots = [UNBOUND] * len(self.features)
        for name, value in spec:
            slots[self.index(name)] = PLUS if value else MINUS
        return FeatureVector(tuple(slots))

    def spec(self, vec: FeatureVector) -> "FeatureSpec":
        return tuple((name, v == PLUS) for (name, _), v in zip(self.features, vec.slots) if v)

    def head_projection(self, vec: FeatureVector) -> FeatureVector:
        """Keep only head-class features (the ones passed up the head chain)."""
        return FeatureVector(tuple(v if cls == HEAD else UNBOUND
                                   for (_, cls), v in zip(self.features, vec.slots)))

    def aggregate_columns(self) -> dict[str, tuple[str, int]]:
        """Map each column name (``AGRS``) to ``(pair name, column 0|1)``."""
        cols = {}
        for pair, _ in self.aggregates:
            a, b = pair.split("/")
            cols[a] = (pair, 0)
            cols[b] = (pair, 1)
        return cols

    def disjuncts(self, pair: str):
        for name, rows in self.aggregates:
            if name == pair:
                return rows
        raise KeyError(pair)

    def unify(self, a: FeatureVector, b: FeatureVector) -> FeatureVector:
        return unify(a, b, self.names)

    def unify_aggregate(self, pair: str, va: FeatureVector, vb: FeatureVector):
        """Unify ``va``/``vb`` with the first disjunct of ``pair`` that accepts both."""
        for row_a, row_b in self.disjuncts(pair):
            try:
                ua = unify(self.vector(row_a), va)
                ub = unify(self.vector(row_b), vb)
            except UnifyFailure:
                continue
            return ua, ub
        raise UnifyFailure(pair)


# A feature spec is the sparse, order-preserving form written in grammars:
# (("NOMI", True), ("3RD", False)) for +NOMI-3RD.
FeatureSpec = tuple[tuple[str, bool], ...]


@dataclass(frozen=True)
class Element:
    """One symbol occurrence inside a skeleton.

    For a preterminal rule the LHS ``head`` is the declared head lemma; on
    every other nonterminal it is a head constraint.
    """

    symbol: str
    terminal: bool = False
    head: Optional[str] = None
    link: Optional[int] = None
    features: FeatureSpec = ()
    aggregate: Optional[str] = None  # column name, e.g. "AGRS"

    @property
    def nonterminal(self) -> bool:
        return not self.terminal

    def stripped(self) -> "Element":
        return Element(self.symbol, self.terminal, self.head, self.link)


@dataclass(frozen=True)
class Skeleton:
    lhs: Element
    rhs: tuple[Element, ...]

    @property
    def nonterminals(self) -> tuple[Element, ...]:
        return tuple(e for e in self.rhs if e.nonterminal)

    def cfg_rule(self) -> tuple[str, tuple[str, ...]]:
        return self.lhs.symbol, tuple(e.symbol for e in self.rhs)

    def shape(self) -> tuple:
        """Skeleton identity ignoring head constraints (symbols, links, features)."""
        return (self.lhs.symbol, self.lhs.link, self.lhs.features, self.lhs.aggregate,
                tuple((e.symbol, e.terminal, e.link, e.features, e.aggregate) for e in self.rhs))


class Provenance(str, enum.Enum):
    BUILTIN = "builtin"
    USER = "user"
    INTEGRATED = "integrated"


@dataclass(frozen=True)
class Pattern:
    id: str
    source: Skeleton
    target: Skeleton
    weight: float = 0
    provenance: Provenance = Provenance.BUILTIN

    @property
    def preterminal(self) -> bool:
        return all(e.terminal for e in self.source.rhs)

    @property
    def source_head(self) -> Optional[str]:
        """Head introduced by a preterminal rule (None for phrasal rules)."""
        return _preterminal_head(self.source) if self.preterminal else None

    @property
    def target_head(self) -> Optional[str]:
        return _preterminal_head(self.target) if self.preterminal else None

    def head_constraints(self) -> int:
        return sum(1 for e in self.source.rhs if e.nonterminal and e.head is not None)

    def source_terminals(self) -> int:
        return sum(1 for e in self.source.rhs if e.terminal)

    def body(self) -> tuple:
        """Everything except id, weight and provenance; used for duplicate checks."""
        return (self.source, self.target)


def _preterminal_head(side: Skeleton) -> Optional[str]:
    lhs = side.lhs
    if lhs.head is not None:
        return lhs.head
    if lhs.link is not None:
        if 1 <= lhs.link <= len(side.rhs):
            return side.rhs[lhs.link - 1].symbol
        return None
    if len(side.rhs) == 1:
        return side.rhs[0].symbol
    return None


@dataclass(frozen=True)
class Grammar:
    registry: FeatureRegistry = field(default_factory=FeatureRegistry)
    patterns: tuple[Pattern, ...] = ()
    start: str = "S"

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {p.id: p for p in self.patterns})
        object.__setattr__(self, "_order", {p.id: i for i, p in enumerate(self.patterns)})

    def __getitem__(self, pid: str) -> Pattern:
        return self._by_id[pid]

    def __contains__(self, pid: str) -> bool:
        return pid in self._by_id

    def order(self, pid: str) -> int:
        return self._order[pid]

    @property
    def terminals(self) -> tuple[str, ...]:
        """Source terminal vocabulary in first-appearance order."""
        seen = {}
        for p in self.patterns:
            for e in p.source.rhs:
                if e.terminal:
                    seen.setdefault(e.symbol, None)
        return tuple(seen)

    @property
    def nonterminals(self) -> tuple[str, ...]:
        seen = {self.start: None}
        for p in self.patterns:
            for e in (p.source.lhs, *p.source.rhs):
                if e.nonterminal:
                    seen.setdefault(e.symbol, None)
        return tuple(seen)

    def vector(self, element: Element) -> FeatureVector:
        known = tuple((n, v) for n, v in element.features if self.registry.has(n))
        return self.registry.vector(known)

    def replace(self, patterns: Iterable[Pattern] = None, **kw) -> "Grammar":
        return Grammar(kw.get("registry", self.registry),
                       tuple(self.patterns if patterns is None else patterns),
                       kw.get("start", self.start))

    def with_patterns(self, extra: Iterable[Pattern]) -> "Grammar":
        return self.replace(self.patterns + tuple(extra))

    def erase_features(self) -> "Grammar":
        """Copy with every feature spec and aggregate reference removed."""
        def strip(sk: Skeleton) -> Skeleton:
            return Skeleton(sk.lhs.stripped(), tuple(e.stripped() for e in sk.rhs))
        return Grammar(FeatureRegistry(),
                       tuple(Pattern(p.id, strip(p.source), strip(p.target), p.weight, p.provenance)
                             for p in self.patterns),
                       self.start)


# -- ordering between patterns ---------------------------------------------

class Specificity(enum.Enum):
    MORE = "strictlyMore"
    LESS = "strictlyLess"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def more_specific(p: Pattern, q: Pattern) -> Specificity:
    """Compare head-constraint sets of two patterns sharing a source skeleton."""
    if p.source.shape() != q.source.shape():
        return Specificity.INCOMPARABLE
    hp = {(i, e.head) for i, e in enumerate(p.source.rhs) if e.nonterminal and e.head}
    hq = {(i, e.head) for i, e in enumerate(q.source.rhs) if e.nonterminal and e.head}
    if hp == hq:
        return Specificity.EQUAL
    if hp > hq:
        return Specificity.MORE
    if hp < hq:
        return Specificity.LESS
    return Specificity.INCOMPARABLE


def static_priority(p: Pattern) -> tuple[int, int]:
    """(head constraint count, terminal count) over the source skeleton."""
    return p.head_constraints(), p.source_terminals()


# -- validation ----------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    pattern_id: Optional[str]
    check: str
    message: str

    def __str__(self):
        where = self.pattern_id if self.pattern_id is not None else "-"
        return f"{where}: [{self.check}] {self.message}"


def validate(g: Grammar) -> list[Diagnostic]:
    """Return every problem found in ``g``; an empty list means usable."""
    out: list[Diagnostic] = []
    seen_ids = set()
    columns = g.registry.aggregate_columns()
    for p in g.patterns:
        if p.id in seen_ids:
            out.append(Diagnostic(p.id, "unique-id", "duplicate pattern id"))
        seen_ids.add(p.id)
        out.extend(_check_pattern(g, p, columns))
    if not g.start.isupper():
        out.append(Diagnostic(None, "start", f"start symbol {g.start!r} is not a nonterminal"))
    elif g.patterns and not any(p.source.lhs.symbol == g.start for p in g.patterns):
        out.append(Diagnostic(None, "start", f"no pattern rewrites the start symbol {g.start}"))
    for name, rows in g.registry.aggregates:
        for a, b in rows:
            for n, _ in a + b:
                if not g.registry.has(n):
                    out.append(Diagnostic(None, "features", f"aggregate {name} uses unknown feature {n}"))
    out.extend(_check_cycles(g))
    return out


def _check_pattern(g: Grammar, p: Pattern, columns) -> list[Diagnostic]:
    out = []

    def diag(check, msg):
        out.append(Diagnostic(p.id, check, msg))

    for side_name, side in (("source", p.source), ("target", p.target)):
        if not side.rhs:
            diag("empty-rhs", f"{side_name} RHS is empty")
        links = [e.link for e in side.rhs if e.link is not None]
        for e in side.rhs:
            if e.terminal and (e.link is not None or e.head is not None or e.features or e.aggregate):
                diag("terminal", f"terminal {e.symbol!r} carries annotations on {side_name} side")
        if len(links) != len(set(links)):
            diag("link-bijection", f"duplicate link index on {side_name} side")
        if not p.preterminal:
            if side.lhs.link is not None and side.lhs.link not in links:
                diag("lhs-link", f"{side_name} LHS index {side.lhs.link} does not occur in the RHS")
            if side.lhs.head is not None:
                diag("lhs-head", f"{side_name} LHS of a phrasal pattern cannot declare a head")
        elif side.lhs.link is not None and not 1 <= side.lhs.link <= len(side.rhs):
            diag("lhs-link", f"{side_name} LHS index {side.lhs.link} is not a token position")
        for e in (side.lhs, *side.rhs):
            for n, _ in e.features:
                if not g.registry.has(n):
                    diag("features", f"feature {n} is not registered")
            if e.aggregate is not None and e.aggregate not in columns:
                diag("aggregate", f"aggregate column {e.aggregate} is not declared")
        used = {}
        for e in side.rhs:
            if e.aggregate in columns:
                used.setdefault(columns[e.aggregate][0], []).append(columns[e.aggregate][1])
        if side.lhs.aggregate is not None:
            diag("aggregate", f"aggregate reference on {side_name} LHS")
        for pair, cols in used.items():
            if sorted(cols) != [0, 1]:
                diag("aggregate", f"aggregate {pair} columns are not paired on the {side_name} side")

    src = {e.link: e for e in p.source.rhs if e.nonterminal}
    tgt = {e.link: e for e in p.target.rhs if e.nonterminal}
    if None in src or None in tgt:
        diag("link-bijection", "every RHS nonterminal must carry a link index")
    src.pop(None, None)
    tgt.pop(None, None)
    if set(src) != set(tgt):
        missing = sorted(set(src) ^ set(tgt))
        diag("link-bijection", f"link indices {missing} are not shared by both sides")
    if p.preterminal and any(e.nonterminal for e in p.target.rhs):
        diag("link-bijection", "preterminal target side contains nonterminals")
    return out


def unary_chain_edges(g: Grammar):
    """Edges (parent pair) -> (child pair) from single-nonterminal source RHSs."""
    edges = []
    for p in g.patterns:
        rhs = p.source.rhs
        if len(rhs) == 1 and rhs[0].nonterminal:
            link = rhs[0].link
            tchild = next((e for e in p.target.rhs if e.nonterminal and e.link == link), None)
            if tchild is None:
                continue
            edges.append(((p.source.lhs.symbol, p.target.lhs.symbol),
                          (rhs[0].symbol, tchild.symbol), p.id))
    return edges


def _check_cycles(g: Grammar) -> list[Diagnostic]:
    graph: dict = {}
    for parent, child, pid in unary_chain_edges(g):
        graph.setdefault(parent, []).append((child, pid))
    out = []
    state = {}  # 1 = on stack, 2 = done
    reported = set()

    def visit(node, path):
        state[node] = 1
        for child, pid in graph.get(node, ()):
            if state.get(child) == 1:
                i = next(k for k, (n, _) in enumerate(path) if n == child)
                cycle = path[i:] + [(child, pid)]
                pids = tuple(sorted({q for _, q in cycle[1:]}))
                if pids not in reported:
                    reported.add(pids)
                    chain = " -> ".join(f"{a}/{b}" for (a, b), _ in cycle)
                    out.append(Diagnostic(pids[0], "cycle",
                                          f"synchronized unary cycle {chain} via patterns {', '.join(pids)}"))
            elif child not in state:
                visit(child, path + [(child, pid)])
        state[node] = 2

    for node in sorted(graph):
        if node not in state:
            visit(node, [(node, None)])
    return out
