"""Text format for pattern grammars.

::

    # comment
    start S
    feature PRO
    feature OBJ local
    aggregate AGRS/AGRV:
      +NOMI+3RD+SG | +FIN+3SG
    pattern m w=0: NP:1 miss:V:2 NP:3 -> S:2 || S:2 <- NP:3 manquer:V:2 à NP:1
    lex h: knows -> know:V:+FIN+3SG || savoir:V:+FIN+3SG <- sait

An element is ``[head:]SYMBOL[:index][:features]`` where ALL-CAPS names are
nonterminals and anything else is a terminal.  In ``lex`` lines a token may
be written ``lemma:surface``.  A terminal that would otherwise read as a
nonterminal (or contains ``:``) is written in double quotes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .grammar import (
    Element,
    FeatureRegistry,
    Grammar,
    GrammarError,
    LOCAL,
    HEAD,
    Pattern,
    Provenance,
    Skeleton,
)

NONTERMINAL = re.compile(r"^[A-Z][A-Z0-9_]*$")
FEATURE_RUN = re.compile(r"([+\-−])([A-Za-z0-9_]+)")
HEADER = re.compile(r"^(pattern|lex)\s+([^\s:]+)([^:]*):(.*)$")
ARROWS = ("->", "||", "<-")


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class GrammarSyntaxError(GrammarError):
    def __init__(self, errors: list[ParseError]):
        super().__init__("\n".join(str(e) for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class GrammarDocument:
    text: str
    grammar: Grammar
    positions: dict  # pattern id -> (line, column)


class _LineError(Exception):
    def __init__(self, column, message):
        self.column = column
        self.message = message


def _split_colons(text: str) -> list[str]:
    """Split on ':' outside double quotes."""
    parts, cur, quoted = [], [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
            cur.append(ch)
        elif ch == ":" and not quoted:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _unquote(part: str) -> tuple[str, bool]:
    if len(part) >= 2 and part[0] == part[-1] == '"':
        return part[1:-1], True
    return part, False


def _parse_features(part: str, col: int):
    if part.startswith("*"):
        name = part[1:]
        if not re.fullmatch(r"[A-Za-z0-9_]+", name):
            raise _LineError(col, f"bad aggregate reference {part!r}")
        return (), name
    runs = FEATURE_RUN.findall(part)
    if not runs or "".join(s + n for s, n in runs) != part:
        raise _LineError(col, f"bad feature spec {part!r}")
    return tuple((n, s == "+") for s, n in runs), None


def _is_spec(part: str) -> bool:
    return part[:1] in ("+", "-", "−", "*")


def parse_element(text: str, col: int = 1) -> Element:
    """Parse one pattern element such as ``know:VP:1:+OBJ`` or ``well``."""
    parts = _split_colons(text)
    if any(p == "" for p in parts):
        raise _LineError(col, f"empty component in {text!r}")
    nt_at = [i for i, p in enumerate(parts) if NONTERMINAL.match(p)]
    if not nt_at:
        if len(parts) != 1:
            raise _LineError(col, f"{text!r} has no nonterminal; use lemma:surface only in lex lines")
        word, _ = _unquote(parts[0])
        return Element(word, terminal=True)
    i = nt_at[0]
    if i > 1:
        raise _LineError(col, f"too many components before nonterminal in {text!r}")
    head = _unquote(parts[0])[0] if i == 1 else None
    symbol = parts[i]
    link = None
    features = ()
    aggregate = None
    rest = parts[i + 1:]
    if rest and rest[0].isdigit():
        link = int(rest[0])
        if link < 1:
            raise _LineError(col, f"link index must be positive in {text!r}")
        rest = rest[1:]
    for part in rest:
        if not _is_spec(part):
            raise _LineError(col, f"unexpected component {part!r} in {text!r}")
        f, agg = _parse_features(part, col)
        features += f
        if agg is not None:
            if aggregate is not None:
                raise _LineError(col, f"two aggregate references in {text!r}")
            aggregate = agg
    return Element(symbol, False, head, link, features, aggregate)


def _parse_token(text: str, col: int) -> tuple[Element, Optional[str]]:
    """A lexicon token: ``surface`` or ``lemma:surface``."""
    parts = _split_colons(text)
    if len(parts) > 2 or any(p == "" for p in parts):
        raise _LineError(col, f"bad lexicon token {text!r}")
    words = [_unquote(p) for p in parts]
    for (w, quoted), p in zip(words, parts):
        if not quoted and (NONTERMINAL.match(p) or _is_spec(p)):
            raise _LineError(col, f"nonterminal or feature {p!r} inside a lexicon entry")
    if len(words) == 2:
        return Element(words[1][0], terminal=True), words[0][0]
    return Element(words[0][0], terminal=True), None


def _tokens_with_columns(body: str, offset: int):
    for m in re.finditer(r"\S+", body):
        yield m.group(), offset + m.start() + 1


def _parse_header_options(opts: str, col: int):
    weight = 0
    prov = Provenance.BUILTIN
    for tok in opts.split():
        if tok.startswith("w="):
            try:
                weight = float(tok[2:])
            except ValueError:
                raise _LineError(col, f"bad weight {tok!r}")
            if weight == int(weight):
                weight = int(weight)
        elif tok in ("user", "integrated", "builtin"):
            prov = Provenance(tok)
        else:
            raise _LineError(col, f"unknown option {tok!r}")
    return weight, prov


def _parse_rule_line(kind: str, pid: str, opts: str, body: str, body_col: int) -> Pattern:
    weight, prov = _parse_header_options(opts, body_col)
    toks = list(_tokens_with_columns(body, body_col - 1))
    arrows = [i for i, (t, _) in enumerate(toks) if t in ARROWS]
    if [toks[i][0] for i in arrows] != list(ARROWS):
        raise _LineError(body_col, "expected '<srcRHS> -> <srcLHS> || <tgtLHS> <- <tgtRHS>'")
    a, b, c = arrows
    src_rhs, src_lhs, tgt_lhs, tgt_rhs = toks[:a], toks[a + 1:b], toks[b + 1:c], toks[c + 1:]
    for part, name in ((src_rhs, "source RHS"), (tgt_rhs, "target RHS")):
        if not part:
            raise _LineError(body_col, f"empty {name}")
    for part, name in ((src_lhs, "source LHS"), (tgt_lhs, "target LHS")):
        if len(part) != 1:
            col = part[1][1] if part else body_col
            raise _LineError(col, f"{name} must be exactly one element")

    lhs_s = parse_element(*src_lhs[0])
    lhs_t = parse_element(*tgt_lhs[0])
    for e, (t, col) in ((lhs_s, src_lhs[0]), (lhs_t, tgt_lhs[0])):
        if e.terminal:
            raise _LineError(col, f"LHS {t!r} is not a nonterminal")
    if kind == "lex":
        sides = []
        for lhs, rhs in ((lhs_s, src_rhs), (lhs_t, tgt_rhs)):
            elems, lemmas = [], []
            for t, col in rhs:
                e, lemma = _parse_token(t, col)
                elems.append(e)
                lemmas.append((lemma, col))
            lhs = _lexicon_head(lhs, lemmas)
            sides.append(_normalize_lexicon(Skeleton(lhs, tuple(elems))))
        return Pattern(pid, sides[0], sides[1], weight, prov)

    sides = []
    for lhs, rhs in ((lhs_s, src_rhs), (lhs_t, tgt_rhs)):
        elems = [parse_element(t, col) for t, col in rhs]
        seen = {}
        for e, (t, col) in zip(elems, rhs):
            if e.link is not None:
                if e.link in seen:
                    raise _LineError(col, f"link index {e.link} occurs twice on one side")
                seen[e.link] = col
        sk = Skeleton(lhs, tuple(elems))
        if all(e.terminal for e in elems):
            sk = _normalize_lexicon(sk)
        sides.append(sk)
    return Pattern(pid, sides[0], sides[1], weight, prov)


def _lexicon_head(lhs: Element, lemmas) -> Element:
    """Fold a ``lemma:surface`` token into the LHS head.

    The stored head is None whenever it equals the surface token the entry
    would default to, so both spellings give the same model.
    """
    surfaces = lemmas  # (lemma or None, column) per token
    if lhs.link is not None:
        if not 1 <= lhs.link <= len(surfaces):
            raise _LineError(surfaces[0][1], f"LHS index {lhs.link} is not a token position")
        lemma = surfaces[lhs.link - 1][0]
    elif len(surfaces) == 1:
        lemma = surfaces[0][0]
    else:
        given = [(l, c) for l, c in surfaces if l is not None]
        if given:
            raise _LineError(given[0][1], "lemma on a multi-token entry needs an LHS index")
        lemma = None
    head = lhs.head if lhs.head is not None else lemma
    return Element(lhs.symbol, False, head, lhs.link, lhs.features, lhs.aggregate)


def _normalize_lexicon(side: Skeleton) -> Skeleton:
    lhs = side.lhs
    if lhs.head is None:
        return side
    if lhs.link is not None and 1 <= lhs.link <= len(side.rhs):
        implied = side.rhs[lhs.link - 1].symbol
    elif lhs.link is None and len(side.rhs) == 1:
        implied = side.rhs[0].symbol
    else:
        implied = None
    if implied == lhs.head:
        lhs = Element(lhs.symbol, False, None, lhs.link, lhs.features, lhs.aggregate)
    return Skeleton(lhs, side.rhs)


def parse_document(text: str) -> GrammarDocument:
    """Parse grammar text; raises GrammarSyntaxError listing every defect."""
    errors: list[ParseError] = []
    features: list[tuple[str, str]] = []
    aggregates: list[tuple[str, list]] = []
    patterns: list[Pattern] = []
    positions = {}
    start = "S"
    current_agg = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0] if '"' not in raw else _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        try:
            if indent and current_agg is not None:
                if "|" not in stripped:
                    raise _LineError(indent + 1, "aggregate row needs '<vecA> | <vecB>'")
                left, right = stripped.split("|", 1)
                row = []
                for part, col in ((left.strip(), indent + 1),
                                  (right.strip(), indent + len(left) + 2)):
                    if not part:
                        raise _LineError(col, "empty aggregate vector")
                    spec, agg = _parse_features(part, col)
                    if agg is not None:
                        raise _LineError(col, "aggregate row must list +/- features")
                    row.append(spec)
                current_agg[1].append(tuple(row))
                continue
            current_agg = None
            if indent:
                raise _LineError(1, "unexpected indentation")
            word = stripped.split()[0]
            if word == "start":
                args = stripped.split()[1:]
                if len(args) != 1 or not NONTERMINAL.match(args[0]):
                    raise _LineError(len(word) + 2 if args else 1, "start needs one nonterminal")
                start = args[0]
            elif word == "feature":
                args = stripped.split()[1:]
                if not args or len(args) > 2 or (len(args) == 2 and args[1] not in (LOCAL, HEAD)):
                    raise _LineError(len(word) + 2 if args else 1, "usage: feature NAME [local|head]")
                if not re.fullmatch(r"[A-Za-z0-9_]+", args[0]):
                    raise _LineError(len(word) + 2, f"bad feature name {args[0]!r}")
                if any(n == args[0] for n, _ in features):
                    raise _LineError(len(word) + 2, f"feature {args[0]} declared twice")
                features.append((args[0], args[1] if len(args) == 2 else HEAD))
            elif word == "aggregate":
                m = re.fullmatch(r"aggregate\s+([A-Za-z0-9_]+)/([A-Za-z0-9_]+)\s*:", stripped)
                if not m:
                    raise _LineError(len(word) + 2, "usage: aggregate A/B:")
                current_agg = (f"{m.group(1)}/{m.group(2)}", [])
                aggregates.append(current_agg)
            elif word in ("pattern", "lex"):
                m = HEADER.match(stripped)
                if not m:
                    raise _LineError(1, f"malformed {word} header")
                kind, pid, opts, body = m.groups()
                if pid in positions:
                    raise _LineError(len(kind) + 2, f"duplicate pattern id {pid!r}")
                body_col = m.start(4) + 1 + indent
                patterns.append(_parse_rule_line(kind, pid, opts, body, body_col))
                positions[pid] = (lineno, 1)
            else:
                raise _LineError(1, f"unknown directive {word!r}")
        except _LineError as e:
            errors.append(ParseError(lineno, e.column, e.message))

    if errors:
        raise GrammarSyntaxError(errors)
    registry = FeatureRegistry(tuple(features),
                               tuple((n, tuple(rows)) for n, rows in aggregates))
    return GrammarDocument(text, Grammar(registry, tuple(patterns), start), positions)


def _strip_comment(raw: str) -> str:
    quoted = False
    for i, ch in enumerate(raw):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return raw[:i]
    return raw


def parse_grammar(text: str) -> Grammar:
    return parse_document(text).grammar


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


# -- serialization -------------------------------------------------------------

def _quote(word: str) -> str:
    if (NONTERMINAL.match(word) or ":" in word or _is_spec(word) or word in ARROWS
            or "#" in word or '"' in word or word.startswith("w=")):
        if '"' in word or not word or any(c.isspace() for c in word):
            raise ValueError(f"terminal {word!r} cannot be written")
        return f'"{word}"'
    return word


def format_features(spec) -> str:
    return "".join(("+" if v else "-") + n for n, v in spec)


def format_element(e: Element) -> str:
    if e.terminal:
        return _quote(e.symbol)
    parts = []
    if e.head is not None:
        parts.append(_quote(e.head))
    parts.append(e.symbol)
    if e.link is not None:
        parts.append(str(e.link))
    if e.features:
        parts.append(format_features(e.features))
    if e.aggregate:
        parts.append("*" + e.aggregate)
    return ":".join(parts)


def _format_weight(w) -> str:
    if float(w) == int(w):
        return str(int(w))
    return repr(float(w))


def format_pattern(p: Pattern) -> str:
    opts = f" w={_format_weight(p.weight)}"
    if p.provenance != Provenance.BUILTIN:
        opts += f" {p.provenance.value}"
    if p.preterminal and not any(e.nonterminal for e in p.target.rhs):
        src_lhs, tgt_lhs = _normalize_lexicon(p.source).lhs, _normalize_lexicon(p.target).lhs
        kind = "lex"
    else:
        src_lhs, tgt_lhs = p.source.lhs, p.target.lhs
        kind = "pattern"
    src = " ".join(format_element(e) for e in p.source.rhs)
    tgt = " ".join(format_element(e) for e in p.target.rhs)
    return (f"{kind} {p.id}{opts}: {src} -> {format_element(src_lhs)} || "
            f"{format_element(tgt_lhs)} <- {tgt}")


def serialize_grammar(g: Grammar) -> str:
    lines = [f"start {g.start}"]
    for name, cls in g.registry.features:
        lines.append(f"feature {name}" + (" local" if cls == LOCAL else ""))
    for name, rows in g.registry.aggregates:
        lines.append(f"aggregate {name}:")
        for a, b in rows:
            lines.append(f"  {format_features(a)} | {format_features(b)}")
    lines.extend(format_pattern(p) for p in g.patterns)
    return "\n".join(lines) + "\n"
