import pytest

from patmt.dsl import parse_grammar, serialize_grammar
from patmt.engine import build_target, emit, translate
from patmt.grammar import validate
from patmt.integration import (
    BilingualPair,
    OutcomeKind,
    Schedule,
    best_translation,
    find_synchronized_derivation,
    integrate_corpus,
    integrate_pair,
    lexicalize,
    read_corpus,
)

P = BilingualPair.from_text


@pytest.fixture(scope="module")
def corpus():
    from patmt import fixture_path
    return read_corpus(fixture_path("corpus.tsv"))


def test_find_derivation_figure1(figure1):
    d = find_synchronized_derivation(figure1, "he knows me well".split(), "il me connait bien".split())
    assert str(d) == "(a (f) (c (e (i) (g))))"


def test_find_derivation_other_reading(figure1):
    toks = "he knows me well".split()
    d = find_synchronized_derivation(figure1, toks, "il me sait bien".split())
    assert d is not None
    tree, _, violations = build_target(d, figure1, tokens=toks)
    assert emit(tree) == ["il", "me", "sait", "bien"]
    # the cheapest such derivation goes through (b) and needs no violation
    assert "b" in str(d) and violations == 0


def test_find_derivation_absent(figure1):
    assert find_synchronized_derivation(figure1, "he knows me well".split(), "bien me il".split()) is None


LEAVE = """
feature OBJ local
pattern b: VP:1 ADVP:2 -> VP:1 || VP:1 <- VP:1 ADVP:2
pattern v: V:1 -> VP:1 || VP:1 <- V:1
pattern s: NP:1 VP:2 -> S:2 || S:2 <- NP:1 VP:2
lex n: he -> NP || NP <- il
lex l: leave:leaves -> V || V <- laisser:laisse
lex c: considerably -> ADVP || ADVP <- considérablement
"""


def test_lexicalize_fills_heads():
    g = parse_grammar(LEAVE)
    toks = "he leaves considerably".split()
    d = translate(toks, g)[0].derivation
    new = lexicalize(g, d)
    by_src = {p.id.split(".")[0]: p for p in new}
    b = by_src["b"]
    assert [(e.head, e.symbol) for e in b.source.rhs] == [("leave", "VP"), ("considerably", "ADVP")]
    assert [(e.head, e.symbol) for e in b.target.rhs] == [("laisser", "VP"), ("considérablement", "ADVP")]
    assert all(p.provenance.value == "integrated" for p in new)
    assert not lexicalize(g.with_patterns(new), d)


def test_lexicalize_skips_fully_constrained():
    g = parse_grammar("pattern p: x:A:1 -> S:1 || S:1 <- y:A:1\nlex a: x -> A || A <- y")
    d = translate("x", g)[0].derivation
    assert lexicalize(g, d) == []


def test_already_correct(figure1):
    g, out = integrate_pair(figure1, P("He knows me well", "il me connait bien"))
    assert out.kind is OutcomeKind.ALREADY_CORRECT
    assert out.added_patterns == [] and g is figure1


def test_competitive(tutorial):
    pair = P("he knows me", "il me connait")
    assert best_translation(tutorial, pair.source) == ("il", "me", "sait")
    g, out = integrate_pair(tutorial, pair)
    assert out.kind is OutcomeKind.LEXICALIZED
    assert best_translation(g, pair.source) == pair.target
    assert not validate(g)
    g2, again = integrate_pair(g, pair)
    assert again.kind is OutcomeKind.ALREADY_CORRECT and g2 == g


def test_idiom_falls_back_to_sentence(tutorial):
    pair = P("he leaves it behind", "il le laisse")
    assert best_translation(tutorial, pair.source) == ("il", "le", "laisse", "derriere")
    g, out = integrate_pair(tutorial, pair)
    assert out.kind is OutcomeKind.NEW_SENTENCE_PATTERN
    (p,) = out.added_patterns
    assert p.weight == -100 and p.preterminal and p.source.lhs.symbol == "S"
    assert best_translation(g, pair.source) == pair.target


def test_unparseable(figure1):
    pair = P("thank you", "merci")
    g, out = integrate_pair(figure1, pair)
    assert out.kind is OutcomeKind.NEW_SENTENCE_PATTERN
    assert translate("thank you", g)[0].text == "merci"
    assert not validate(g)


def test_weight_loop_rounds():
    # the competing pattern r is much cheaper than the lexicalized copy of q,
    # so the copy has to be lowered for a few rounds before it wins
    g = parse_grammar("""
pattern r w=-30: A:1 A:2 -> S:1 || S:1 <- A:1 A:2 z
pattern q: A:1 A:2 -> S:1 || S:1 <- A:2 A:1
lex x: x -> A || A <- one
lex y: x -> A || A <- two
""")
    pair = P("x x", "two one")
    assert best_translation(g, pair.source) == ("one", "one", "z")
    g2, out = integrate_pair(g, pair)
    assert out.kind is OutcomeKind.LEXICALIZED
    assert out.iterations == 3
    assert [(old, new) for _, old, new in out.weight_adjustments] == [(0, -30)]
    assert best_translation(g2, pair.source) == pair.target


def test_not_integrable():
    g = parse_grammar("pattern p: A:1 -> S:1 || S:1 <- A:1\nlex x: x -> A || A <- one")
    pair = P("x", "two")
    g2, out = integrate_pair(g, pair, Schedule(rounds=0), protect=[P("x", "one")])
    assert out.kind is OutcomeKind.NOT_INTEGRABLE and g2 is g


def test_bilingual_pair_nonempty():
    with pytest.raises(ValueError):
        BilingualPair((), ("x",))


def test_corpus_pass(tutorial, corpus):
    assert len(corpus) == 10
    g, report = integrate_corpus(tutorial, corpus)
    kinds = {o.kind for o in report.outcomes}
    assert kinds == {OutcomeKind.ALREADY_CORRECT, OutcomeKind.LEXICALIZED, OutcomeKind.NEW_SENTENCE_PATTERN}
    for pair in corpus:
        assert best_translation(g, pair.source) == pair.target
    g2, report2 = integrate_corpus(g, corpus)
    assert report2.counts["AlreadyCorrect"] == 10
    assert serialize_grammar(g2) == serialize_grammar(g)
    assert report.growth == len(g.patterns) - len(tutorial.patterns)


def test_monotone_coverage(tutorial, corpus):
    g = tutorial
    satisfied = set()
    for pair in corpus:
        g, out = integrate_pair(g, pair, protect=[p for p in corpus if p in satisfied])
        now = {p for p in corpus if best_translation(g, p.source) == p.target}
        assert satisfied <= now
        satisfied = now


def test_empty_and_trivial_corpus(figure1):
    g, report = integrate_corpus(figure1, [])
    assert g is figure1 and report.outcomes == []
    g, report = integrate_corpus(figure1, [P("he knows me well", "il me connait bien")])
    assert report.growth == 0


def test_read_corpus_rejects_bad_line(tmp_path):
    f = tmp_path / "c.tsv"
    f.write_text("# comment\n\na b\tc\nno tab here\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":4:"):
        read_corpus(f)


def test_report_render(tutorial, corpus):
    _, report = integrate_corpus(tutorial, corpus[:4])
    text = report.render()
    assert "summary:" in text and "Lexicalized" in text
    assert report.to_dict()["counts"]["AlreadyCorrect"] == 3
