import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patmt.dsl import (
    GrammarSyntaxError,
    format_pattern,
    parse_document,
    parse_element,
    parse_grammar,
    serialize_grammar,
)
from patmt.equivalence import random_grammar
from patmt.grammar import Element, Grammar, Pattern, Skeleton, validate


def test_miss_pattern():
    g = parse_grammar("pattern m: NP:1 miss:V:2 NP:3 -> S:2 || S:2 <- NP:3 manquer:V:2 à NP:1")
    p = g["m"]
    assert {e.link for e in p.source.nonterminals} == {1, 2, 3}
    assert p.source.rhs[1] == Element("V", head="miss", link=2)
    assert p.target.rhs[1] == Element("V", head="manquer", link=2)
    assert p.target.rhs[2] == Element("à", terminal=True)
    assert p.source.lhs == Element("S", link=2)


def test_element_forms():
    assert parse_element("know:VP:1:+OBJ") == Element("VP", head="know", link=1, features=(("OBJ", True),))
    assert parse_element("NP:2:-PRO+SG") == Element("NP", link=2, features=(("PRO", False), ("SG", True)))
    assert parse_element("NP:1:*AGRS") == Element("NP", link=1, aggregate="AGRS")
    assert parse_element("well") == Element("well", terminal=True)
    assert parse_element('"NP"') == Element("NP", terminal=True)


def test_serialize_pattern_c(figure1):
    assert format_pattern(figure1["c"]) == (
        "pattern c w=0: know:VP:1:+OBJ well -> VP:1 || VP:1 <- connaitre:VP:1:+OBJ bien")


def test_lexicon_with_lemma(figure1):
    h = figure1["h"]
    assert h.preterminal
    assert h.source_head == "know" and h.target_head == "savoir"
    assert [e.symbol for e in h.source.rhs] == ["knows"]
    assert figure1["f"].source_head == "he"


def test_figure1_round_trip(figure1):
    text = serialize_grammar(figure1)
    again = parse_grammar(text)
    assert again == figure1
    assert serialize_grammar(again) == text


def test_empty_grammar_serializes_to_header():
    assert serialize_grammar(Grammar()) == "start S\n"
    assert parse_grammar(serialize_grammar(Grammar())) == Grammar()


def test_pattern_line_with_only_terminals_is_lexicon():
    a = parse_grammar("pattern x: knows -> V || V <- connait")
    b = parse_grammar("lex x: knows -> V || V <- connait")
    assert a == b


def test_quoted_terminals_round_trip():
    p = Pattern("q", Skeleton(Element("S"), (Element("I", True), Element("a:b", True))),
                Skeleton(Element("S"), (Element("#x", True),)))
    g = Grammar(patterns=(p,))
    assert parse_grammar(serialize_grammar(g)) == g


def test_provenance_and_weight():
    g = parse_grammar("pattern p w=-3.5 user: NP:1 -> S:1 || S:1 <- NP:1\nlex n: a -> NP || NP <- b")
    assert g["p"].weight == -3.5
    assert g["p"].provenance.value == "user"
    assert "w=-3.5 user" in serialize_grammar(g)


@pytest.mark.parametrize("text, line, col", [
    ("pattern x: NP:1 NP:1 -> S:1 || S:1 <- NP:1", 1, 17),
    ("\n\npattern x NP:1 -> S:1", 3, None),
    ("feature", 1, 1),
    ("bogus stuff", 1, 1),
    ("pattern x: NP:1 -> S:1 || S:1 <- NP:1:+", 1, 34),
])
def test_parse_errors_located(text, line, col):
    with pytest.raises(GrammarSyntaxError) as err:
        parse_grammar(text)
    e = err.value.errors[0]
    assert e.line == line
    assert 1 <= e.column <= len(text.splitlines()[line - 1])
    if col is not None:
        assert e.column == col


def test_all_errors_reported():
    text = "bogus\npattern x: NP:1 NP:1 -> S:1 || S:1 <- NP:1\nfeature a b c\n"
    with pytest.raises(GrammarSyntaxError) as err:
        parse_grammar(text)
    assert [e.line for e in err.value.errors] == [1, 2, 3]


def test_parse_deterministic():
    text = "bogus\nfeature X\n"
    errs = []
    for _ in range(2):
        with pytest.raises(GrammarSyntaxError) as err:
            parse_grammar(text)
        errs.append(err.value.errors)
    assert errs[0] == errs[1]


def test_positions(figure1, data_path):
    with open(data_path("figure1.pcfg"), encoding="utf-8") as fh:
        text = fh.read()
    doc = parse_document(text)
    line, _ = doc.positions["c"]
    assert text.splitlines()[line - 1].startswith("pattern c")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_round_trip_random(seed, features):
    g = random_grammar(seed, features=features)
    assert not validate(g)
    text = serialize_grammar(g)
    assert parse_grammar(text) == g
    assert serialize_grammar(parse_grammar(text)) == text
