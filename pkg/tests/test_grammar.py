import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patmt.dsl import parse_grammar
from patmt.grammar import (
    MINUS,
    PLUS,
    UNBOUND,
    FeatureRegistry,
    FeatureVector,
    Specificity,
    UnifyFailure,
    more_specific,
    static_priority,
    unary_chain_edges,
    unify,
    validate,
)

SIZE = 6
vectors = st.lists(st.sampled_from([PLUS, MINUS, UNBOUND]), min_size=SIZE, max_size=SIZE).map(
    lambda s: FeatureVector(tuple(s)))


def try_unify(a, b):
    try:
        return unify(a, b)
    except UnifyFailure:
        return None


# -- unification --------------------------------------------------------------

@settings(max_examples=1000)
@given(vectors, vectors)
def test_unify_commutative(a, b):
    assert try_unify(a, b) == try_unify(b, a)


@settings(max_examples=1000)
@given(vectors)
def test_unify_idempotent(a):
    assert unify(a, a) == a


@settings(max_examples=1000)
@given(vectors, vectors)
def test_unify_monotone(a, b):
    c = try_unify(a, b)
    if c is not None:
        assert unify(c, b) == c
        assert unify(c, a) == c
        # c only adds information to a
        assert all(x == UNBOUND or x == y for x, y in zip(a.slots, c.slots))


@settings(max_examples=1000)
@given(vectors, vectors)
def test_unify_fails_exactly_on_clash(a, b):
    clash = any(x and y and x != y for x, y in zip(a.slots, b.slots))
    assert (try_unify(a, b) is None) == clash


@settings(max_examples=500)
@given(vectors, vectors, vectors)
def test_unify_associative(a, b, c):
    ab = try_unify(a, b)
    bc = try_unify(b, c)
    left = None if ab is None else try_unify(ab, c)
    right = None if bc is None else try_unify(a, bc)
    assert left == right


def test_unify_examples():
    reg = FeatureRegistry((("OBJ", "local"), ("TRANS", "head")))
    assert reg.unify(reg.vector((("OBJ", True),)), reg.vector(())) == reg.vector((("OBJ", True),))
    with pytest.raises(UnifyFailure) as err:
        reg.unify(reg.vector((("TRANS", True),)), reg.vector((("TRANS", False),)))
    assert err.value.feature == "TRANS"


def test_unify_length_mismatch():
    with pytest.raises(ValueError):
        unify(FeatureVector((PLUS,)), FeatureVector((PLUS, MINUS)))


# -- aggregates ---------------------------------------------------------------

def agr(figure1, spec_a, spec_b):
    reg = figure1.registry
    return reg.unify_aggregate("AGRS/AGRV", reg.vector(spec_a), reg.vector(spec_b))


def spec(text):
    out = []
    for chunk in text.replace("+", " +").replace("-", " -").split():
        out.append((chunk[1:], chunk[0] == "+"))
    return tuple(out)


@pytest.mark.parametrize("a, b", [
    ("+NOMI+3RD+SG", "+FIN+3SG"),
    ("+NOMI+3RD+PL", "+FIN-3SG"),
    ("+NOMI-3RD", "+FIN-3SG"),
    ("+NOMI", "+FIN+PAST"),
])
def test_agreement_table_rows_accepted(figure1, a, b):
    ua, ub = agr(figure1, spec(a), spec(b))
    reg = figure1.registry
    # the result only adds information to the inputs
    assert unify(ua, reg.vector(spec(a))) == ua
    assert unify(ub, reg.vector(spec(b))) == ub


def test_agreement_first_row_committed(figure1):
    reg = figure1.registry
    ua, ub = agr(figure1, spec("+NOMI"), spec("+FIN"))
    # row 1 is the first that fits and it binds 3RD and SG on the subject
    assert ua == reg.vector(spec("+NOMI+3RD+SG"))
    assert ub == reg.vector(spec("+FIN+3SG"))


def test_agreement_non_member_rejected(figure1):
    # singular third person subject with a plural, non-past verb: row 1 needs
    # +3SG, rows 2/3 need +PL or -3RD, row 4 needs +PAST.
    with pytest.raises(UnifyFailure):
        agr(figure1, spec("+NOMI+3RD+SG-PL"), spec("+FIN-3SG-PAST"))


def test_agreement_sg_without_pl_is_ambiguous(figure1):
    # SG and PL are separate features, so +SG alone does not exclude row 2
    ua, _ = agr(figure1, spec("+NOMI+3RD+SG"), spec("+FIN-3SG-PAST"))
    assert ua == figure1.registry.vector(spec("+NOMI+3RD+SG+PL"))


@settings(max_examples=300)
@given(st.data())
def test_aggregate_is_first_matching_row(figure1, data):
    reg = figure1.registry
    n = len(reg)
    va = FeatureVector(tuple(data.draw(st.lists(st.sampled_from([PLUS, MINUS, UNBOUND]),
                                                  min_size=n, max_size=n))))
    vb = FeatureVector(tuple(data.draw(st.lists(st.sampled_from([PLUS, MINUS, UNBOUND]),
                                                  min_size=n, max_size=n))))
    expected = None
    for ra, rb in reg.disjuncts("AGRS/AGRV"):
        a2, b2 = try_unify(reg.vector(ra), va), try_unify(reg.vector(rb), vb)
        if a2 is not None and b2 is not None:
            expected = (a2, b2)
            break
    try:
        got = reg.unify_aggregate("AGRS/AGRV", va, vb)
    except UnifyFailure:
        got = None
    assert got == expected


def test_head_projection_drops_local(figure1):
    reg = figure1.registry
    v = reg.vector(spec("+OBJ+FIN"))
    assert reg.head_projection(v) == reg.vector(spec("+FIN"))


# -- specificity --------------------------------------------------------------

SPECIFIC = parse_grammar("""
pattern p1: leave:V:1 house:NP:2 -> VP:1 || VP:1 <- V:1 NP:2
pattern p2: leave:V:1 NP:2 -> VP:1 || VP:1 <- V:1 NP:2
pattern p3: V:1 NP:2 -> VP:1 || VP:1 <- V:1 NP:2
pattern p4: V:1 house:NP:2 -> VP:1 || VP:1 <- V:1 NP:2
pattern p5: take:V:1 a walk -> VP:1 || VP:1 <- V:1
pattern p6: take:V:1 NP:2 -> VP:1 || VP:1 <- V:1 NP:2
""")


def test_more_specific_examples():
    g = SPECIFIC
    assert more_specific(g["p1"], g["p2"]) is Specificity.MORE
    assert more_specific(g["p2"], g["p1"]) is Specificity.LESS
    assert more_specific(g["p1"], g["p1"]) is Specificity.EQUAL
    assert more_specific(g["p2"], g["p4"]) is Specificity.INCOMPARABLE
    assert more_specific(g["p2"], g["p5"]) is Specificity.INCOMPARABLE


def test_more_specific_is_strict_partial_order():
    ps = [SPECIFIC[f"p{i}"] for i in range(1, 5)]
    rel = {(p.id, q.id) for p in ps for q in ps if more_specific(p, q) is Specificity.MORE}
    assert all((x, x) not in rel for x in ("p1", "p2", "p3", "p4"))
    assert all((b, a) not in rel for a, b in rel)
    for a, b in rel:
        for c, d in rel:
            if b == c:
                assert (a, d) in rel
    assert ("p1", "p3") in rel


def test_static_priority(figure1):
    assert static_priority(figure1["c"]) == (1, 1)
    assert static_priority(figure1["b"]) == (0, 0)
    assert static_priority(figure1["f"]) == (0, 1)


# -- validation ---------------------------------------------------------------

def test_figure1_valid(figure1):
    assert validate(figure1) == []


def test_cycle_detected():
    g = parse_grammar("""
pattern u: S:1 -> X:1 || X:1 <- S:1
pattern v: X:1 -> S:1 || S:1 <- X:1
lex w: a -> S || S <- b
""")
    diags = validate(g)
    assert [d.check for d in diags] == ["cycle"]
    assert "u" in diags[0].message and "v" in diags[0].message


def test_unary_cycle_with_target_terminal_still_rejected():
    g = parse_grammar("""
pattern u: A:1 -> B:1 || B:1 <- x A:1
pattern v: B:1 -> A:1 || A:1 <- B:1 y
lex w: a -> A || A <- a
pattern s: A:1 -> S:1 || S:1 <- A:1
""")
    assert any(d.check == "cycle" for d in validate(g))


def test_acyclic_unary_chain_accepted():
    g = parse_grammar("""
pattern u: A:1 -> B:1 || B:1 <- A:1
pattern v: B:1 -> S:1 || S:1 <- B:1
lex w: a -> A || A <- a
""")
    assert validate(g) == []
    edges = unary_chain_edges(g)
    assert len(edges) == 2


@pytest.mark.parametrize("text, check", [
    ("pattern p: NP:1 V:2 -> S:2 || S:2 <- NP:1 V:3\nlex q: a -> S || S <- a", "link-bijection"),
    ("pattern p: NP:1 V:2 -> S:4 || S:2 <- NP:1 V:2\nlex q: a -> S || S <- a", "lhs-link"),
    ("pattern p: NP:1:+FOO V:2 -> S:2 || S:2 <- NP:1 V:2\nlex q: a -> S || S <- a", "features"),
    ("feature F\naggregate A/B:\n  +F | +F\npattern p: NP:1:*A V:2 -> S:2 || S:2 <- NP:1:*A V:2:*B\n"
     "lex q: a -> S || S <- a", "aggregate"),
    ("start Q\nlex q: a -> S || S <- a", "start"),
])
def test_validation_checks(text, check):
    diags = validate(parse_grammar(text))
    assert check in {d.check for d in diags}, diags


def test_empty_rhs_diagnostic():
    from patmt.grammar import Element, Grammar, Pattern, Skeleton
    p = Pattern("e", Skeleton(Element("S"), ()), Skeleton(Element("S"), (Element("x", True),)))
    assert "empty-rhs" in {d.check for d in validate(Grammar(patterns=(p,)))}


def test_validate_deterministic(figure1):
    g = parse_grammar("""
pattern u: S:1 -> X:1 || X:1 <- S:1
pattern v: X:1 -> S:1 || S:1 <- X:1
pattern w: NP:1 -> S:1 || S:1 <- NP:2
""")
    assert validate(g) == validate(g)


def test_validated_grammars_have_bounded_unary_chains():
    from patmt.equivalence import random_grammar
    for seed in range(30):
        g = random_grammar(seed)
        edges = unary_chain_edges(g)
        nodes = {a for a, _, _ in edges} | {b for _, b, _ in edges}
        succ = {}
        for a, b, _ in edges:
            succ.setdefault(a, set()).add(b)

        def longest(n, seen):
            return max([1 + longest(m, seen | {m}) for m in succ.get(n, ()) if m not in seen] + [0])

        for n in nodes:
            # with no cycles no walk can revisit a node
            assert longest(n, {n}) <= len(nodes)
            stack = [(n, 0)]
            while stack:
                cur, depth = stack.pop()
                assert depth <= len(nodes)
                stack.extend((m, depth + 1) for m in succ.get(cur, ()))
