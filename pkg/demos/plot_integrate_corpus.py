"""
Growing a grammar from sentence pairs
=====================================

Fold a small bilingual corpus into the extended sample grammar.  Pairs the
grammar already handles are left alone, near misses are fixed by copying
patterns with their heads filled in, and the rest are memorized whole.
"""

from patmt import (
    TranslationFailure,
    fixture_path,
    integrate_corpus,
    load_fixture,
    read_corpus,
    translate,
)
from patmt.dsl import serialize_grammar

g = load_fixture("tutorial")
pairs = read_corpus(fixture_path("corpus.tsv"))

for p in pairs:
    try:
        got = translate(list(p.source), g)[0].text
    except TranslationFailure as exc:
        got = f"<{exc.kind}>"
    print(f"{' '.join(p.source):24s} -> {got}")

g2, report = integrate_corpus(g, pairs)
print(report.render())

# the new patterns, as they would be written to a grammar file
old = {p.id for p in g.patterns}
for line in serialize_grammar(g2).splitlines():
    parts = line.split()
    if len(parts) > 1 and parts[0] in ("pattern", "lex") and parts[1] not in old:
        print(line)

# a second pass changes nothing
_, again = integrate_corpus(g2, pairs)
print(again.counts)
