"""
Translating "He knows me well"
==============================

Load the sample English-French grammar, translate one sentence and print
the three-phase trace.
"""

from patmt import load_fixture, render_trace, translate

g = load_fixture("figure1")
print(f"{len(g.patterns)} patterns, {len(g.registry)} features")

# the four best distinct translations, cheapest first
results = translate("He knows me well", g, m=4)
for rank, t in enumerate(results, 1):
    print(rank, t.cost, t.text, t.derivation)

# (d) fails on the pronoun object, (c) is preferred over (b),
# and the lexicon entry for "sait" is pruned under connaitre:VP
best = results[0]
print(render_trace(results.source, best.trace, best.tokens))
