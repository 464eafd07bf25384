"""
Languages of a pattern grammar
==============================

Compare what the grammar accepts with three plain CFGs: the skeleton
grammar G (upper bound), the unconstrained grammar H (lower bound) and the
head-annotated grammar G_T, which accepts exactly the same strings.
"""

from patmt import (
    check_bounds,
    check_equivalence,
    enumerate_accepted,
    head_annotated_cfg,
    load_fixture,
    skeleton_cfg,
)
from patmt.dsl import format_pattern

g = load_fixture("mutant")

# pattern z asks for a head no lexicon entry provides
print(format_pattern(g["z"]))

bounds = check_bounds(g, 5)
print(bounds.render())

eq = check_equivalence(g, 5)
print(eq.render())

gt = head_annotated_cfg(g.erase_features())
print(f"G has {len(skeleton_cfg(g).rules)} rules, G_T has {len(gt.rules)}")
for s in sorted(enumerate_accepted(g, 4)):
    print(" ".join(s))
