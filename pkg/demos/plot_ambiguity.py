"""
Exponential ambiguity, lazily
=============================

Two patterns with the same source skeleton, one keeping and one swapping
the order of A and B, give 2^n derivations for a^n b.  The packed chart
stays small and k-best enumeration only touches what it returns.
"""

import time

from patmt import count_derivations, load_fixture, parse, translate

g = load_fixture("ambiguity")

for n in (2, 4, 8, 12):
    toks = ["a"] * n + ["b"]
    chart = parse(toks, g)
    t0 = time.perf_counter()
    best = translate(toks, g, m=3)
    dt = time.perf_counter() - t0
    print(f"n={n:2d} chart items={len(chart.inactive_keys()):3d} "
          f"derivations={count_derivations(toks, g):5d} best 3 in {dt * 1000:.1f} ms")

# only n+1 distinct target strings exist: the b can end up anywhere
print([t.text for t in translate(["a"] * 4 + ["b"], g, m=None)])
