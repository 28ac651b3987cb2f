"""How much does one node exchange per iteration?

Counts are complex elements received plus sent by one worker node. The
example dimensions are 2160 measurements and 22500 pixels, so the pixel to
measurement ratio is R = 10.42.
"""

from fractions import Fraction

from splitadmm import efficiency_report, per_node_elements
from splitadmm.comm import format_percent, reduction_vs_consensus

n_p, n_m = 22500, 2160
print(f"R = {float(Fraction(n_p, n_m)):.4f}\n")

for method, m, n in (('consensus', 4, 1), ('sectioning', 1, 3),
                     ('hybrid', 4, 3)):
    count = per_node_elements(method, n_p, n_m, m, n)
    red = format_percent(reduction_vs_consensus(method, n_p, n_m, m, n))
    print(f"{method:<11} M={m} N={n}: {count:>6,} elements  ({red} saved)")

# Columns win while N N_m < 2 N_p, i.e. N < 2R.
print("\nsectioning vs consensus as N grows (M irrelevant):")
for n in (2, 5, 10, 20, 25, 30):
    s = n * n_m
    print(f"  N={n:>2}: {s:>6,} vs {2 * n_p:,} -> "
          f"{'sectioning' if s < 2 * n_p else 'consensus'} wins")

# The grid's count N N_m/M + 2 N_p/N first falls then rises in N.
print("\nhybrid count for M=4 over the divisors N of 22500:")
for n in (2, 3, 4, 5, 6, 9, 10, 12, 15, 18, 20, 25):
    print(f"  N={n:>2}: {per_node_elements('hybrid', n_p, n_m, 4, n):>7,}")

# The stated grid-vs-column inequality points the other way from the
# counts. efficiency_report evaluates both and flags the disagreement.
rep = efficiency_report(n_p, n_m, 4, 3)
for c in rep.comparisons:
    print(f"{c.first:>10} < {c.second:<10} counts: {c.by_count!s:<5} "
          f"inequality: {c.by_frontier!s:<5}"
          f"{'' if c.agree else '  <-- disagree'}")
