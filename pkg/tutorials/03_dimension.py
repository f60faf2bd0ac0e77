"""Dimension of weighted approximable points on a p-adic hyperplane.

Free coordinates carry weights tau_d, the frozen ones tau_m.  Two
independent routes give the same exact number; a finite cover estimate
gets close to it numerically.
"""

from padicount import WeightSplit, cover_critical_exponent, theorem2_dimension, v_vector
from padicount.dimension import dimension_via_transference, equal_weight_dimension
from padicount.padic import random_padic_vector

split = WeightSplit(("2", "6/5"), ("7/5",))
print("valid split?", split.valid, split.flags)

v, t = v_vector(split.tau_d_sorted, split.budget)
print("shrunken weights v =", [str(a) for a in v], " leftover t =", [str(a) for a in t])
print("closed form:      ", theorem2_dimension(split))
print("transference path:", dimension_via_transference(split))

print("equal weights, n=2, m=1, tau=1.6:", equal_weight_dimension(2, 1, "1.6"))

# Empirical exponent from finite covers; slower, so only a few seeds.
small = WeightSplit(("5/2",), ("3/2",))
print()
print("target", theorem2_dimension(small))
for seed in range(3):
    est = cover_critical_exponent(random_padic_vector(2, 96, 1, seed), small, 12)
    print(f"  seed {seed}: estimate {est.s:.3f}")
