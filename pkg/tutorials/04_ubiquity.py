"""Local ubiquity: resonant points fill a fixed share of every ball.

Stage k looks at denominators q0 in (M**k, M**(k+1)] that approximate alpha
well, draws a small ball around each rational point (q1/q0), and measures
the union exactly.
"""

from padicount import Ball, WeightSplit, random_padic_vector, resonant_denominators, ubiquity_density_check
from padicount.ubiquity import density_constant

split = WeightSplit(("5/2",), ("7/5",))
M = 13
print(f"guaranteed share c = {float(density_constant(split, M)):.4f}")

alpha = random_padic_vector(2, 48, 1, seed=11)
fam = resonant_denominators(alpha, split.tau_m, (M, M**2))
print(f"{len(fam.members)} resonant denominators in ({M}, {M**2}], e.g. {fam.members[:8]}")

for k in (1, 2):
    rep = ubiquity_density_check(alpha, split, M, k)
    print(f"k={k}: {rep.balls} balls cover {float(rep.density):.4f} of Z_2  (>= c: {rep.passed})")

# The same question inside a small ball.
local = ubiquity_density_check(alpha, split, M, 2, Ball(2, (2,), (1,)))
print(f"inside 1 + 4Z_2: {float(local.density):.4f}  (>= c: {local.passed})")
