"""How many rationals approximate a random 2-adic number well?

We pick a random x in Z_2, fix the weight tau = 3/2, and count the integer
pairs (q0, q1) with 0 < q0 <= N, |q1| <= N and |q0*x - q1|_2 < N**-tau.
The count should grow like N**(2 - tau) = N**0.5.
"""

from fractions import Fraction

from padicount import ApproxProfile, count_brute, count_fast, evaluate_bounds, random_padic_vector

x = random_padic_vector(2, 64, 1, seed=7)
profile = ApproxProfile.power((Fraction(3, 2),))

print("first digits of x:", x[0].digits[:16])
print()
print(f"{'N':>6} {'count':>6} {'brute':>6} {'count/N^0.5':>12}")
for k in range(6, 15, 2):
    N = 2**k
    fast = count_fast(x, profile, N).count
    # the exhaustive scan is only affordable for small N
    brute = count_brute(x, profile, N).count if k <= 10 else None
    print(f"{N:>6} {fast:>6} {brute if brute is not None else '-':>6} {fast / N**0.5:>12.3f}")

# Proven lower and upper envelopes, evaluated at one N.
report = evaluate_bounds(x, profile, 2**12)
print()
print("at N = 4096:")
print("  lower bound from the pigeonhole argument:", round(report.lemma2_lower_proof, 3), report.status("lemma2_proof"))
print("  upper bound C1 * N^2 * psi(N):         ", round(report.theorem1_upper, 3), report.status("theorem1"))
