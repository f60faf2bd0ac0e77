"""The same approximations, seen as points of a lattice.

Every solution (q0, q1) lies in the lattice of integer vectors with
q1 = q0 * X (mod 2**t).  Its short vectors are the good approximations.
"""

from fractions import Fraction

from padicount import ApproxProfile, build_lattice, check_lambda1_bounds, from_rational, successive_minima, verify_geometry
from padicount.padic import random_padic_vector

N = 2**12
profile = ApproxProfile.power((Fraction(3, 2),))

lat = build_lattice(random_padic_vector(2, 96, 1, seed=3), profile, N)
print("threshold t =", lat.t, " determinant =", lat.det)
print("basis rows:", lat.basis)

minima = successive_minima(lat)
print("successive minima:", [round(v, 3) for v in minima.lambdas])
print("shortest vector:", minima.witnesses[0])

# Minkowski, Blichfeldt and Henk checked exactly at a few radii.
for r2 in (minima.lambdas_sq[0], 4 * minima.lambdas_sq[0], N * N):  # the last radius is sqrt(n) * N with n = 1
    rep = verify_geometry(lat, radius_sq=r2, minima=minima)
    print(f"  R^2 = {r2:>8}: {rep.count:>5} points, all inequalities hold: {rep.ok}")

# For a rational x the lattice keeps a short vector forever: (3, 1) for x = 1/3.
third = build_lattice((from_rational(1, 3, 2, 96),), profile, N)
rep = check_lambda1_bounds(third, profile, N)
print()
print(f"x = 1/3: lambda_1 = {rep.lambda1:.3f}, lower bound {rep.lower_bound:.3f} holds? {rep.lower_ok}")
