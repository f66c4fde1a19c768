"""From integrator to operator to measure and back.

A right-continuous integrator x of bounded increment sums defines the
operator T g = integral(g dx) on continuous functions.  Its unit-ball image
lands inside the absolutely convex hull of the increment-sum set, and the
cumulative y(t) = x(t) - x(a) recovers x from T.  This script walks the
whole loop on a single-jump integrator.
"""

import numpy as np

from stieltjes import (PiecewiseFunction, Seminorm, SpaceModel,
                       StieltjesOperator, decompose, e_set, hull_membership,
                       measure_from_function, measure_of_interval, roundtrip,
                       weakly_compact_image_check)

space = SpaceModel(2, "real", (Seminorm.weighted_sup([1.0, 1.0]),))
x = PiecewiseFunction.step((0.0, 1.0), [0.5], [[1.0, -2.0]], [0.0, 0.0])
T = StieltjesOperator(space, x)
print(f"operator built; increment-sum sups per seminorm: {T.wcs_bounds}")

ramp = PiecewiseFunction.from_global_polynomial([0.0, 1.0], (0.0, 1.0))
print(f"T applied to g(t) = t: {T.apply(ramp)}")

print()
g0, g1, g2, g3 = decompose(ramp - PiecewiseFunction.constant(0.25,
                                                             (0.0, 1.0)))
print("decomposing g(t) = t - 1/4 into [0,1]-valued parts:")
print(f"  positive part vanishes below t = 0.25: g0(0.1) = {g0(0.1)}, "
      f"g0(0.75) = {g0(0.75)}")

gens = e_set(x)
for part, name in ((g0, "g0"), (g2, "g2")):
    image = T.apply(part, tol=1e-10)
    res = hull_membership(image, gens, tol=1e-9)
    print(f"  T{name} = {image} -> hull member: {res.member} "
          f"(distance {res.distance:.1e})")

print()
report = weakly_compact_image_check(T, sample_count=10, seed=0)
print(f"unit-ball image check over 10 random functions: ok={report.ok}, "
      f"{report.checked} memberships, worst {report.worst_distance:.1e}")

print()
m = measure_from_function(x)
print("interval measure from the cumulative y(t) = x(t) - x(a):")
print(f"  m((0.4, 0.6]) = {measure_of_interval(m, 0.4, 0.6)}")
print(f"  m((0.6, 1.0]) = {measure_of_interval(m, 0.6, 1.0)}")

rep = roundtrip(x, probe_count=50, dual_count=10, function_count=10, seed=0)
print(f"roundtrip x -> T -> m -> y: identity gap {rep.identity_gap:.1e}, "
      f"pairing gap {rep.pairing_gap:.1e}")
