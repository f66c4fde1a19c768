"""Walk through tagged sums and both Stieltjes integrals.

The script builds a vector curve x(t) = (t, t^2) and a scalar ramp g(t) = t,
shows how the two tagged sums approach their limits, then integrates a step
function and demonstrates the one genuinely fatal input: a common jump.
"""

import numpy as np

from stieltjes import (ExistenceError, PiecewiseFunction, exact_step_integral,
                       integrate_g_dx, integrate_x_dg, rs_sum_S,
                       uniform_tagged_partition)

curve = PiecewiseFunction(np.array([0.0, 1.0]),
                          np.array([[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]]))
ramp = PiecewiseFunction.from_global_polynomial([0.0, 1.0], (0.0, 1.0))

print("tagged sums S_d(x, g) for x = (t, t^2), g = t:")
for n in (2, 8, 32, 128):
    part = uniform_tagged_partition(0.0, 1.0, n)
    print(f"  n = {n:4d}  S_d = {rs_sum_S(curve, ramp, part)}")
print("  limit       (0.5, 1/3) =", np.array([0.5, 1.0 / 3.0]))

print()
res = integrate_x_dg(curve, ramp)
print("integrate_x_dg drives the refinement for us:")
print(f"  value {res.value}, {res.levels} levels, converged={res.converged}")
for rec in res.trace[:4]:
    print(f"  level {rec.level}: mesh {rec.mesh:.4f}, "
          f"estimate {rec.estimates.max():.2e}")

print()
step = PiecewiseFunction.step((0.0, 1.0), [0.5], [[1.0, -2.0]], [0.0, 0.0])
res = integrate_g_dx(ramp, step)
print("integral of t against a single jump (1, -2) at t = 0.5:")
print(f"  driver: {res.value}")
print(f"  oracle: {exact_step_integral(ramp, step)}")

print()
print("a common discontinuity kills the limit itself, not the algorithm:")
jumpy = PiecewiseFunction.step((0.0, 1.0), [0.5], [1.0], 0.0)
try:
    integrate_g_dx(jumpy, step)
except ExistenceError as err:
    print(f"  ExistenceError: {err}")
