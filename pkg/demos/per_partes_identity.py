"""Integration by parts for Stieltjes integrals.

integral(x dg) + integral(g dx) = x(b)g(b) - x(a)g(a) whenever either side
exists.  We evaluate both sides independently and report the defect.
"""

import numpy as np

from stieltjes import PiecewiseFunction, per_partes, random_spline

step = PiecewiseFunction.step((0.0, 1.0), [0.5], [[1.0, -2.0]], [0.0, 0.0])
ramp = PiecewiseFunction.from_global_polynomial([0.0, 1.0], (0.0, 1.0))

rep = per_partes(step, ramp)
print("step integrand x (jump (1,-2) at 0.5) against g(t) = t:")
print(f"  integral(x dg) = {rep.lhs}")
print(f"  integral(g dx) = {rep.rhs}")
print(f"  boundary term  = {rep.boundary}")
print(f"  identity gap   = {rep.max_gap:.2e}")

print()
rng = np.random.default_rng(1)
spline = random_spline((0.0, 1.0), rng)
curve = PiecewiseFunction(np.array([0.0, 1.0]),
                          np.array([[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]]))
rep = per_partes(curve, spline, tol=1e-9)
print("smooth pair: x = (t, t^2) against a random unit spline:")
print(f"  integral(x dg) = {rep.lhs}")
print(f"  integral(g dx) = {rep.rhs}")
print(f"  identity gap   = {rep.max_gap:.2e} "
      f"(converged={rep.converged})")
