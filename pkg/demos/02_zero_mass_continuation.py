"""Zero mass: (-Delta)^0.5 u = -u + |u| u, reached through the eps-modified problems.

Near zero the negative branch f_-(t) = t - t^2 is clamped by t^{q*} / eps,
which makes the modified problem subcritical-at-zero.  Each stage warm
starts from the previous one; the last stage is the unmodified problem.
The converged energies increase as eps shrinks.
"""
import numpy as np

from fracsfe import (RADIAL, Field, FracParams, Grid, NonlinearitySpec, SolverConfig, ds_seminorm_sq,
                     solve_with_continuation)

grid = Grid(dim=2, side=40.0, pts=128)
fp = FracParams(s=0.5)
spec = NonlinearitySpec(((-1.0, 1.0), (1.0, 2.0)), "zero")

init = Field(grid, 3.0 * np.exp(-grid.radius() ** 2 / 4.0))
reports = solve_with_continuation(init, spec, fp, RADIAL, SolverConfig())

print(" eps       energy          iterations  side")
for rep in reports:
    eps = "none" if rep.eps is None else f"{rep.eps:<5g}"
    print(f" {eps:8s}  {rep.energy.total:.10f}  {rep.iterations:10d}  {rep.u.grid.side:.3f}")

# with P = 0 the zero-mass energy equals (s/N) |u|^2_{D^s}
last = reports[-1]
ident = fp.s / grid.dim * ds_seminorm_sq(last.u, fp.s)
print(f"energy identity defect: {abs(last.energy.total - ident):.2e}")
