"""A sign-changing, nonradial solution in four dimensions.

The symmetry class splits x = (x1, x2) with x1, x2 in R^2 and asks for
u(x2, x1) = -u(x1, x2).  Such fields cannot be radial.  The start is a
tent: a plateau at height 1.5 zeta1 in |x1| minus the same plateau in |x2|,
with the smallest radius on the lattice that makes the potential positive.
"""
from fracsfe import (FracParams, Grid, NonlinearitySpec, SolverConfig, SymmetryClass, choose_tent_radius,
                     find_zeta1, potential, solve_ground_state)

grid = Grid(dim=4, side=16.0, pts=32)
fp = FracParams(s=0.5, a=1.0)
spec = NonlinearitySpec(((-1.0, 1.0), (2.5, 1.5)), "positive")
sc = SymmetryClass.parse("block1:2")

zeta1 = find_zeta1(spec, fp)
R, R_cut, tent = choose_tent_radius(grid, sc, 1.5 * zeta1, lambda u: potential(u, spec) - 0.5 * u.l2_norm_sq())
print(f"zeta1 = {zeta1:.4f}, tent radius {R:.3f}, cutoff {R_cut:.3f}")

rep = solve_ground_state(tent, spec, fp, sc, SolverConfig())
print(f"converged: {rep.converged} after {rep.iterations} steps")
print(f"energy {rep.energy.total:.8f}, Pohozaev {rep.pohozaev:.2e}")
print(f"radial defect {rep.defects[0]:.3f}, antisymmetry defect {rep.defects[1]:.1e}")
