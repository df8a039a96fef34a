"""The effective potential over (q, Q) and its critical points.

At a bistable pump value the potential has two minima, one per outer steady
branch, separated by a saddle at the middle branch.  The critical points are
found from the force field alone and then compared with the steady states.
"""

from becbistab import find_critical_points, potential_grid, preset, steady_state_at

p = preset("paper-2015")
for drive in (0.0, 0.8, 1.6):
    params = p.with_ratios(eta=10.0, eta_eff=drive)
    grid = potential_grid(params, resolution=81)
    points = find_critical_points(grid, params)
    branches = steady_state_at(params)
    print(f"eta_eff/kappa = {drive}")
    for c, b in zip(points, branches):
        print(f"  {c.kind.value:8s} q = {c.q:.6e}  Q = {c.Q:.6f}  V = {c.V:.6e}"
              f"   steady branch q_s = {b.q_s:.6e}, Q_s = {b.Q_s:.6f} ({b.stability.value})")
    barrier = points[1].V - points[0].V
    print(f"  barrier from the lower well: {barrier:.4e}\n")
