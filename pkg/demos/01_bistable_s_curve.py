"""The S-shaped photon-number curve and its hysteresis loop.

Sweeping the pump eta at zero transverse drive, the self-consistency cubic has
three roots inside a finite window.  A quasi-static sweep up stays on the lower
branch until it ends, a sweep down stays on the upper one: the loop between the
two traces is the optical bistability.
"""

import numpy as np

from becbistab import preset, sweep_1d
from becbistab.steady_state import bistable_window, eta_folds

p = preset("paper-2015")
grid = np.linspace(0.0, 25.0, 251) * p.kappa
res = sweep_1d(p, "eta", grid)

window = bistable_window(p, "eta", grid)
lo, hi = eta_folds(p)
print(f"3-root window: eta/kappa in ({window.lower / p.kappa:.6f}, {window.upper / p.kappa:.6f})")
print(f"closed-form folds agree: ({lo / p.kappa:.6f}, {hi / p.kappa:.6f})")

print("\n eta/kappa   branches   up-trace n    down-trace n")
for i in range(0, 251, 20):
    branches = res.branches[i]
    print(f"{grid[i] / p.kappa:9.2f}   {len(branches):8d}   {res.up_trace[i]:11.6f}   {res.down_trace[i]:12.6f}")

# the two traces differ exactly where three roots coexist
three = res.counts() == 3
print(f"\ntraces differ on {np.count_nonzero(res.up_trace != res.down_trace)} points, "
      f"{np.count_nonzero(three)} of which have three roots")
