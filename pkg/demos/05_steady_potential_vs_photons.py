"""The steady-state potential as a function of photon number.

V_s(n) is integrated from n = 0; the error column is the accumulated
quadrature bound, and tightening the tolerance moves V_s by less than it.
"""

import numpy as np

from becbistab import preset, v_s_of_n

p = preset("paper-2015")
n = np.linspace(0.0, 0.05, 11)
for eta in (5.0, 10.0, 20.0):
    _, vs, err = v_s_of_n(p.with_ratios(eta=eta), n)
    print(f"eta/kappa = {eta}")
    for ni, v, e in zip(n, vs, err):
        print(f"  n = {ni:.3f}  V_s = {v: .6e}  (+/- {e:.1e})")

_, coarse, err = v_s_of_n(p.with_ratios(eta=10.0, eta_eff=0.8), n, 1e-8)
_, fine, _ = v_s_of_n(p.with_ratios(eta=10.0, eta_eff=0.8), n, 5e-9)
print(f"\nhalving quad_tol moves V_s by at most {np.max(np.abs(fine - coarse)):.2e} "
      f"(bound {np.max(err):.2e})")
