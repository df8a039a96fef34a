"""Oscillations of the mirror and the condensate from rest.

Both oscillators start at the origin with the pump on.  The transverse drive
adds eta_eff^2 Q^2 to the photon-number numerator, which can only strengthen
the radiation pressure; the amplitudes below show how small that effect is at
these parameters compared with eta^2.
"""

import time

from becbistab import MechState, integrate_adiabatic, preset
from becbistab.dynamics import max_amplitudes
from becbistab.params import FIG5_DELTA, FIG5_ETA

p = preset("paper-2015").replace(eta=FIG5_ETA, delta=FIG5_DELTA)
print(f"eta/kappa = {p.eta / p.kappa:.1f}, Delta/kappa = {p.delta / p.kappa:.1f}, omega_m t in [0, 100]")

for drive in (0.0, 0.8, 1.8):
    t0 = time.perf_counter()
    tr = integrate_adiabatic(MechState(), p.with_ratios(eta_eff=drive), 100.0)
    q_max, Q_max = max_amplitudes(tr)
    print(f"eta_eff/kappa = {drive}: max|q| = {q_max!r}, max|Q| = {Q_max!r} "
          f"({len(tr.times)} samples, {time.perf_counter() - t0:.2f} s)")

# the adaptive integrator reproduces the fixed-step run
tr = integrate_adiabatic(MechState(), p, 100.0, method="rk45-adaptive")
print(f"\nrk45-adaptive: max|q| = {max_amplitudes(tr)[0]!r}, steps {tr.stats}")
