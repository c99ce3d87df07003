"""Memory decay and readout correlation quality.

Walks the first layer of the model: the retrieval efficiency of a stored
spin wave as a function of storage time, and the signal-to-noise
cross-correlation g of each readout stage that follows from it.  Ends by
asking when g drops below the entanglement thresholds.
"""

import numpy as np

from dlcz_swap import analytic
from dlcz_swap.params import experiment_defaults

params = experiment_defaults()

# --- retrieval efficiency -------------------------------------------------
# gamma(t) = gamma0 * exp(-t / tau0): a single exponential fixed by the
# zero-time efficiency and the 1/e memory time.

print("retrieval efficiency")
print(f"  gamma(0)      = {analytic.retrieval_efficiency(0.0, params):.4f}")
print(f"  gamma(tau0)   = {analytic.retrieval_efficiency(params.tau0_us, params):.4f}"
      f"   (= gamma0/e)")
print(f"  gamma(2*tau0) = {analytic.retrieval_efficiency(2 * params.tau0_us, params):.4f}")
print()

# --- cross-correlation of one readout ------------------------------------
# g = 1 + gamma / (chi*gamma + z + chi*(1-gamma)*xi_se*f_cav).  The swap
# stage reads at t1 against background z_b; the verification stage reads at
# t2 against the larger background z_ac.  Detection efficiency cancels.

print("cross-correlation vs storage time (both readout stages)")
print(f"  {'t [us]':>8} {'g swap-stage':>14} {'g verify-stage':>15}")
for t in (0.0, 25.0, 50.0, 100.0, 200.0, 400.0):
    gb = analytic.cross_correlation(t, params.z_b, params)
    gac = analytic.cross_correlation(t, params.z_ac, params)
    print(f"  {t:8.0f} {gb:14.3f} {gac:15.3f}")
print()

# --- entanglement thresholds ----------------------------------------------
# The approximate visibility form puts the V = sqrt(h) break-even point at
# g = 16 + 8*sqrt(3); the exact form moves it down by about 2.6.

g_th_approx = analytic.threshold_g(form="approx")
g_th_exact = analytic.threshold_g(form="exact")
print("break-even correlation (equal g at both stages)")
print(f"  approximate visibility form : g = {g_th_approx:.4f}")
print(f"  exact visibility form       : g = {g_th_exact:.4f}")

# invert the decay to find when the verify-stage correlation hits threshold
ts = np.linspace(0.0, 400.0, 4001)
gac = np.array([analytic.cross_correlation(t, params.z_ac, params) for t in ts])
t_cross = ts[int(np.argmax(gac < g_th_approx))]
print(f"  verify-stage g falls below {g_th_approx:.2f} near t = {t_cross:.1f} us")
