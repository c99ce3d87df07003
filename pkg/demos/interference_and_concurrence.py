"""From correlations to visibility, suppression, and concurrence.

The swapped two-memory state is verified by interfering the two retrieved
fields.  Three numbers summarize the verification: the fringe visibility V,
the two-photon suppression h, and the concurrence estimate built from both.
This script evaluates all three from the closed-form model and then sweeps
the storage time until the concurrence changes sign.
"""

import math
import warnings

import numpy as np

from dlcz_swap import analytic
from dlcz_swap.analytic import ClampedVisibilityWarning
from dlcz_swap.params import experiment_defaults, with_overrides

params = experiment_defaults()
corr = analytic.correlation_pair(params)

print(f"correlations at the default readout times "
      f"(t1={params.t1_us:.0f}us, t2={params.t2_us:.0f}us)")
print(f"  g_b  = {corr.g_b:.3f}")
print(f"  g_ac = {corr.g_ac:.3f}")
print()

v_exact = analytic.visibility(corr, form="exact")
v_approx = analytic.visibility(corr, form="approx")
h = analytic.suppression(corr)
print("verification quality")
print(f"  visibility (exact form)  V = {v_exact:.4f}")
print(f"  visibility (approx form) V = {v_approx:.4f}")
print(f"  suppression parameter    h = {h:.4f}   (sqrt(h) = {math.sqrt(h):.4f})")
print(f"  entangled iff V > sqrt(h): margin = {v_approx - math.sqrt(h):+.4f}")
print()

# the interference fringe itself: coincidence probability vs detection phase
print("coincidence fringe (closed form)")
for theta in np.linspace(0.0, math.pi, 5):
    p = analytic.coincidence_probability(theta, params)
    bar = "#" * int(round(40 * p / analytic.coincidence_probability(0.0, params)))
    print(f"  theta = {theta:5.2f}  P = {p:.5f}  {bar}")
print()

# --- sweep the storage time until the concurrence changes sign ------------
# Both readouts march forward together, 2us apart.  The concurrence
# estimator is p_c * (V - sqrt(h)); its sign flips where V = sqrt(h),
# independent of the p_c normalization.


def margin(t2):
    p = with_overrides(params, t1_us=t2 - 2.0, t2_us=t2)
    c = analytic.correlation_pair(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClampedVisibilityWarning)
        v = analytic.visibility(c, form="approx", clamp=False)
    return v - math.sqrt(analytic.suppression(c))


print("concurrence sign vs verification readout time (2us readout spacing)")
print(f"  {'t2 [us]':>8} {'V - sqrt(h)':>12} {'mean g':>8}")
for t2 in range(2, 72, 10):
    p = with_overrides(params, t1_us=t2 - 2.0, t2_us=t2)
    c = analytic.correlation_pair(p)
    print(f"  {t2:8d} {margin(float(t2)):12.4f} {(c.g_b + c.g_ac) / 2:8.2f}")

from scipy.optimize import brentq

t2_star = brentq(margin, 2.0, 120.0)
p_star = with_overrides(params, t1_us=t2_star - 2.0, t2_us=t2_star)
c_star = analytic.correlation_pair(p_star)
print(f"\nzero crossing at t2 = {t2_star:.2f} us, "
      f"where the mean correlation is {(c_star.g_b + c_star.g_ac) / 2:.2f}")
