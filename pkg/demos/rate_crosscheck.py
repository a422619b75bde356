"""
Three routes to the cooling rate
================================

1. the closed form built on the printed cubic f(x)
2. the Delta_g-dependent formula and its maximum W_max
3. second-order perturbation theory with an explicit resolvent

Routes 2 and 3 agree everywhere we looked. Route 1 only agrees with
them where its zeros are pinned by symmetry (the blue sideband).
"""
import numpy as np

from darkcool import rates
from darkcool.model import IonParams

p = IonParams()
rep = rates.printed_cubic_discrepancy(p)
print(f"A- printed cubic : {rep.printed_a_minus:.5e}")
print(f"A- resolvent     : {rep.resolvent_a_minus:.5e}")
print(f"A- Delta_g form  : {rep.magic_a_minus:.5e}")
print(f"mismatch {rep.relative_mismatch:.1%}, optimum chain residual {rep.chain_residual:.1e}")

print("\ndelta_g     resolvent W    Delta_g form")
for dg in np.linspace(20, 140, 7):
    q = p.with_(delta_g=dg)
    print(f"{dg:7.1f}   {rates.rates_resolvent(q).w:.4e}   {rates.a_minus_magic(q):.4e}")

opt = rates.optimal_delta_g(p)
print(f"\noptimal delta_g = {opt}, W_max = {rates.w_max(p):.5e}")
print("blue sideband (resolvent):", rates.gamma_resolvent(p)[1])
