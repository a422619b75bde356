"""
Cooling dynamics from a weakly populated motional state
=======================================================

Integrate the master equation at the default operating point and fit
n(t) = (n0 - nss) exp(-W t) + nss. Compare W with the resolvent rate
and with the closed-form maximum, and nss with the analytic estimate.
"""
from darkcool.harness import run_cooling_dynamics
from darkcool.harness.scenarios import get_scenario

s = get_scenario("fig3")
print(s.params)
res = run_cooling_dynamics(s)
print("status:", res.status)

traj = res.trajectory
for i in range(0, traj.times.size, 30):
    print(f"t = {traj.times[i]:9.1f}   <n> = {traj.nbar[i]:.4e}   tail = {traj.truncation_tail[i]:.1e}")

for k, v in res.comparison.items():
    print(f"{k:>22s}: {v:.5g}")

# physical units: 2 gamma = 2 pi x 19.7 MHz fixes nu
from darkcool.rates import nu_from_linewidth, offres_scatter_estimate, w_max

nu_hz = nu_from_linewidth(19.7e6, s.params)
print(f"nu = {nu_hz / 1e6:.3f} MHz, W_max = {w_max(s.params) * nu_hz / 1e3:.3f} kHz")
print(f"off-resonant scattering ~ {offres_scatter_estimate(s.params.omega_g * nu_hz, 2.1e9, 19.7e6) / 1e3:.3f} kHz")
