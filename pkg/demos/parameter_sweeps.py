"""
Steady-state phonon number across the operating space
=====================================================

Sweep omega_g and omega_r (re-optimizing delta_g at each point), then
look at robustness against microwave and laser-1 detuning errors.
Set DARKCOOL_WORKERS to control the process pool.
"""
from darkcool.harness import get_scenario, run_robustness, run_sweep

for name in ("fig4", "fig5"):
    res = run_sweep(get_scenario(name))
    print(f"\n{name}: axis {res.axis}")
    print("   value     numeric      analytic     W numeric    W resolvent")
    for r in res.rows:
        print(f"{r.axis_value:8.3f}  {r.nss_numeric:.4e}  {r.nss_analytic:.4e}  "
              f"{r.w_numeric:.4e}  {r.w_resolvent:.4e}  {r.status}")

for name in ("fig6", "fig7"):
    rob = run_robustness(name)
    print(f"\n{name}: max {rob.nss_max:.3e}, spread {rob.spread:.3e}, best at {rob.argmin:.3f}")
