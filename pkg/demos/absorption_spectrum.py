"""
Double Fano profile of the cooling beam
=======================================

Scan the cooling-beam detuning with the motion switched off and record
the steady-state excited population. Two transparency points appear,
one trap frequency apart, with a narrow absorption peak between them.
"""
import numpy as np

from darkcool import absorption_spectrum, locate_features
from darkcool.spectra import fig2_grid, fig2_params

p = fig2_params()
print(f"gamma = {p.gamma:.4f}, omega_g = {p.omega_g:.4f}, omega_r = {p.omega_r:.4f}")
print(f"delta_g = {p.delta_g:.4f}, delta_r = {p.delta_r:.4f}")

s = absorption_spectrum(p, fig2_grid(p, half_width=2.0, points=401))
zeros, (x_peak, y_peak) = locate_features(s)
print("transparency points:", ", ".join(f"{z:.5f}" for z in zeros))
print(f"separation: {zeros[1] - zeros[0]:.5f} (nu = {p.nu})")
print(f"peak: {y_peak:.4g} at {x_peak:.5f}")

# text plot around the features, linear scale
window = (s.detunings > zeros[0] - 0.3) & (s.detunings < zeros[1] + 0.3)
x, y = s.detunings[window], s.absorption[window] / y_peak
for xi, yi in zip(x[::2], y[::2]):
    print(f"{xi:8.3f} {'#' * int(60 * yi)}")
