"""
Dark states of the microwave-dressed four-level ion
===================================================

The two lasers and the microwave leave one combination of |g>, |d>, |r>
that never reaches |e>. This script builds the dressed basis and checks
that claim directly on the atomic Hamiltonian.
"""
import numpy as np

from darkcool import IonParams, dressed_frame, magic_condition
from darkcool.model import build_h_at

p = IonParams()
frame = dressed_frame(p)
print(magic_condition(p))

# the dark state is an eigenvector of H_at with eigenvalue -delta_gr
h = build_h_at(p)
d = frame.state_d
print("|H_at D + delta_gr D| =", np.linalg.norm(h @ d + p.delta_gr * d))
print("<e|H_at|D> =", abs(h[3] @ d))

# the dressed basis is unitary
u = frame.basis()
print("unitarity defect:", np.abs(u.conj().T @ u - np.eye(4)).max())

# couplings and Lamb-Dicke factors in the dressed frame
print(f"Omega_B = {frame.omega_big_b:.4f}, Omega_+ = {frame.omega_plus:.4f}, Omega_D = {frame.omega_d:.4f}")
print(f"eta_B = {frame.eta_b:.4f}, eta_D = {frame.eta_d:.4f}")
print(f"Delta_- = {frame.delta_minus:.2f}, Delta_+ = {frame.delta_plus:.2f}  (Delta_- - Delta_+ = nu)")

# off the microwave resonance the eigenrelation breaks
q = p.with_(omega_mw=-0.4)
hq = build_h_at(q)
dq = dressed_frame(q).state_d
print("detuned microwave, residual:", np.linalg.norm(hq @ dq + q.delta_gr * dq))
