"""Four-level ion coupled to one motional mode, expanded to first order in eta.

Internal levels are ordered ``[g, d, r, e]``; |g>-|e> is driven by laser 1,
|r>-|e> by laser 2 (the cooling beam) and |g>-|d> by the microwave. All
frequencies are in units of the trap frequency ``nu``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import core

G, D, R, E = 0, 1, 2, 3
LEVELS = ("g", "d", "r", "e")
N_LEVELS = 4

LD_WARN = 0.3
LD_REJECT = 1.0


class LambDickeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class IonParams:
    """Complete parameter set. Defaults reproduce the cooling-dynamics run.

    ``gamma_*`` are half decay rates into each ground level, so the excited
    state linewidth is ``2 * gamma``. ``eta_decay_*`` default to ``|eta1|``.
    ``recoil_moment`` is the second moment of the emission angular pattern.
    """

    nu: float = 1.0
    omega_g: float = 10.0
    omega_r: float = 1.0
    omega_mw: float = -0.5
    delta_g: float = 74.5
    delta_gr: float = -0.5
    gamma_g: float = 10.0 / 3.0
    gamma_r: float = 10.0 / 3.0
    gamma_d: float = 10.0 / 3.0
    eta1: float = 0.05
    eta2: float = -0.05
    eta_decay_g: float | None = None
    eta_decay_r: float | None = None
    eta_decay_d: float | None = None
    recoil_moment: float = 0.4
    fock_cutoff: int = 8
    nbar0: float = 1.0

    def __post_init__(self):
        for name in ("eta_decay_g", "eta_decay_r", "eta_decay_d"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, abs(self.eta1))
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if min(self.gamma_g, self.gamma_r, self.gamma_d) < 0:
            raise ValueError("decay rates must be non-negative")
        if self.gamma <= 0:
            raise ValueError("total decay rate gamma must be positive")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 2:
            raise ValueError(f"fock_cutoff must be an integer >= 2, got {self.fock_cutoff!r}")
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))
        if not 0.0 <= self.recoil_moment <= 1.0:
            raise ValueError("recoil_moment must lie in [0, 1]")
        if self.nbar0 < 0:
            raise ValueError("nbar0 must be non-negative")
        eta_max = max(abs(self.eta1), abs(self.eta2))
        if eta_max > LD_REJECT:
            raise ValueError(f"|eta| = {eta_max} is far outside the Lamb-Dicke regime")
        if eta_max > LD_WARN:
            warnings.warn(f"|eta| = {eta_max} > {LD_WARN}: first-order expansion is unreliable",
                          LambDickeWarning, stacklevel=3)

    @property
    def gamma(self) -> float:
        return self.gamma_g + self.gamma_r + self.gamma_d

    @property
    def delta_r(self) -> float:
        return self.delta_g - self.delta_gr

    @property
    def fock_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def joint_dim(self) -> int:
        return N_LEVELS * self.fock_dim

    def with_(self, **changes) -> "IonParams":
        return replace(self, **changes)


PARAM_NAMES = tuple(f.name for f in fields(IonParams))


def ket(level: int | str) -> np.ndarray:
    if isinstance(level, str):
        level = LEVELS.index(level)
    v = np.zeros(N_LEVELS, dtype=complex)
    v[level] = 1.0
    return v


def transition(i: int, j: int) -> np.ndarray:
    """Internal operator ``|i><j|``."""
    op = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    op[i, j] = 1.0
    return op


def build_h_at(p: IonParams) -> np.ndarray:
    h = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    h[E, E] = -p.delta_g
    h[R, R] = -p.delta_gr
    h[E, G] = p.omega_g
    h[G, E] = p.omega_g
    h[E, R] = p.omega_r
    h[R, E] = p.omega_r
    h[G, D] = p.omega_mw
    h[D, G] = p.omega_mw
    return h


def position_operator(cutoff: int) -> np.ndarray:
    """``b + b^dag`` on the truncated Fock space."""
    b = core.fock_lowering(cutoff)
    return b + b.conj().T


def build_v(p: IonParams) -> np.ndarray:
    coupling = 1j * p.eta1 * p.omega_g * transition(E, G) + 1j * p.eta2 * p.omega_r * transition(E, R)
    v = core.kron(coupling, position_operator(p.fock_cutoff))
    return v + v.conj().T


def build_h_m(p: IonParams) -> np.ndarray:
    return p.nu * core.number_operator(p.fock_cutoff)


def build_h0(p: IonParams) -> np.ndarray:
    """``H_at x 1 + 1 x H_m``: the Hamiltonian without sideband coupling."""
    return (core.kron(build_h_at(p), core.identity(p.fock_dim))
            + core.kron(core.identity(N_LEVELS), build_h_m(p)))


def build_h_ld(p: IonParams) -> np.ndarray:
    return build_h0(p) + build_v(p)


def joint_number_operator(p: IonParams) -> np.ndarray:
    return core.kron(core.identity(N_LEVELS), core.number_operator(p.fock_cutoff))


def level_projector(p: IonParams, level: int) -> np.ndarray:
    return core.kron(transition(level, level), core.identity(p.fock_dim))


@dataclass(frozen=True)
class DressedFrame:
    omega_big_b: float
    omega_plus: float
    omega_d: float
    eta_b: float
    eta_d: float
    delta_minus: float
    delta_plus: float
    state_d: np.ndarray = field(repr=False)
    state_b: np.ndarray = field(repr=False)
    state_plus: np.ndarray = field(repr=False)
    state_minus: np.ndarray = field(repr=False)

    def basis(self) -> np.ndarray:
        """Unitary whose columns are ``|D>, |B>, |+>, |e>``."""
        return np.column_stack([self.state_d, self.state_b, self.state_plus, ket(E)])


def dressed_frame(p: IonParams) -> DressedFrame:
    norm2 = 2 * p.omega_r**2 + p.omega_g**2
    if norm2 <= 0:
        raise ValueError("degenerate dressing: omega_g = omega_r = 0")
    norm = np.sqrt(norm2)
    plus = (ket(G) + ket(D)) / np.sqrt(2)
    minus = (ket(G) - ket(D)) / np.sqrt(2)
    state_b = (p.omega_g * minus + np.sqrt(2) * p.omega_r * ket(R)) / norm
    state_d = (np.sqrt(2) * p.omega_r * minus - p.omega_g * ket(R)) / norm
    return DressedFrame(
        omega_big_b=float(norm / np.sqrt(2)),
        omega_plus=float(p.omega_g / np.sqrt(2)),
        omega_d=float(p.omega_g * p.omega_r / norm),
        eta_b=float((p.omega_g**2 * p.eta1 + 2 * p.omega_r**2 * p.eta2) / norm2),
        eta_d=float(p.eta1 - p.eta2),
        delta_minus=p.delta_r,
        # printed as delta_r + 2*delta_g; only delta_r + 2*delta_gr gives
        # delta_plus = delta_r - nu at delta_gr = -nu/2
        delta_plus=p.delta_r + 2 * p.delta_gr,
        state_d=state_d,
        state_b=state_b,
        state_plus=plus,
        state_minus=minus,
    )


@dataclass(frozen=True)
class MagicReport:
    dark_state: bool
    dark_state_residual: float
    blue_sideband_eit: bool
    blue_sideband_residual: float

    @property
    def both(self) -> bool:
        return self.dark_state and self.blue_sideband_eit


def magic_condition(p: IonParams, tol: float = 1e-9) -> MagicReport:
    """Check ``omega_mw == delta_gr`` and ``delta_gr == -nu/2`` to ``tol * nu``."""
    r1 = abs(p.omega_mw - p.delta_gr)
    r2 = abs(p.delta_gr + p.nu / 2)
    return MagicReport(r1 <= tol * p.nu, r1, r2 <= tol * p.nu, r2)


def build_jump_operators(p: IonParams, recoil_order: int = 1) -> list[np.ndarray]:
    """Lindblad operators for decay of |e> into g, r, d.

    Order 0 gives ``sqrt(2 gamma_j) |j><e|``. Order 1 appends one recoil
    channel per ground level, ``sqrt(2 gamma_j alpha) eta_j |j><e| (b + b^dag)``,
    the second-moment expansion of the angular emission integral.
    """
    if recoil_order not in (0, 1):
        raise ValueError("recoil_order must be 0 or 1")
    eye = core.identity(p.fock_dim)
    x = position_operator(p.fock_cutoff)
    channels = ((G, p.gamma_g, p.eta_decay_g), (R, p.gamma_r, p.eta_decay_r),
                (D, p.gamma_d, p.eta_decay_d))
    jumps = [np.sqrt(2 * gj) * core.kron(transition(j, E), eye) for j, gj, _ in channels]
    if recoil_order == 1:
        jumps += [np.sqrt(2 * gj * p.recoil_moment) * eta * core.kron(transition(j, E), x)
                  for j, gj, eta in channels]
    return jumps
