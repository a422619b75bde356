"""Cooling and heating rates from adiabatic elimination of the internal levels.

Two independent routes are provided:

* closed forms (``f_eval``, ``rates_closed_form``, ``a_minus_magic``,
  ``nss_analytic``, ``optimal_delta_g``, ``w_max``), implemented exactly as
  the published expressions read;
* ``gamma_resolvent``, which evaluates the second-order scattering amplitude
  numerically on the truncated joint space and is treated as ground truth.

The printed cubic ``f(x)`` does not reproduce the Delta_g-dependent cooling
rate at ``delta_gr = -nu/2`` (see ``printed_cubic_discrepancy``); the
resolvent agrees with that Delta_g-dependent rate and with its maximum.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import core
from .model import N_LEVELS, IonParams, build_h0, build_h_ld, build_v, dressed_frame


class ResonantPoleError(ZeroDivisionError):
    pass


class SingularResolventError(np.linalg.LinAlgError):
    pass


class RateSource(str, Enum):
    CLOSED_FORM = "closed_form"
    RESOLVENT = "resolvent"


@dataclass(frozen=True)
class RateResult:
    a_plus: float
    a_minus: float
    source: RateSource
    note: str = ""

    @property
    def w(self) -> float:
        return self.a_minus - self.a_plus

    @property
    def nss(self) -> float:
        """``A+ / (A- - A+)``; infinite when heating wins."""
        if self.a_plus >= self.a_minus:
            return float("inf")
        return self.a_plus / (self.a_minus - self.a_plus)


@dataclass(frozen=True)
class CubicF:
    """``f(x) = x^3 + c2 x^2 + c1 x + c0 + i gamma (x - 2 delta_gr) x`` as printed."""

    c2: float
    c1: float
    c0: float
    gamma: float
    delta_gr: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        value = x**3 + self.c2 * x**2 + self.c1 * x + self.c0 + 1j * self.gamma * (x - 2 * self.delta_gr) * x
        return value[()] if value.ndim == 0 else value


def cubic_f(p: IonParams) -> CubicF:
    fr = dressed_frame(p)
    b2, plus2 = fr.omega_big_b**2, fr.omega_plus**2
    return CubicF(
        c2=p.delta_g - p.delta_gr,
        c1=b2 + plus2 + 2 * p.delta_g * p.delta_gr + 2 * p.delta_gr**2,
        c0=2 * b2 * p.delta_gr,
        gamma=p.gamma,
        delta_gr=p.delta_gr,
    )


def f_eval(p: IonParams, x: float) -> complex:
    return complex(cubic_f(p)(x))


def rates_closed_form(p: IonParams) -> RateResult:
    """Printed closed-form ``A+-`` with ``|f(-+nu)|^2`` in the denominator.

    ``eta`` is taken as ``eta_D``.
    """
    fr = dressed_frame(p)
    f = cubic_f(p)
    prefactor = 2 * p.gamma * fr.omega_d**2 * fr.eta_d**2 * p.nu**2
    out = []
    for x in (-p.nu, p.nu):
        denom = abs(f(x)) ** 2
        if denom < 1e-24:
            raise ResonantPoleError(f"resonant pole: |f({x:g})| < 1e-12")
        out.append(float(prefactor * (x - 2 * p.delta_gr) ** 2 / denom))
    return RateResult(a_plus=out[0], a_minus=out[1], source=RateSource.CLOSED_FORM,
                      note="printed-formula")


def a_minus_magic(p: IonParams) -> float:
    """Cooling rate at ``delta_gr = -nu/2`` as a function of ``delta_g``."""
    fr = dressed_frame(p)
    nu = p.nu
    detune = 3 * nu**2 + 2 * nu * p.delta_g - 2 * fr.omega_big_b**2 - fr.omega_plus**2
    return float(2 * p.gamma * fr.omega_d**2 * fr.eta_d**2 * 4 * nu**2
                 / (detune**2 + 4 * p.gamma**2 * nu**2))


def optimum_residual(p: IonParams) -> float:
    fr = dressed_frame(p)
    return 3 * p.nu**2 + 2 * p.nu * p.delta_g - 2 * fr.omega_big_b**2 - fr.omega_plus**2


def optimal_delta_g(p: IonParams) -> float:
    b2 = (2 * p.omega_r**2 + p.omega_g**2) / 2
    plus2 = p.omega_g**2 / 2
    return (2 * b2 + plus2 - 3 * p.nu**2) / (2 * p.nu)


def w_max(p: IonParams) -> float:
    fr = dressed_frame(p)
    return 2 * fr.omega_d**2 * fr.eta_d**2 / p.gamma


def nss_analytic(p: IonParams) -> float:
    """Mean phonon number of the double-dark state, leading order in eta."""
    if p.omega_g <= 0:
        raise ValueError("omega_g must be positive")
    eta_d = p.eta1 - p.eta2
    g2, r2 = p.omega_g**2, p.omega_r**2
    return 2 * eta_d**2 * g2 * r2 / (g2**2 + 2 * (eta_d**2 + 1) * g2 * r2)


def gamma_resolvent(p: IonParams, n: int = 1, cond_limit: float = 1e12):
    """Scattering rates ``(Gamma_{n->n-1}, Gamma_{n->n+1})`` out of ``|D, n>``.

    Solves ``(E_n - H_eff) y = V |D, n>`` with ``H_eff`` the sideband-free
    Hamiltonian minus ``i gamma |e><e|``, on the complement of ``|D, n>``,
    and returns ``2 gamma |<e, n-+1| y>|^2``.
    """
    if not 1 <= n <= p.fock_cutoff - 2:
        raise ValueError(f"n must satisfy 1 <= n <= cutoff - 2 = {p.fock_cutoff - 2}")
    fr = dressed_frame(p)
    nf = p.fock_dim
    u = core.kron(fr.basis(), core.identity(nf))
    h_eff = build_h0(p) - 1j * p.gamma * core.kron(np.diag([0, 0, 0, 1]).astype(complex),
                                                  core.identity(nf))
    h_d = u.conj().T @ h_eff @ u
    v_d = u.conj().T @ build_v(p) @ u
    # dressed index of |D, n> is 0 * nf + n
    target = n
    e_n = (u[:, target].conj() @ build_h_ld(p) @ u[:, target]).real
    keep = np.arange(N_LEVELS * nf) != target
    a = e_n * np.eye(keep.sum()) - h_d[np.ix_(keep, keep)]
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularResolventError(f"singular resolvent: condition number {cond:.3e}")
    y = np.linalg.solve(a, v_d[keep, target])
    full = np.zeros(N_LEVELS * nf, dtype=complex)
    full[keep] = y
    e_idx = 3 * nf
    down = 2 * p.gamma * abs(full[e_idx + n - 1]) ** 2
    up = 2 * p.gamma * abs(full[e_idx + n + 1]) ** 2
    return float(down), float(up)


def rates_resolvent(p: IonParams, n: int = 1) -> RateResult:
    down, up = gamma_resolvent(p, n)
    return RateResult(a_plus=up / (n + 1), a_minus=down / n, source=RateSource.RESOLVENT)


def offres_scatter_estimate(omega_g: float, gap: float, two_gamma: float) -> float:
    """Off-resonant scattering ``(2/3) (omega_g / gap)^2 * 2 gamma`` via a distant level."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    return (2.0 / 3.0) * (omega_g / gap) ** 2 * two_gamma


def nu_from_linewidth(two_gamma_phys: float, p: IonParams) -> float:
    """Physical trap frequency implied by a physical linewidth ``2 gamma``."""
    return two_gamma_phys * p.nu / (2 * p.gamma)


@dataclass(frozen=True)
class DiscrepancyReport:
    printed_a_minus: float
    resolvent_a_minus: float
    magic_a_minus: float
    relative_mismatch: float
    chain_residual: float

    @property
    def printed_consistent(self) -> bool:
        return self.relative_mismatch < 0.01


def printed_cubic_discrepancy(p: IonParams) -> DiscrepancyReport:
    """Compare the printed-cubic cooling rate with the resolvent oracle.

    ``chain_residual`` checks that the Delta_g-dependent rate evaluated at
    the optimal detuning equals ``w_max`` (relative difference).
    """
    printed = rates_closed_form(p).a_minus
    oracle = rates_resolvent(p).a_minus
    magic = a_minus_magic(p)
    at_opt = a_minus_magic(p.with_(delta_g=optimal_delta_g(p)))
    return DiscrepancyReport(
        printed_a_minus=printed,
        resolvent_a_minus=oracle,
        magic_a_minus=magic,
        relative_mismatch=float(abs(printed - oracle) / oracle),
        chain_residual=float(abs(at_opt - w_max(p)) / w_max(p)),
    )
