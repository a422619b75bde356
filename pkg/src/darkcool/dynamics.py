"""Lindblad master equation: generator, time evolution, steady states, fits.

Density matrices are vectorized row-major (``rho.ravel()``), so that
``vec(A rho B) = kron(A, B.T) @ vec(rho)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import curve_fit

from . import core
from .model import N_LEVELS, IonParams, build_h_ld, build_jump_operators, dressed_frame

TAIL_LIMIT = 1e-6
MAX_AUTO_CUTOFF = 20
STEADY_DIM_CAP = 64


class TruncationWarning(UserWarning):
    """Population in the top two Fock levels exceeded ``TAIL_LIMIT``."""


class IntegrationError(RuntimeError):
    """The adaptive integrator could not meet the requested tolerances."""


class DegenerateSteadyStateError(RuntimeError):
    def __init__(self, dimension: int):
        super().__init__(f"degenerate steady manifold: null space has dimension {dimension}")
        self.dimension = dimension


class FitError(ValueError):
    pass


class Liouvillian:
    """Generator ``L rho = -i[H, rho] + sum_k (C rho C^dag - {C^dag C, rho}/2)``.

    With this normalization a lone jump ``sqrt(2 gamma_j)|j><e|`` empties
    the excited level at rate ``2 gamma_j``.
    """

    def __init__(self, h, jumps=()):
        self.h = core.as_operator(h)
        self.jumps = [core.as_operator(c) for c in jumps]
        self.dim = self.h.shape[0]
        for c in self.jumps:
            if c.shape != self.h.shape:
                raise ValueError(f"jump operator shape {c.shape} does not match H {self.h.shape}")
        k = sum((c.conj().T @ c for c in self.jumps), np.zeros_like(self.h))
        self._h_eff = self.h - 0.5j * k
        self._sparse = None
        self._dense = None

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = -1j * (self._h_eff @ rho - rho @ self._h_eff.conj().T)
        for c in self.jumps:
            out += c @ rho @ c.conj().T
        return out

    def sparse(self) -> sp.csr_matrix:
        if self._sparse is None:
            n = self.dim
            eye = sp.identity(n, dtype=complex, format="csr")
            heff = sp.csr_matrix(self._h_eff)
            mat = -1j * (sp.kron(heff, eye) - sp.kron(eye, heff.conj()))
            for c in self.jumps:
                cs = sp.csr_matrix(c)
                mat = mat + sp.kron(cs, cs.conj())
            self._sparse = sp.csr_matrix(mat)
        return self._sparse

    def matrix(self) -> np.ndarray:
        """Materialized ``dim^2 x dim^2`` superoperator."""
        if self._dense is None:
            self._dense = self.sparse().toarray()
        return self._dense


def build_liouvillian(h, jumps) -> Liouvillian:
    return Liouvillian(h, jumps)


def liouvillian_for(p: IonParams, recoil_order: int = 1) -> Liouvillian:
    return Liouvillian(build_h_ld(p), build_jump_operators(p, recoil_order))


def thermal_populations(nbar: float, cutoff: int) -> np.ndarray:
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    n = np.arange(cutoff + 1)
    if nbar == 0:
        return (n == 0).astype(float)
    q = nbar / (1.0 + nbar)
    p = q**n
    return p / p.sum()


def thermal_state(nbar: float, cutoff: int) -> np.ndarray:
    """Truncated, renormalized thermal phonon state (mean below ``nbar``)."""
    return np.diag(thermal_populations(nbar, cutoff)).astype(complex)


def thermal_tail(nbar: float, cutoff: int) -> float:
    return float(thermal_populations(nbar, cutoff)[-2:].sum())


def auto_cutoff(nbar: float, start: int, cap: int = MAX_AUTO_CUTOFF) -> int:
    """Smallest cutoff >= ``start`` whose thermal tail is below ``TAIL_LIMIT``."""
    cutoff = start
    while thermal_tail(nbar, cutoff) >= TAIL_LIMIT and cutoff < cap:
        cutoff += 1
    return cutoff


def initial_state(p: IonParams, adjust_cutoff: bool = True) -> tuple[IonParams, np.ndarray]:
    """``|D><D| x thermal(nbar0)``, raising the cutoff when the tail is too heavy."""
    if adjust_cutoff:
        cutoff = auto_cutoff(p.nbar0, p.fock_cutoff)
        if cutoff != p.fock_cutoff:
            p = p.with_(fock_cutoff=cutoff)
    dark = dressed_frame(p).state_d
    return p, core.kron(np.outer(dark, dark.conj()), thermal_state(p.nbar0, p.fock_cutoff))


def mean_phonon(rho, cutoff: int | None = None) -> float:
    rho = core.as_operator(rho)
    if cutoff is None:
        if rho.shape[0] % N_LEVELS:
            raise ValueError(f"dimension {rho.shape[0]} is not a multiple of {N_LEVELS}")
        cutoff = rho.shape[0] // N_LEVELS - 1
    num = core.kron(core.identity(N_LEVELS), core.number_operator(cutoff))
    return core.expectation(rho, num).real


def _partial_diagonals(rho: np.ndarray, fock_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Internal level populations and Fock populations from the diagonal."""
    diag = np.real(np.diagonal(rho)).reshape(N_LEVELS, fock_dim)
    return diag.sum(axis=1), diag.sum(axis=0)


@dataclass
class CoolingTrajectory:
    times: np.ndarray
    nbar: np.ndarray
    pops: np.ndarray
    truncation_tail: np.ndarray
    trace_error: np.ndarray
    hermiticity_defect: np.ndarray
    min_eigenvalue: np.ndarray
    method: str = "dop853"
    warnings: list = field(default_factory=list)

    @property
    def max_tail(self) -> float:
        return float(np.max(self.truncation_tail))


def _observe(states, times, fock_dim, method):
    cutoff = fock_dim - 1 if fock_dim else 0
    nbar, pops, tail, tr_err, herm, mins = [], [], [], [], [], []
    for rho in states:
        tr = np.trace(rho)
        if fock_dim:
            levels, fock = _partial_diagonals(rho, fock_dim)
            nbar.append(float(np.real(np.sum(fock * np.arange(fock_dim))) / np.real(tr)))
            tail.append(float(fock[-2:].sum()))
        else:
            levels = np.real(np.diagonal(rho))
            nbar.append(0.0)
            tail.append(0.0)
        pops.append(levels / np.real(tr))
        tr_err.append(float(abs(tr - 1)))
        herm.append(core.hermiticity_defect(rho))
        mins.append(core.min_eigenvalue(rho))
    traj = CoolingTrajectory(
        times=np.asarray(times, dtype=float), nbar=np.array(nbar), pops=np.array(pops),
        truncation_tail=np.array(tail), trace_error=np.array(tr_err),
        hermiticity_defect=np.array(herm), min_eigenvalue=np.array(mins), method=method,
    )
    if traj.max_tail > TAIL_LIMIT:
        msg = (f"truncation breach: top-two Fock population {traj.max_tail:.2e} "
               f"exceeds {TAIL_LIMIT:.0e} at cutoff {cutoff}")
        traj.warnings.append(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=3)
    return traj


def evolve(l: Liouvillian, rho0, t_grid, method: str = "dop853",
           rtol: float = 1e-8, atol: float = 1e-10, fock_dim: int | None = None):
    """Integrate the master equation and sample it on ``t_grid``.

    ``method`` is ``"dop853"`` or ``"rk45"`` (adaptive embedded Runge-Kutta
    on the sparse superoperator) or ``"expm"`` (exact one-step propagator on
    a uniform grid; exact up to rounding, far faster for long horizons).
    Returns the observed trajectory and the final density matrix. Trace
    drift is recorded but never corrected. ``fock_dim`` defaults to the
    joint-space layout (four levels times a Fock ladder); systems without a
    motional factor report ``nbar = 0`` and raw diagonal populations.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    rho0 = core.as_operator(rho0)
    if rho0.shape[0] != l.dim:
        raise ValueError(f"rho0 dimension {rho0.shape[0]} does not match generator {l.dim}")
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0:
        raise ValueError("t_grid must be a non-empty 1-d array starting at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    n = l.dim
    if fock_dim is None:
        fock_dim = n // N_LEVELS if n % N_LEVELS == 0 and n > N_LEVELS else 0
    y0 = rho0.ravel()

    if t_grid.size == 1:
        states = [rho0.copy()]
    elif method == "expm":
        steps = np.diff(t_grid)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise ValueError("the expm method needs a uniformly spaced grid")
        prop = expm(l.matrix() * steps[0])
        ys = [y0]
        for _ in steps:
            ys.append(prop @ ys[-1])
        states = [y.reshape(n, n) for y in ys]
    elif method in ("dop853", "rk45"):
        mat = l.sparse()
        sol = solve_ivp(lambda t, y: mat @ y, (t_grid[0], t_grid[-1]), y0,
                        method={"dop853": "DOP853", "rk45": "RK45"}[method], t_eval=t_grid,
                        rtol=rtol, atol=atol)
        if sol.status != 0:
            raise IntegrationError(f"tolerance failure: {sol.message}")
        states = [y.reshape(n, n) for y in sol.y.T]
    else:
        raise ValueError(f"unknown method {method!r}")

    traj = _observe(states, t_grid, fock_dim, method)
    return traj, states[-1]


def steady_state(l: Liouvillian, dim_cap: int = STEADY_DIM_CAP, tol: float = 1e-10) -> np.ndarray:
    """Trace-one kernel of the materialized superoperator."""
    if l.dim > dim_cap:
        raise ValueError(f"joint dimension {l.dim} exceeds the steady-state cap {dim_cap}")
    nv = core.null_vector(l.matrix(), tol=tol)
    if nv.multiplicity > 1:
        raise DegenerateSteadyStateError(nv.multiplicity)
    rho = nv.vector.reshape(l.dim, l.dim)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def spectral_gap(l: Liouvillian, k: int = 4) -> float:
    """Slowest non-zero relaxation rate ``-Re(lambda)`` of the generator."""
    n = l.dim**2
    # fixed start vector: ARPACK otherwise seeds randomly and sweeps are not reproducible
    vals = spla.eigs(l.sparse().tocsc(), k=k, sigma=1e-9, which="LM",
                     v0=np.full(n, n**-0.5, dtype=complex), return_eigenvectors=False)
    vals = sorted(vals, key=abs)
    return float(-vals[1].real)


@dataclass
class FitResult:
    n0: float
    nss: float
    w: float
    residual: float
    flags: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags


def _exp_model(t, n0, nss, w):
    return (n0 - nss) * np.exp(-w * t) + nss


def fit_exponential(traj: CoolingTrajectory, discard: float = 0.05) -> FitResult:
    """Fit ``<n>(t) = (n0 - nss) exp(-w t) + nss`` to a cooling curve.

    The first ``discard`` fraction of samples is skipped. Trajectories that
    rise by more than 5% of their initial value are rejected outright.
    """
    t = np.asarray(traj.times, dtype=float)
    n = np.asarray(traj.nbar, dtype=float)
    if t.size < 10:
        raise FitError(f"need at least 10 samples, got {t.size}")
    rise = np.max(n) - n[0]
    if rise > 0.05 * abs(n[0]) and rise > 0:
        raise FitError(f"non-monotone trajectory: <n> rises by {rise:.3e} (heating regime)")
    keep = t >= t[0] + discard * (t[-1] - t[0])
    t, n = t[keep], n[keep]
    t0 = t[0]
    tau = t - t0
    span = tau[-1]

    scale = max(abs(n[0]), abs(n[-1]), np.finfo(float).tiny)
    if np.ptp(n) <= 1e-12 * scale:
        return FitResult(n0=float(n[0]), nss=float(n[0]), w=0.0, residual=0.0,
                         flags=["insufficient decay"])

    nss_guess = n[-1]
    excess = n - nss_guess
    mask = excess > 1e-3 * excess[0] if excess[0] > 0 else np.zeros_like(excess, bool)
    if mask.sum() >= 2:
        slope = np.polyfit(tau[mask], np.log(excess[mask]), 1)[0]
        w_guess = max(-slope, 1.0 / span)
    else:
        w_guess = 1.0 / span
    p0 = (n[0], nss_guess, w_guess)
    try:
        popt, _ = curve_fit(_exp_model, tau, n, p0=p0, method="trf", x_scale=(scale, scale, w_guess),
                            maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"least-squares fit failed: {exc}") from exc
    a0, nss, w = (float(x) for x in popt)
    residual = float(np.sqrt(np.mean((_exp_model(tau, *popt) - n) ** 2)))
    flags = []
    if w < 0:
        flags.append("negative rate")
    if w <= 0 or span < 2.0 / w:
        flags.append("insufficient decay")
    # report n0 at the original time origin
    n0 = nss + (a0 - nss) * np.exp(w * t0) if w > 0 else a0
    return FitResult(n0=float(n0), nss=nss, w=w, residual=residual, flags=flags)
