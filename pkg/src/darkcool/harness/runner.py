"""Scenario execution: cooling runs, parameter sweeps, robustness windows."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .. import rates
from ..dynamics import (
    STEADY_DIM_CAP,
    CoolingTrajectory,
    FitError,
    FitResult,
    evolve,
    fit_exponential,
    initial_state,
    liouvillian_for,
    mean_phonon,
    spectral_gap,
    steady_state,
)
from ..model import IonParams
from .scenarios import Scenario, get_scenario

WORKERS_ENV = "DARKCOOL_WORKERS"
# dense propagator is used up to this joint dimension; beyond it the adaptive integrator
EXPM_DIM_CAP = 48
W_FLOOR = 1e-3


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


@dataclass
class DynamicsResult:
    params: IonParams
    trajectory: CoolingTrajectory
    final_state: np.ndarray
    fit: Optional[FitResult]
    comparison: dict
    status: str = "ok"


def _relative(a, b):
    if b is None or a is None or not np.isfinite(b) or b == 0:
        return float("nan")
    return abs(a - b) / abs(b)


def run_cooling_dynamics(s: Scenario, method: Optional[str] = None) -> DynamicsResult:
    """Evolve ``|D><D| x thermal(nbar0)`` and compare the fitted curve with theory."""
    if s.axis is not None:
        raise ValueError("run_cooling_dynamics expects a scenario without a sweep axis")
    p, rho0 = initial_state(s.params)
    try:
        w_res = rates.rates_resolvent(p).w
    except (ValueError, np.linalg.LinAlgError):
        w_res = float("nan")
    w_ref = w_res if np.isfinite(w_res) and w_res > W_FLOOR * p.nu else W_FLOOR * p.nu
    t_grid = np.linspace(0.0, s.evolve_horizon / w_ref, s.samples)
    if method is None:
        method = "expm" if p.joint_dim <= EXPM_DIM_CAP else "dop853"
    l = liouvillian_for(p)
    traj, final = evolve(l, rho0, t_grid, method=method)

    status = "ok"
    try:
        fit = fit_exponential(traj)
        if fit.flags:
            status = "; ".join(fit.flags)
    except FitError as exc:
        fit, status = None, str(exc)

    nss_an = rates.nss_analytic(p) if p.omega_g > 0 else float("nan")
    w_an = rates.w_max(p)
    comparison = {
        "w_fit": fit.w if fit else float("nan"),
        "w_resolvent": w_res,
        "w_max": w_an,
        "w_rel_dev_resolvent": _relative(fit.w, w_res) if fit else float("nan"),
        "w_rel_dev_max": _relative(fit.w, w_an) if fit else float("nan"),
        "nss_fit": fit.nss if fit else float("nan"),
        "nss_analytic": nss_an,
        "nss_rel_dev": _relative(fit.nss, nss_an) if fit else float("nan"),
    }
    return DynamicsResult(p, traj, final, fit, comparison, status)


@dataclass
class SweepRow:
    axis_value: float
    nss_numeric: float = float("nan")
    nss_analytic: float = float("nan")
    w_numeric: float = float("nan")
    w_resolvent: float = float("nan")
    w_closed_form: float = float("nan")
    status: str = "ok"
    provenance: str = ""
    tail: float = float("nan")


@dataclass
class SweepResult:
    name: str
    axis: str
    rows: list = field(default_factory=list)

    @property
    def axis_values(self) -> np.ndarray:
        return np.array([r.axis_value for r in self.rows])

    @property
    def nss_numeric(self) -> np.ndarray:
        return np.array([r.nss_numeric for r in self.rows])

    @property
    def nss_analytic(self) -> np.ndarray:
        return np.array([r.nss_analytic for r in self.rows])


@lru_cache(maxsize=256)
def steady_point(p: IonParams):
    """Numeric (nss, spectral gap, Fock tail) of the full joint steady state."""
    l = liouvillian_for(p)
    rho = steady_state(l)
    fock = np.real(np.diagonal(rho)).reshape(4, p.fock_dim).sum(axis=0)
    return mean_phonon(rho), spectral_gap(l), float(fock[-2:].sum())


def point_params(s: Scenario, value: float) -> IonParams:
    p = s.params.with_(**{s.axis: value})
    if s.optimal:
        p = p.with_(delta_g=rates.optimal_delta_g(p))
    return p


def sweep_point(s: Scenario, value: float) -> SweepRow:
    row = SweepRow(axis_value=float(value))
    try:
        p = point_params(s, value)
        if p.joint_dim <= STEADY_DIM_CAP:
            row.nss_numeric, row.w_numeric, row.tail = steady_point(p)
            row.provenance = "nss:master_equation/steady_state; w:master_equation/spectral_gap"
        else:
            res = run_cooling_dynamics(Scenario(s.name, p, evolve_horizon=s.evolve_horizon))
            if res.fit is None:
                raise FitError(res.status)
            row.nss_numeric, row.w_numeric = res.fit.nss, res.fit.w
            row.tail = res.trajectory.max_tail
            row.provenance = "nss,w:master_equation/fit"
        row.w_resolvent = rates.rates_resolvent(p).w
        row.provenance += "; w_resolvent:resolvent; w_closed_form:closed_form"
        try:
            row.w_closed_form = rates.rates_closed_form(p).w
        except rates.ResonantPoleError:
            pass
        if p.omega_g > 0:
            row.nss_analytic = rates.nss_analytic(p)
            row.provenance += "; nss_analytic:closed_form"
    except Exception as exc:  # per-point failures become error rows
        row.status = f"error: {type(exc).__name__}: {exc}"
    return row


def _sweep_task(args):
    return sweep_point(*args)


def run_sweep(s: Scenario, workers: Optional[int] = None) -> SweepResult:
    """One row per grid value, in grid order, computed on a worker pool."""
    if s.axis is None:
        raise ValueError("run_sweep needs a scenario with a sweep axis")
    workers = default_workers() if workers is None else workers
    tasks = [(s, v) for v in s.values]
    if workers <= 1 or len(tasks) == 1:
        rows = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    return SweepResult(s.name, s.axis, rows)


@dataclass
class RobustnessResult:
    sweep: SweepResult
    nss_max: float
    nss_min: float
    spread: float
    argmin: float


ROBUSTNESS_AXES = {"fig6": ("omega_mw", -0.5), "fig7": ("omega_g", 10.0)}


def run_robustness(name: str, width: float = 0.2, points: int = 9,
                   center: Optional[float] = None, workers: Optional[int] = None) -> RobustnessResult:
    """Sweep ``center * (1 +- width)`` with ``delta_g`` held fixed."""
    if name not in ROBUSTNESS_AXES:
        raise ValueError(f"robustness scenarios are {sorted(ROBUSTNESS_AXES)}")
    axis, default_center = ROBUSTNESS_AXES[name]
    center = default_center if center is None else center
    if width == 0:
        values = (center,)
    else:
        lo, hi = sorted((center * (1 - width), center * (1 + width)))
        values = tuple(np.linspace(lo, hi, points))
    base = get_scenario(name)
    s = Scenario(name, base.params, axis=axis, values=values, optimal=False, outputs=("sweep",))
    sweep = run_sweep(s, workers)
    nss = sweep.nss_numeric
    good = np.isfinite(nss)
    if not good.any():
        raise RuntimeError(f"all points of the {name} window failed")
    i = int(np.nanargmin(nss))
    return RobustnessResult(sweep, float(np.nanmax(nss)), float(np.nanmin(nss)),
                            float(np.nanmax(nss) - np.nanmin(nss)), float(sweep.axis_values[i]))
