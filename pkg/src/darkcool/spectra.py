"""Steady-state absorption of the cooling beam versus its detuning.

The spectrum is the excited-state population of the four-level system
without motion. Scattering rate is ``2 gamma * rho_ee``; the absolute scale
is irrelevant here, only zero positions and the peak between them are used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import Liouvillian, steady_state
from .model import E, G, D, R, IonParams, build_h_at, magic_condition, transition


class FeatureCountError(ValueError):
    pass


@dataclass
class Spectrum:
    detunings: np.ndarray
    absorption: np.ndarray
    magic: bool = False
    nu: float = 1.0
    zeros: list = field(default_factory=list)
    peak: Optional[tuple] = None
    evaluate: Optional[Callable[[float], float]] = field(default=None, repr=False)


def internal_liouvillian(p: IonParams) -> Liouvillian:
    jumps = [np.sqrt(2 * gj) * transition(j, E)
             for j, gj in ((G, p.gamma_g), (R, p.gamma_r), (D, p.gamma_d))]
    return Liouvillian(build_h_at(p), jumps)


def excited_population(p: IonParams, delta_r: float) -> float:
    """``rho_ee`` of the internal steady state with the cooling beam at ``delta_r``."""
    q = p.with_(delta_gr=p.delta_g - delta_r)
    rho = steady_state(internal_liouvillian(q))
    return float(rho[E, E].real)


def absorption_spectrum(p: IonParams, delta_r_grid) -> Spectrum:
    """Scan the cooling-beam detuning with the coupling laser held at ``p.delta_g``."""
    grid = np.asarray(delta_r_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("delta_r_grid must be strictly increasing")
    values = np.array([excited_population(p, x) for x in grid])
    return Spectrum(detunings=grid, absorption=values, magic=magic_condition(p).both,
                    nu=p.nu, evaluate=lambda x: excited_population(p, x))


def _parabola_vertex(x, y):
    """Vertex of the parabola through three points."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a == 0:
        return x1, y1
    xv = -b / (2 * a)
    if not x0 <= xv <= x2:
        return x1, y1
    c = y1 - a * x1**2 - b * x1
    return xv, a * xv**2 + b * xv + c


def _refine(s: Spectrum, i: int, sign: float):
    x = s.detunings[i - 1:i + 2]
    y = sign * s.absorption[i - 1:i + 2]
    xv, yv = _parabola_vertex(x, y)
    if s.evaluate is not None:
        res = minimize_scalar(lambda t: sign * s.evaluate(t), bounds=(x[0], x[2]),
                              method="bounded", options={"xatol": 1e-12 * max(1.0, abs(xv))})
        xv, yv = float(res.x), float(res.fun)
    return float(xv), float(sign * yv)


def locate_features(s: Spectrum, zero_tol: float = 1e-6, expected_zeros: Optional[int] = 2,
                    separation_tol: float = 0.02):
    """Find the absorption zeros and the maximum between them.

    Local minima of the sampled curve are refined (parabolic vertex, then a
    bounded scalar minimization when the spectrum can be re-evaluated) and
    kept as zeros when the refined value is below ``zero_tol`` times the
    largest sample. Under the magic conditions the two zeros must sit ``nu``
    apart within ``separation_tol``.
    """
    a = np.asarray(s.absorption, dtype=float)
    if a.size < 3:
        raise FeatureCountError("feature count mismatch: spectrum too short")
    top = float(np.max(a))
    zeros = []
    if top > 0:
        for i in range(1, a.size - 1):
            if a[i] <= a[i - 1] and a[i] <= a[i + 1] and (a[i] < a[i - 1] or a[i] < a[i + 1]):
                x0, y0 = _refine(s, i, +1.0)
                if y0 < zero_tol * top:
                    zeros.append(x0)
    zeros.sort()
    if expected_zeros is not None and len(zeros) != expected_zeros:
        raise FeatureCountError(
            f"feature count mismatch: found {len(zeros)} zeros, expected {expected_zeros}")

    if len(zeros) >= 2:
        inside = np.flatnonzero((s.detunings > zeros[0]) & (s.detunings < zeros[-1]))
    else:
        inside = np.arange(a.size)
    inside = inside[(inside > 0) & (inside < a.size - 1)]
    if inside.size == 0:
        raise FeatureCountError("feature count mismatch: no samples between the zeros")
    i = int(inside[np.argmax(a[inside])])
    peak = _refine(s, i, -1.0)

    if s.magic and len(zeros) == 2:
        sep = zeros[1] - zeros[0]
        if abs(sep - s.nu) > separation_tol * s.nu:
            raise FeatureCountError(f"zero separation {sep:.6g} differs from nu = {s.nu:g}")
    s.zeros, s.peak = zeros, peak
    return zeros, peak


def fig2_params(**overrides) -> IonParams:
    """Parameter set of the double-Fano absorption figure, in units of ``nu``.

    ``omega_g = gamma/sqrt(2)``, ``omega_r = gamma/20`` and a cooling-beam
    detuning of ``gamma`` at the reference point, with ``delta_gr = -nu/2``
    and the optimal ``delta_g``. These fix ``gamma/nu`` as the positive root
    of ``c gamma^2 - 2 gamma - 2 = 0`` where ``c = 0.755``.
    """
    c = (1 / 200 + 1 / 2) + 1 / 4
    gamma = (2 + np.sqrt(4 + 8 * c)) / (2 * c)
    delta_gr = -0.5
    params = dict(
        omega_g=gamma / np.sqrt(2), omega_r=gamma / 20, omega_mw=delta_gr,
        delta_gr=delta_gr, delta_g=gamma + delta_gr,
        gamma_g=gamma / 3, gamma_r=gamma / 3, gamma_d=gamma / 3,
        eta1=0.0, eta2=0.0,
    )
    params.update(overrides)
    return IonParams(**params)


def fig2_grid(p: IonParams, half_width: float = 2.0, points: int = 401) -> np.ndarray:
    """Cooling-beam detunings centred between the two dark resonances."""
    return np.linspace(p.delta_g - half_width, p.delta_g + half_width, points)
