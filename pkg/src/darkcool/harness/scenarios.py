"""Named experiments reproducing the absorption, cooling and sweep figures."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..model import PARAM_NAMES, IonParams
from ..spectra import fig2_params


@dataclass(frozen=True)
class Scenario:
    name: str
    params: IonParams
    axis: Optional[str] = None
    values: tuple = ()
    optimal: bool = False
    evolve_horizon: float = 6.0
    samples: int = 301
    outputs: tuple = ("trajectory", "fit", "rates")

    def __post_init__(self):
        if self.axis is not None:
            if self.axis not in PARAM_NAMES:
                raise ValueError(f"unknown sweep axis {self.axis!r}")
            values = tuple(float(v) for v in self.values)
            if not values or not all(np.isfinite(values)):
                raise ValueError("sweep grid must be non-empty and finite")
            object.__setattr__(self, "values", values)
        if self.evolve_horizon <= 0:
            raise ValueError("evolve_horizon must be positive")


def fig3_params(**overrides) -> IonParams:
    """Cooling-dynamics parameters; starts from a thermal state with nbar0 = 0.1."""
    overrides.setdefault("nbar0", 0.1)
    return IonParams(**overrides)


def _builtin() -> dict:
    base = fig3_params()
    return {
        "fig2": Scenario("fig2", fig2_params(), outputs=("spectrum",)),
        "fig3": Scenario("fig3", base),
        "fig4": Scenario("fig4", base, axis="omega_g", values=(5, 7.5, 10, 12.5, 15),
                         optimal=True, outputs=("sweep",)),
        "fig5": Scenario("fig5", base, axis="omega_r", values=(0.5, 1, 1.5, 2, 2.5, 3),
                         optimal=True, outputs=("sweep",)),
        "fig6": Scenario("fig6", base, axis="omega_mw", values=tuple(np.linspace(-0.6, -0.4, 9)),
                         outputs=("sweep",)),
        "fig7": Scenario("fig7", base, axis="omega_g", values=tuple(np.linspace(8, 12, 9)),
                         outputs=("sweep",)),
    }


BUILTIN = _builtin()


def get_scenario(name: str) -> Scenario:
    try:
        return BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(BUILTIN)}") from None
