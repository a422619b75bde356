"""Scenario runner, self-checks, I/O and the command-line interface."""
from .checks import CheckResult, self_check
from .io import ConfigError, load_config, parse_config
from .runner import (DynamicsResult, RobustnessResult, SweepResult, SweepRow, run_cooling_dynamics,
                     run_robustness, run_sweep)
from .scenarios import BUILTIN, Scenario, fig3_params, get_scenario
