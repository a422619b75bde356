"""Parameter files and CSV / JSON-lines writers."""
from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

from ..model import LEVELS, PARAM_NAMES, IonParams

TRAJECTORY_COLUMNS = ("t", "nbar", "pop_g", "pop_d", "pop_r", "pop_e", "tail")
SWEEP_COLUMNS = ("axis_value", "nss_numeric", "nss_analytic", "w_numeric", "w_resolvent",
                 "w_closed_form", "status", "provenance", "tail")
_SECTION = "params"


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> IonParams:
    """Flat ``key = value`` text; keys are ``IonParams`` field names."""
    if not text.strip():
        raise ConfigError("empty parameter file")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed parameter file: {exc}") from None
    items = dict(cp[_SECTION])
    if not items:
        raise ConfigError("empty parameter file")
    unknown = sorted(set(items) - set(PARAM_NAMES))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    values = {}
    for key, raw in items.items():
        try:
            values[key] = int(raw) if key == "fock_cutoff" else float(raw)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    try:
        return IonParams(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> IonParams:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def dump_config(p: IonParams) -> str:
    return "".join(f"{k} = {v!r}\n" for k, v in asdict(p).items())


def _fmt(value):
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return value


def trajectory_rows(traj):
    for i, t in enumerate(traj.times):
        yield dict(zip(TRAJECTORY_COLUMNS,
                       (float(t), float(traj.nbar[i]), *map(float, traj.pops[i][:len(LEVELS)]),
                        float(traj.truncation_tail[i]))))


def sweep_rows(sweep):
    for row in sweep.rows:
        yield {c: getattr(row, c) for c in SWEEP_COLUMNS}


def write_csv(stream, columns, rows) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])


def write_jsonl(stream, rows) -> None:
    for r in rows:
        clean = {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in r.items()}
        stream.write(json.dumps(clean) + "\n")
