"""CSV and JSON writers. CSVs use ',' delimiters, LF line endings and a header row."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .hitting import ArrivalCurve
from .kinematics import VelocityProfile
from .spectral import DispersionTable
from .walk import WalkState, position_distribution

DISPERSION_HEADER = ["wave_number", "branch", "omega", "group_velocity", "phase_velocity"]
ARRIVAL_HEADER = ["t", "instantaneous_or_arrival_p", "cumulative"]


def _writer(fh):
    return csv.writer(fh, delimiter=",", lineterminator="\n")


def _num(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x + 0.0)


def _wave_number_text(w) -> str:
    if isinstance(w, tuple):
        return "(" + " ".join(str(c) for c in w) + ")"
    if isinstance(w, (int, np.integer)):
        return str(int(w))
    return _num(w)


def write_dispersion_csv(path, table: DispersionTable, profile: VelocityProfile | None = None) -> Path:
    path = Path(path)
    vg = profile.group_velocity if profile else None
    vph = profile.phase_velocity if profile else None
    with path.open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(DISPERSION_HEADER)
        for pt in table.points(vg, vph):
            w.writerow([
                _wave_number_text(pt.wave_number),
                pt.branch,
                _num(pt.omega),
                _num(pt.group_velocity),
                _num(pt.phase_velocity),
            ])
    return path


def write_distribution_csv(path, state: WalkState) -> Path:
    """
    ``position,probability`` rows. Finite groups add an ``element`` column
    holding the tuple; ``position`` is then the flat mixed-radix index.
    """
    path = Path(path)
    probs = position_distribution(state)
    with path.open("w", newline="") as fh:
        w = _writer(fh)
        if state.spec.is_line:
            w.writerow(["position", "probability"])
            for x, p in zip(state.positions, probs):
                w.writerow([int(x), _num(p)])
        else:
            w.writerow(["position", "probability", "element"])
            coords = state.spec.coordinates().T
            for i, (p, g) in enumerate(zip(probs, coords)):
                w.writerow([i, _num(p), "(" + " ".join(str(int(c)) for c in g) + ")"])
    return path


def write_arrival_csv(path, curve: ArrivalCurve) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(ARRIVAL_HEADER)
        for t, p, c in zip(curve.times, curve.p, curve.cumulative):
            w.writerow([int(t), _num(p), _num(c)])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return _num(x)
        return x
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path
