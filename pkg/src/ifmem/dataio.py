"""Load/save parameter sets, Gaussian distributions and I-V traces.

On-disk formats:

* ``ModelParameters`` -- flat JSON object keyed by parameter name plus
  ``eta`` and ``x0``.
* ``GaussianParamSet`` -- JSON object with ``area_label``, ``eta``,
  ``x0`` and a ``parameters`` map of ``{"mean": ..., "sd": ...}``.
* ``IVTrace`` -- CSV with header ``time,voltage,current[,state]``.

All numeric output uses shortest round-trip precision, so
load(save(x)) == x exactly.
"""

import csv
import json
import os
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError, FormatError, ValidationError
from .model import PARAMETER_NAMES, ModelParameters
from .simulate import IVTrace

_SCALAR_KEYS = ("eta", "x0")
_AREA_LABELS = ("10um", "32um", "100um")


@dataclass
class GaussianParamSet:
    """Per-parameter (mean, sd) pairs describing one device area; the
    state polarity and initial state are scalars carried alongside."""

    area_label: str
    eta: float
    x0: float
    parameters: dict

    def __post_init__(self):
        expected = set(PARAMETER_NAMES)
        got = set(self.parameters)
        if got != expected:
            missing = sorted(expected - got)
            unknown = sorted(got - expected)
            parts = []
            if missing:
                parts.append(f"missing parameters: {', '.join(missing)}")
            if unknown:
                parts.append(f"unknown parameters: {', '.join(unknown)}")
            raise FormatError("; ".join(parts))
        clean = {}
        for name in PARAMETER_NAMES:
            mean, sd = self.parameters[name]
            mean, sd = float(mean), float(sd)
            if not np.isfinite(sd) or sd < 0.0:
                raise ValidationError(f"sd of {name} must be finite and >= 0")
            clean[name] = (mean, sd)
        self.parameters = clean
        self.mean_model()  # raises if the means violate model invariants

    def mean_model(self):
        """ModelParameters built from the per-parameter means."""
        means = {name: mv[0] for name, mv in self.parameters.items()}
        try:
            return ModelParameters(eta=self.eta, x0=self.x0, **means)
        except DomainError as exc:
            raise ValidationError(str(exc)) from exc

    def means(self):
        return {name: mv[0] for name, mv in self.parameters.items()}

    def sds(self):
        return {name: mv[1] for name, mv in self.parameters.items()}


@dataclass
class MeasurementSet:
    """All measured traces for one device area."""

    device_area_label: str
    traces: list

    def __post_init__(self):
        if not self.traces:
            raise ValidationError(
                f"measurement set '{self.device_area_label}' has no traces")


def save_params(obj, path):
    """Serialize a ModelParameters or GaussianParamSet to JSON."""
    if isinstance(obj, ModelParameters):
        payload = obj.as_dict()
    elif isinstance(obj, GaussianParamSet):
        payload = {
            "area_label": obj.area_label,
            "eta": obj.eta,
            "x0": obj.x0,
            "parameters": {
                name: {"mean": mean, "sd": sd}
                for name, (mean, sd) in obj.parameters.items()
            },
        }
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_params(path):
    """Load a ModelParameters or GaussianParamSet JSON file (the two are
    distinguished by the presence of a ``parameters`` map)."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if "parameters" in payload:
        return _gaussian_from_payload(payload, path)
    return _model_from_payload(payload, path)


def _model_from_payload(payload, origin):
    expected = set(PARAMETER_NAMES) | set(_SCALAR_KEYS)
    missing = sorted(expected - set(payload))
    unknown = sorted(set(payload) - expected)
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing keys: {', '.join(missing)}")
        if unknown:
            parts.append(f"unknown keys: {', '.join(unknown)}")
        raise FormatError(f"{origin}: " + "; ".join(parts))
    try:
        return ModelParameters(**{k: float(v) for k, v in payload.items()})
    except DomainError as exc:
        raise ValidationError(f"{origin}: {exc}") from exc


def _gaussian_from_payload(payload, origin):
    expected = {"area_label", "eta", "x0", "parameters"}
    missing = sorted(expected - set(payload))
    unknown = sorted(set(payload) - expected)
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing keys: {', '.join(missing)}")
        if unknown:
            parts.append(f"unknown keys: {', '.join(unknown)}")
        raise FormatError(f"{origin}: " + "; ".join(parts))
    table = payload["parameters"]
    if not isinstance(table, dict):
        raise FormatError(f"{origin}: 'parameters' must be an object")
    pairs = {}
    for name, entry in table.items():
        if not isinstance(entry, dict) or "mean" not in entry:
            raise FormatError(f"{origin}: parameter {name} needs a 'mean'")
        if "sd" not in entry:
            raise FormatError(f"{origin}: sd omitted for parameter {name}")
        extra = set(entry) - {"mean", "sd"}
        if extra:
            raise FormatError(
                f"{origin}: unknown keys for {name}: {', '.join(sorted(extra))}")
        pairs[name] = (float(entry["mean"]), float(entry["sd"]))
    try:
        return GaussianParamSet(
            area_label=str(payload["area_label"]),
            eta=float(payload["eta"]),
            x0=float(payload["x0"]),
            parameters=pairs,
        )
    except (FormatError, ValidationError) as exc:
        raise type(exc)(f"{origin}: {exc}") from exc


def save_trace(trace, path):
    """Write an IVTrace CSV (state column included when present)."""
    has_state = trace.state is not None
    header = ["time", "voltage", "current"] + (["state"] if has_state else [])
    lines = [",".join(header)]
    for i in range(len(trace)):
        row = [repr(float(trace.time[i])), repr(float(trace.voltage[i])),
               repr(float(trace.current[i]))]
        if has_state:
            row.append(repr(float(trace.state[i])))
        lines.append(",".join(row))
    _atomic_write(path, "\n".join(lines) + "\n")


def load_trace(path):
    """Read an IVTrace CSV (header ``time,voltage,current`` with an
    optional ``state`` column).

    Raises FormatError for header/shape problems (with the offending
    line) and ValidationError for non-monotonic or non-uniform time,
    non-finite values, or state outside [0, 1].
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header not in (["time", "voltage", "current"],
                          ["time", "voltage", "current", "state"]):
            raise FormatError(
                f"{path}: line 1: expected header 'time,voltage,current[,state]',"
                f" got '{','.join(header)}'")
        ncol = len(header)
        columns = [[] for _ in range(ncol)]
        for rownum, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != ncol:
                raise FormatError(
                    f"{path}: line {rownum + 1}: expected {ncol} fields, got {len(row)}")
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise FormatError(
                    f"{path}: line {rownum + 1}: non-numeric value") from None
            for c, val in enumerate(values):
                columns[c].append(val)
    if not columns[0]:
        raise ValidationError(f"{path}: no data rows")
    t = np.array(columns[0])
    v = np.array(columns[1])
    i = np.array(columns[2])
    x = np.array(columns[3]) if ncol == 4 else None
    for name, col in (("time", t), ("voltage", v), ("current", i)):
        if not np.all(np.isfinite(col)):
            bad = int(np.argmin(np.isfinite(col))) + 1
            raise ValidationError(f"{path}: non-finite {name} at row {bad}")
    diffs = np.diff(t)
    if np.any(diffs <= 0.0):
        bad = int(np.argmax(diffs <= 0.0)) + 2
        raise ValidationError(f"{path}: non-monotonic at row {bad}")
    if len(t) > 1:
        dt = float(t[1] - t[0])
        if np.any(np.abs(diffs - dt) > 1e-6 * dt):
            bad = int(np.argmax(np.abs(diffs - dt) > 1e-6 * dt)) + 2
            raise ValidationError(f"{path}: non-uniform time step at row {bad}")
    else:
        dt = float(t[0]) if t[0] > 0 else 1.0
    if x is not None:
        if not np.all(np.isfinite(x)):
            bad = int(np.argmin(np.isfinite(x))) + 1
            raise ValidationError(f"{path}: non-finite state at row {bad}")
        if np.any((x < 0.0) | (x > 1.0)):
            raise ValidationError(f"{path}: state outside [0, 1]")
    return IVTrace(dt=dt, time=t, voltage=v, current=i, state=x)


def load_measurements(path, area_label=None):
    """Load measurement CSVs into a MeasurementSet.

    ``path`` may be a single CSV file or a directory of them (read in
    sorted name order, one trace per file).  The area label defaults to
    the directory name / file stem.
    """
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.csv"))
        if not files:
            raise ValidationError(f"{path}: no CSV files found")
        label = area_label or p.name
        return MeasurementSet(label, [load_trace(f) for f in files])
    label = area_label or p.stem
    return MeasurementSet(label, [load_trace(p)])


def bundled_areas():
    """Labels of the parameter distributions shipped with the package,
    ordered small to large device area."""
    return _AREA_LABELS


def load_bundled(area_label):
    """Load one of the bundled per-area Gaussian parameter sets."""
    if area_label not in _AREA_LABELS:
        raise DomainError(
            f"unknown area label {area_label!r}; expected one of {_AREA_LABELS}")
    ref = resources.files("ifmem").joinpath(f"data/params_{area_label}.json")
    with resources.as_file(ref) as fp:
        return load_params(fp)


def load_all_bundled():
    """All three bundled sets, ordered small to large area."""
    return [load_bundled(label) for label in _AREA_LABELS]


def _atomic_write(path, text):
    path = str(path)
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
