"""Driving-voltage waveforms: piecewise-linear sweep specs and their
uniformly sampled form."""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FormatError

# CLI defaults for the standard characterization sweep.
DEFAULT_VMAX = 1.0
DEFAULT_VMIN = -2.0
DEFAULT_DURATION = 4.0

# Sweep length used by the analysis scripts and tests: slow enough that
# the bundled devices complete their full SET/RESET transition within
# one loop (the state relaxes back to the high-resistance branch before
# deep reverse bias), which is the regime the bundled parameter sets
# describe.  DC sweep timing is instrument-dependent, so it stays a
# user-settable input everywhere.
REFERENCE_DURATION = 60.0


@dataclass(frozen=True)
class SweepSpec:
    """Piecewise-linear voltage program given as (time, voltage) vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple((float(t), float(v)) for t, v in self.vertices)
        if len(verts) < 2:
            raise DomainError("a sweep needs at least 2 vertices")
        times = [t for t, _ in verts]
        if times[0] != 0.0:
            raise DomainError("first vertex time must be 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("vertex times must be strictly increasing")
        if not all(np.isfinite(t) and np.isfinite(v) for t, v in verts):
            raise DomainError("vertices must be finite")
        object.__setattr__(self, "vertices", verts)

    @property
    def duration(self):
        return self.vertices[-1][0]

    def to_json(self):
        return json.dumps([[t, v] for t, v in self.vertices])

    @classmethod
    def from_json(cls, text):
        try:
            pairs = json.loads(text)
            return cls(tuple((float(t), float(v)) for t, v in pairs))
        except (ValueError, TypeError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise FormatError(f"not a valid sweep JSON array: {exc}") from exc


@dataclass(frozen=True)
class SampledWaveform:
    """Uniformly sampled voltage sequence; sample i sits at time i * dt."""

    dt: float
    voltages: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.dt) or self.dt <= 0.0:
            raise DomainError("dt must be finite and > 0")
        v = np.asarray(self.voltages, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DomainError("voltages must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(v)):
            raise DomainError("voltages must be finite")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "voltages", v)

    @property
    def times(self):
        return np.arange(len(self.voltages)) * self.dt

    def __len__(self):
        return len(self.voltages)


def standard_sweep(v_max=DEFAULT_VMAX, v_min=DEFAULT_VMIN,
                   total_duration=DEFAULT_DURATION):
    """Four-segment sweep 0 -> v_max -> 0 -> v_min -> 0 at a single
    constant slew rate, so segment durations are proportional to their
    voltage spans."""
    if not (np.isfinite(v_max) and v_max > 0.0):
        raise DomainError("v_max must be > 0")
    if not (np.isfinite(v_min) and v_min < 0.0):
        raise DomainError("v_min must be < 0")
    if not (np.isfinite(total_duration) and total_duration > 0.0):
        raise DomainError("total_duration must be > 0")
    span = 2.0 * v_max + 2.0 * abs(v_min)
    slew = span / total_duration
    t1 = v_max / slew
    t2 = 2.0 * v_max / slew
    t3 = (2.0 * v_max + abs(v_min)) / slew
    return SweepSpec((
        (0.0, 0.0),
        (t1, v_max),
        (t2, 0.0),
        (t3, v_min),
        (total_duration, 0.0),
    ))


def sample(spec, dt):
    """Sample a sweep at t = 0, dt, 2dt, ... by linear interpolation.

    If the uniform grid misses the final vertex time by more than dt/2,
    one extra sample holding the final vertex voltage is appended so a
    closed sweep always ends on its closing value.
    """
    if not np.isfinite(dt) or dt <= 0.0:
        raise DomainError("dt must be > 0")
    total = spec.duration
    if dt > total:
        raise DomainError("dt must not exceed the sweep duration")
    times = np.array([t for t, _ in spec.vertices])
    volts = np.array([v for _, v in spec.vertices])
    n = int(np.floor(total / dt + 1e-9))
    grid = np.arange(n + 1) * dt
    sampled = np.interp(grid, times, volts)
    if total - grid[-1] > dt / 2.0:
        sampled = np.append(sampled, volts[-1])
    return SampledWaveform(dt=dt, voltages=sampled)
