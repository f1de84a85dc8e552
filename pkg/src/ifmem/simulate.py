"""Fixed-step integration of the state ODE over a sampled waveform.

The integrator is explicit Euler with the voltage held constant over
each step (sample-and-hold), which makes every trace exactly
reproducible from the sampled waveform alone.  State is clamped to
[0, 1] after each step unless disabled.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .errors import DomainError, NumericalError
from .waveform import SampledWaveform, sample


@dataclass(frozen=True)
class SimulationConfig:
    """Integration settings.

    ``dt`` is the sampling step used when a sweep spec has to be
    discretized by higher-level drivers (ensembles, CLI); ``simulate``
    itself always steps on the waveform's own grid.  ``transmission``
    selects the current equation: the interface branches or the legacy
    MIM sinh equation (which needs ``mim`` parameters).
    """

    dt: float = None
    clamp_state: bool = True
    transmission: str = "interface"
    mim: model.LegacyMimParams = None

    def __post_init__(self):
        if self.dt is not None and (not np.isfinite(self.dt) or self.dt <= 0.0):
            raise DomainError("dt must be > 0")
        if self.transmission not in ("interface", "legacy_mim"):
            raise DomainError("transmission must be 'interface' or 'legacy_mim'")
        if self.transmission == "legacy_mim" and self.mim is None:
            raise DomainError("legacy_mim transmission requires mim parameters")


@dataclass(frozen=True)
class IVTrace:
    """Aligned time/voltage/current/state samples on a uniform grid.

    The state column is absent (None) for measured traces.
    """

    dt: float
    time: np.ndarray
    voltage: np.ndarray
    current: np.ndarray
    state: np.ndarray = None

    def __post_init__(self):
        t = np.asarray(self.time, dtype=float)
        v = np.asarray(self.voltage, dtype=float)
        i = np.asarray(self.current, dtype=float)
        if not (len(t) == len(v) == len(i)) or len(t) == 0:
            raise DomainError("trace columns must be non-empty and equal length")
        x = self.state
        if x is not None:
            x = np.asarray(x, dtype=float)
            if len(x) != len(t):
                raise DomainError("state column length mismatch")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "time", t)
        object.__setattr__(self, "voltage", v)
        object.__setattr__(self, "current", i)
        object.__setattr__(self, "state", x)

    def __len__(self):
        return len(self.time)


def simulate(params, waveform, cfg=None):
    """Integrate the state ODE over a sampled waveform.

    x[0] = params.x0 and x[i+1] = x[i] + dt * dxdt(v[i], x[i]); the
    current at sample i uses the pre-update state.  Deterministic:
    identical inputs produce bit-identical traces.
    """
    cfg = cfg or SimulationConfig()
    if not isinstance(waveform, SampledWaveform):
        raise DomainError("waveform must be a SampledWaveform")
    if cfg.dt is not None and cfg.dt != waveform.dt:
        raise DomainError("config dt disagrees with the waveform grid")

    v = waveform.voltages
    dt = waveform.dt
    n = len(v)

    # Voltage-dependent factors do not involve the state, so they are
    # precomputed for the whole sweep; the sequential loop below only
    # evaluates the state window.
    drive = params.eta * model.threshold_rate(params, v)
    drive_dt = (drive * dt).tolist()

    eax_p = params.alpha_p
    eax_n = params.alpha_n
    x_p = params.x_p
    x_n = params.x_n
    inv_one_minus_xp = 1.0 / (1.0 - x_p)
    inv_xn = 1.0 / x_n if x_n > 0.0 else None
    clamp = cfg.clamp_state
    exp = math.exp

    x = np.empty(n)
    xi = params.x0
    x[0] = xi
    for i in range(n - 1):
        d = drive_dt[i]
        if d > 0.0:
            if xi < x_p:
                f = 1.0
            else:
                f = exp(-eax_p * (xi - x_p)) * ((x_p - xi) * inv_one_minus_xp + 1.0)
        elif d < 0.0:
            if xi > x_n:
                f = 1.0
            elif inv_xn is None:
                f = 0.0
            else:
                f = exp(eax_n * (xi - x_n)) * (xi * inv_xn)
        else:
            f = 1.0
        xi = xi + d * f
        if clamp:
            if xi < 0.0:
                xi = 0.0
            elif xi > 1.0:
                xi = 1.0
        elif not math.isfinite(xi):
            raise NumericalError(f"state became non-finite at sample {i + 1}")
        x[i + 1] = xi

    with np.errstate(over="ignore", invalid="ignore"):
        if cfg.transmission == "legacy_mim":
            xc = np.clip(x, 0.0, 1.0) if not clamp else x
            current = model.legacy_mim_current(cfg.mim, v, xc)
        else:
            current = (model.lrs_current(params, v) * x
                       + model.hrs_current(params, v) * (1.0 - x))
    if not np.all(np.isfinite(current)):
        bad = int(np.argmin(np.isfinite(current)))
        raise NumericalError(f"current became non-finite at sample {bad}")

    return IVTrace(dt=dt, time=np.arange(n) * dt, voltage=v,
                   current=current, state=x)


def convergence_check(params, spec, dt, cfg=None):
    """Integrator-accuracy probe: simulate at dt and dt/2 and return the
    worst relative current deviation over the shared grid points."""
    if not np.isfinite(dt) or dt <= 0.0:
        raise DomainError("dt must be > 0")
    base = cfg or SimulationConfig()
    coarse = simulate(params, sample(spec, dt), base)
    fine = simulate(params, sample(spec, dt / 2.0), base)
    i_coarse = coarse.current
    i_fine = fine.current
    scale = float(np.max(np.abs(i_fine))) + 1e-15
    worst = 0.0
    for i in range(len(i_coarse)):
        j = 2 * i
        if j >= len(i_fine):
            break
        dev = abs(i_coarse[i] - i_fine[j]) / scale
        if dev > worst:
            worst = dev
    return worst
