"""Compact-model equations for interface-type (Schottky-barrier) memristors.

The device is represented as two voltage-dependent transmission branches,
one for the low-resistance state (LRS) and one for the high-resistance
state (HRS), mixed by an internal state variable ``x`` in [0, 1].  Forward
bias is dominated by tunnelling in the LRS and thermionic emission in the
HRS; reverse bias swaps the two mechanisms.  State motion is driven by a
voltage-threshold rate function and damped by soft window functions near
the state boundaries.

All functions are pure and accept scalars or numpy arrays for the voltage
/ state arguments (scalar in, float out).
"""

from dataclasses import dataclass, fields

import numpy as np
from scipy.constants import e as _Q_COULOMB, k as _K_BOLTZMANN

from .errors import DomainError

# Serialization / fitting / sampling order of the 16 theta fields.
PARAMETER_NAMES = (
    "A_p", "A_n", "V_p", "V_n",
    "alpha_p", "alpha_n", "x_p", "x_n",
    "g_max_p", "b_max_p", "g_max_n", "b_max_n",
    "g_min_p", "b_min_p", "g_min_n", "b_min_n",
)

# Display order used by text reports (varying block first, then the
# parameters that are held fixed across device areas).
REPORT_ORDER = (
    "A_n", "x_n", "alpha_n",
    "g_max_p", "b_max_p", "g_max_n", "b_max_n",
    "g_min_p", "b_min_p", "g_min_n", "b_min_n",
    "A_p", "V_p", "V_n", "x_p", "alpha_p",
)


def _check_finite(value, name):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _scalar_or_array(original, result):
    if np.ndim(original) == 0:
        return float(result)
    return result


@dataclass(frozen=True)
class ModelParameters:
    """Full parameter vector of the compact model.

    ``A_p``/``A_n`` set the state-change rate, ``V_p``/``V_n`` the
    voltage thresholds, ``x_p``/``x_n`` the window onset points and
    ``alpha_p``/``alpha_n`` the window damping.  The eight ``g``/``b``
    pairs are the magnitudes/shapes of the four transmission branches
    (LRS/HRS x forward/reverse).  ``eta`` is the state-motion polarity
    and ``x0`` the initial state.
    """

    A_p: float
    A_n: float
    V_p: float
    V_n: float
    alpha_p: float
    alpha_n: float
    x_p: float
    x_n: float
    g_max_p: float
    b_max_p: float
    g_max_n: float
    b_max_n: float
    g_min_p: float
    b_min_p: float
    g_min_n: float
    b_min_n: float
    eta: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not np.isfinite(v):
                raise DomainError(f"parameter {f.name} must be a finite number")
            object.__setattr__(self, f.name, float(v))
        for name in PARAMETER_NAMES:
            if name in ("x_p", "x_n"):
                continue
            if getattr(self, name) < 0.0:
                raise DomainError(f"parameter {name} must be >= 0")
        # Onsets live in [0, 1); 0 is admitted so that sensitivity probes
        # can scale an onset all the way down, 1 would zero the w_p
        # denominator.
        for name in ("x_p", "x_n"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"parameter {name} must lie in [0, 1)")
        if self.eta not in (1.0, -1.0):
            raise DomainError("eta must be exactly +1 or -1")
        if not 0.0 <= self.x0 <= 1.0:
            raise DomainError("x0 must lie in [0, 1]")

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PhysicalSchottkyParams:
    """Physical thermionic-emission parameters (junction area in m^2,
    Richardson constant in A m^-2 K^-2, temperature in K, barrier height
    in eV, dimensionless ideality factor >= 1)."""

    area: float
    richardson: float
    temperature: float
    barrier_height: float
    ideality: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v) or v <= 0.0:
                raise DomainError(f"{f.name} must be finite and > 0")
        if self.ideality < 1.0:
            raise DomainError("ideality must be >= 1")


@dataclass(frozen=True)
class SimmonsParams:
    """Generalized-barrier tunnelling: I = beta * sinh(alpha * V)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise DomainError("alpha and beta must be finite")
        if self.beta < 0.0:
            raise DomainError("beta must be >= 0")


@dataclass(frozen=True)
class LegacyMimParams:
    """Polarity-split MIM sinh transmission: I = a1|a2 * x * sinh(b * V)."""

    a1: float
    a2: float
    b: float

    def __post_init__(self):
        for name in ("a1", "a2", "b"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.a1 < 0.0 or self.a2 < 0.0:
            raise DomainError("a1 and a2 must be >= 0")


def lrs_current(params, v):
    """Low-resistance-state transmission branch.

    Tunnelling sinh characteristic in forward bias, saturating
    Schottky-like exponential in reverse bias.  Both branches vanish at
    v = 0, so the function is continuous there.
    """
    arr = _check_finite(v, "voltage")
    with np.errstate(over="ignore", invalid="ignore"):
        pos = params.g_max_p * np.sinh(params.b_max_p * arr)
        neg = params.g_max_n * (1.0 - np.exp(-params.b_max_n * arr))
        out = np.where(arr >= 0.0, pos, neg)
    return _scalar_or_array(v, out)


def hrs_current(params, v):
    """High-resistance-state transmission branch (mirror of
    :func:`lrs_current`: Schottky-like forward, tunnelling reverse)."""
    arr = _check_finite(v, "voltage")
    with np.errstate(over="ignore", invalid="ignore"):
        pos = params.g_min_p * (1.0 - np.exp(-params.b_min_p * arr))
        neg = params.g_min_n * np.sinh(params.b_min_n * arr)
        out = np.where(arr >= 0.0, pos, neg)
    return _scalar_or_array(v, out)


def instantaneous_current(params, v, x):
    """Device current: state-weighted mix of the two branches,
    lrs * x + hrs * (1 - x)."""
    xarr = _check_finite(x, "state")
    if np.any(xarr < 0.0) or np.any(xarr > 1.0):
        raise DomainError("state must lie in [0, 1]")
    out = lrs_current(params, v) * xarr + hrs_current(params, v) * (1.0 - xarr)
    return _scalar_or_array(x if np.ndim(x) else v, out)


def threshold_rate(params, v):
    """Voltage-threshold rate g(v) driving state motion.

    Zero inside [-V_n, V_p]; grows exponentially beyond either
    threshold, positive above V_p and negative below -V_n.
    """
    arr = _check_finite(v, "voltage")
    with np.errstate(over="ignore", invalid="ignore"):
        above = params.A_p * (np.exp(arr) - np.exp(params.V_p))
        below = -params.A_n * (np.exp(-arr) - np.exp(params.V_n))
        out = np.where(arr > params.V_p, above,
                       np.where(arr < -params.V_n, below, 0.0))
    return _scalar_or_array(v, out)


def motion_window(params, x, direction):
    """Soft window f(x) damping state motion near the boundaries.

    ``direction`` is the sign of the state drive (eta * g): for upward
    motion the window is 1 below the onset x_p and decays to exactly 0
    at x = 1; for downward motion it is 1 above x_n and reaches exactly
    0 at x = 0.  A zero direction returns 1 (the drive is 0 anyway).
    """
    xarr = _check_finite(x, "state")
    if np.any(xarr < 0.0) or np.any(xarr > 1.0):
        raise DomainError("state must lie in [0, 1]")
    if direction > 0:
        wp = (params.x_p - xarr) / (1.0 - params.x_p) + 1.0
        damped = np.exp(-params.alpha_p * (xarr - params.x_p)) * wp
        out = np.where(xarr < params.x_p, 1.0, damped)
    elif direction < 0:
        if params.x_n > 0.0:
            wn = xarr / params.x_n
            damped = np.exp(params.alpha_n * (xarr - params.x_n)) * wn
        else:
            # onset at 0: only x = 0 falls in the damped branch, where
            # the hard floor applies
            damped = np.zeros_like(xarr)
        out = np.where(xarr > params.x_n, 1.0, damped)
    else:
        out = np.ones_like(xarr)
    return _scalar_or_array(x, out)


def state_derivative(params, v, x):
    """dx/dt = eta * g(v) * f(x), with the window picked by the
    direction the state is being driven."""
    drive = np.asarray(params.eta * threshold_rate(params, v))
    f_up = motion_window(params, x, +1)
    f_down = motion_window(params, x, -1)
    out = drive * np.where(drive > 0.0, f_up, np.where(drive < 0.0, f_down, 1.0))
    return _scalar_or_array(v if np.ndim(v) else x, out)


def schottky_reference_current(p, v):
    """Thermionic emission over a Schottky barrier,

    I = A A* T^2 exp(-q phi_B / (k_B T)) (exp(q V / (n k_B T)) - 1),

    with the barrier height supplied in eV.  Serves as the physical
    reference shape for the saturating-exponential compact branches.
    """
    arr = _check_finite(v, "voltage")
    if p.temperature <= 0.0:
        raise DomainError("temperature must be > 0")
    kt = _K_BOLTZMANN * p.temperature
    saturation = (p.area * p.richardson * p.temperature ** 2
                  * np.exp(-_Q_COULOMB * p.barrier_height / kt))
    with np.errstate(over="ignore"):
        out = saturation * (np.exp(_Q_COULOMB * arr / (p.ideality * kt)) - 1.0)
    return _scalar_or_array(v, out)


def simmons_reference_current(p, v):
    """Generalized-barrier tunnelling current, I = beta sinh(alpha V);
    odd in V."""
    arr = _check_finite(v, "voltage")
    with np.errstate(over="ignore"):
        out = p.beta * np.sinh(p.alpha * arr)
    return _scalar_or_array(v, out)


def legacy_mim_current(p, v, x):
    """Polarity-split MIM sinh transmission (alternate current equation
    for comparison runs): a1 x sinh(bV) forward, a2 x sinh(bV) reverse."""
    varr = _check_finite(v, "voltage")
    xarr = _check_finite(x, "state")
    if np.any(xarr < 0.0) or np.any(xarr > 1.0):
        raise DomainError("state must lie in [0, 1]")
    with np.errstate(over="ignore", invalid="ignore"):
        amp = np.where(varr >= 0.0, p.a1, p.a2)
        out = amp * xarr * np.sinh(p.b * varr)
    return _scalar_or_array(v if np.ndim(v) else x, out)
