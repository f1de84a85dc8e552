import numpy as np
import pytest

from ifmem import (IVTrace, load_all_bundled, sample, simulate,
                   standard_sweep)
from ifmem.waveform import REFERENCE_DURATION


@pytest.fixture(scope="session")
def bundled_sets():
    return load_all_bundled()


@pytest.fixture(scope="session")
def mean_models(bundled_sets):
    return {s.area_label: s.mean_model() for s in bundled_sets}


@pytest.fixture(scope="session")
def reference_sweep():
    return standard_sweep(1.0, -2.0, REFERENCE_DURATION)


@pytest.fixture(scope="session")
def reference_waveform(reference_sweep):
    return sample(reference_sweep, REFERENCE_DURATION / 10000)


def noisy_copy(trace, rel_noise, rng):
    """Trace with multiplicative current noise, as a measured-style
    trace (no state column)."""
    noisy = trace.current * (1.0 + rel_noise * rng.standard_normal(len(trace)))
    return IVTrace(dt=trace.dt, time=trace.time, voltage=trace.voltage,
                   current=noisy)


def strip_state(trace):
    return IVTrace(dt=trace.dt, time=trace.time, voltage=trace.voltage,
                   current=trace.current)
