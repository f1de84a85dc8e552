import numpy as np
import pytest

from ifmem import (LegacyMimParams, ModelParameters, SampledWaveform,
                   SimulationConfig, convergence_check, sample, simulate,
                   standard_sweep, state_derivative)
from ifmem.errors import DomainError, NumericalError

from test_model import small_device


def short_waveform(duration=4.0, steps=400):
    return sample(standard_sweep(1.0, -2.0, duration), duration / steps)


class TestSimulate:
    def test_state_constant_without_rate(self):
        p = small_device(A_p=0.0, A_n=0.0, x0=0.3)
        trace = simulate(p, short_waveform())
        np.testing.assert_array_equal(trace.state, np.full(len(trace), 0.3))

    def test_zero_waveform_is_silent(self):
        p = small_device(x0=0.4)
        wf = SampledWaveform(dt=0.01, voltages=np.zeros(200))
        trace = simulate(p, wf)
        assert np.all(trace.current == 0.0)
        assert np.all(trace.state == 0.4)

    def test_current_vanishes_at_zero_volt_samples(self):
        trace = simulate(small_device(), short_waveform())
        zero = trace.voltage == 0.0
        assert zero.any()
        assert np.all(trace.current[zero] == 0.0)

    def test_state_stays_inside_unit_interval(self):
        trace = simulate(small_device(x0=1.0), short_waveform(duration=40.0))
        assert trace.state.min() >= 0.0
        assert trace.state.max() <= 1.0

    def test_deterministic(self):
        p = small_device()
        wf = short_waveform()
        a, b = simulate(p, wf), simulate(p, wf)
        np.testing.assert_array_equal(a.current, b.current)
        np.testing.assert_array_equal(a.state, b.state)

    def test_matches_scalar_update_rule(self):
        # independent re-integration through the public scalar ops
        p = small_device()
        wf = short_waveform(steps=150)
        trace = simulate(p, wf)
        x = p.x0
        for i in range(len(wf) - 1):
            assert trace.state[i] == pytest.approx(x, rel=1e-13, abs=1e-300)
            x = x + wf.dt * state_derivative(p, float(wf.voltages[i]), x)
            x = min(max(x, 0.0), 1.0)

    def test_unclamped_overshoot_bounded_by_step(self):
        p = small_device(x0=0.0)
        wf = short_waveform(duration=40.0, steps=200)
        cfg = SimulationConfig(clamp_state=False)
        trace = simulate(p, wf, cfg)
        max_rate = np.max(np.abs([state_derivative(p, float(v), 0.5)
                                  for v in wf.voltages]))
        assert trace.state.min() >= -wf.dt * max_rate
        assert trace.state.max() <= 1.0 + wf.dt * max_rate

    def test_mirrored_state_trajectory(self):
        # flipping eta, negating the waveform and swapping the rate /
        # threshold pairs drives the state identically
        p = small_device(V_p=0.1, V_n=0.2, x0=0.2)
        wf = short_waveform()
        mirrored_params = ModelParameters(**{
            **p.as_dict(), "A_p": p.A_n, "A_n": p.A_p,
            "V_p": p.V_n, "V_n": p.V_p, "eta": -p.eta})
        mirrored_wf = SampledWaveform(dt=wf.dt, voltages=-wf.voltages)
        a = simulate(p, wf)
        b = simulate(mirrored_params, mirrored_wf)
        np.testing.assert_array_equal(a.state, b.state)

    def test_mirrored_current_with_odd_transmission(self):
        # with the polarity-split sinh transmission the full trace
        # mirrors exactly once the amplitudes are swapped as well
        p = small_device(V_p=0.1, V_n=0.2, x0=0.2)
        wf = short_waveform()
        mim = LegacyMimParams(a1=2e-4, a2=6e-4, b=2.5)
        mim_swapped = LegacyMimParams(a1=6e-4, a2=2e-4, b=2.5)
        mirrored_params = ModelParameters(**{
            **p.as_dict(), "A_p": p.A_n, "A_n": p.A_p,
            "V_p": p.V_n, "V_n": p.V_p, "eta": -p.eta})
        a = simulate(p, wf, SimulationConfig(transmission="legacy_mim", mim=mim))
        b = simulate(mirrored_params,
                     SampledWaveform(dt=wf.dt, voltages=-wf.voltages),
                     SimulationConfig(transmission="legacy_mim", mim=mim_swapped))
        np.testing.assert_allclose(a.current, -b.current, rtol=1e-15, atol=0.0)

    def test_nonfinite_state_reported_with_sample_index(self):
        p = small_device()
        wf = SampledWaveform(dt=1.0, voltages=np.array([800.0, 800.0, 0.0]))
        with pytest.raises(NumericalError, match="sample"):
            simulate(p, wf, SimulationConfig(clamp_state=False))

    def test_nonfinite_current_reported_with_sample_index(self):
        p = small_device()
        wf = SampledWaveform(dt=1.0, voltages=np.array([800.0, 800.0, 0.0]))
        with pytest.raises(NumericalError, match="sample"):
            simulate(p, wf)

    def test_config_dt_must_match_waveform(self):
        wf = short_waveform()
        with pytest.raises(DomainError):
            simulate(small_device(), wf, SimulationConfig(dt=wf.dt * 2))

    def test_legacy_mim_requires_parameters(self):
        with pytest.raises(DomainError):
            SimulationConfig(transmission="legacy_mim")

    def test_trace_layout(self):
        wf = short_waveform(steps=50)
        trace = simulate(small_device(), wf)
        assert len(trace) == len(wf)
        np.testing.assert_array_equal(trace.time, np.arange(len(wf)) * wf.dt)
        np.testing.assert_array_equal(trace.voltage, wf.voltages)


class TestConvergenceCheck:
    def test_zero_rate_has_zero_deviation(self):
        p = small_device(A_p=0.0, A_n=0.0, x0=0.25)
        spec = standard_sweep(1.0, -2.0, 4.0)
        assert convergence_check(p, spec, 0.01) == 0.0

    def test_deviation_decreases_under_halving(self):
        p = small_device()
        spec = standard_sweep(1.0, -2.0, 4.0)
        devs = [convergence_check(p, spec, 4.0 / (500 * 2 ** k))
                for k in range(3)]
        assert devs[0] > devs[1] > devs[2]

    def test_first_order_richardson_ratio(self):
        p = small_device()
        spec = standard_sweep(1.0, -2.0, 4.0)
        devs = [convergence_check(p, spec, 4.0 / (500 * 2 ** k))
                for k in range(3)]
        for a, b in zip(devs, devs[1:]):
            assert 1.5 <= a / b <= 2.5

    def test_dt_precondition(self):
        with pytest.raises(DomainError):
            convergence_check(small_device(), standard_sweep(), 0.0)
