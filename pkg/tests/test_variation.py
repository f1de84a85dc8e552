import numpy as np
import pytest

from ifmem import (GaussianParamSet, SimulationConfig, SweepSpec,
                   combined_averages, ensemble, load_bundled, mpe,
                   rank_parameters, sample, sample_parameters,
                   sensitivity_search, simulate, standard_sweep, trend_check)
from ifmem.errors import DistributionError, DomainError
from ifmem.model import PARAMETER_NAMES
from ifmem.variation import (SENSITIVITY_PARAMETERS, SensitivityReport,
                             MPE_TARGET, MPE_TOLERANCE)

from test_model import small_device
from ifmem.waveform import REFERENCE_DURATION


def degenerate_set(model, label="test"):
    params = {n: (getattr(model, n), 0.0) for n in PARAMETER_NAMES}
    return GaussianParamSet(label, model.eta, model.x0, params)


class TestSampleParameters:
    def test_zero_sd_returns_means_exactly(self):
        model = small_device()
        dist = degenerate_set(model)
        for seed in (0, 1, 12345):
            assert sample_parameters(dist, seed) == model

    def test_deterministic_given_seed(self, bundled_sets):
        dist = bundled_sets[0]
        assert sample_parameters(dist, 99) == sample_parameters(dist, 99)

    def test_draws_respect_invariants(self, bundled_sets):
        # the g_max_p spread is far wider than its mean, so naive draws
        # would often go negative; rejection must keep them valid
        dist = bundled_sets[0]
        for seed in range(200):
            p = sample_parameters(dist, seed)
            assert p.g_max_p >= 0.0
            assert p.g_max_n >= 0.0

    def test_statistical_mean_recovery(self, bundled_sets):
        # 10^4 draws of b_max_n: sample mean within 3 standard errors
        dist = bundled_sets[0]
        mean, sd = dist.parameters["b_max_n"]
        draws = np.array([sample_parameters(dist, seed).b_max_n
                          for seed in range(10000)])
        stderr = sd / np.sqrt(len(draws))
        assert abs(draws.mean() - mean) < 3.0 * stderr

    def test_infeasible_distribution_names_parameter(self):
        model = small_device()
        params = {n: (getattr(model, n), 0.0) for n in PARAMETER_NAMES}
        params["x_n"] = (0.5, 1e9)  # valid draws have probability ~4e-10
        dist = GaussianParamSet("hopeless", 1.0, 0.0, params)
        with pytest.raises(DistributionError, match="x_n"):
            sample_parameters(dist, 0)


class TestEnsemble:
    def test_degenerate_ensemble_equals_mean_simulation(self):
        model = small_device()
        dist = degenerate_set(model)
        spec = standard_sweep(1.0, -2.0, 4.0)
        cfg = SimulationConfig(dt=0.01)
        traces = ensemble(dist, 1, spec, cfg, seed=3)
        reference = simulate(model, sample(spec, 0.01), cfg)
        np.testing.assert_array_equal(traces[0].current, reference.current)

    def test_same_seed_reproduces_members(self, bundled_sets):
        spec = standard_sweep(1.0, -2.0, 4.0)
        cfg = SimulationConfig(dt=0.02)
        a = ensemble(bundled_sets[0], 5, spec, cfg, seed=11)
        b = ensemble(bundled_sets[0], 5, spec, cfg, seed=11)
        for ta, tb in zip(a, b):
            np.testing.assert_array_equal(ta.current, tb.current)

    def test_members_all_pinched(self, bundled_sets):
        spec = standard_sweep(1.0, -2.0, 4.0)
        cfg = SimulationConfig(dt=0.01)
        for trace in ensemble(bundled_sets[0], 10, spec, cfg, seed=5):
            zero = trace.voltage == 0.0
            assert np.all(trace.current[zero] == 0.0)
            assert trace.state.min() >= 0.0 and trace.state.max() <= 1.0

    def test_size_precondition(self, bundled_sets):
        with pytest.raises(DomainError):
            ensemble(bundled_sets[0], 0, standard_sweep(),
                     SimulationConfig(dt=0.01), seed=0)


@pytest.fixture(scope="module")
def quick_cfg():
    duration = REFERENCE_DURATION
    return standard_sweep(1.0, -2.0, duration), SimulationConfig(dt=duration / 1500)


class TestSensitivitySearch:
    def test_returned_deltas_hit_target_band(self, quick_cfg):
        spec, cfg = quick_cfg
        model = small_device()
        report = sensitivity_search(model, spec, cfg)
        waveform = sample(spec, cfg.dt)
        reference = simulate(model, waveform, cfg)
        from dataclasses import replace
        checked = 0
        for name, (dec, inc) in report.entries.items():
            for value, sign in ((dec, -1.0), (inc, +1.0)):
                if value is None:
                    continue
                varied = replace(model, **{
                    name: getattr(model, name) * (1.0 + sign * value / 100.0)})
                err = mpe(simulate(varied, waveform, cfg), reference)
                assert abs(err - MPE_TARGET) <= MPE_TOLERANCE
                checked += 1
        assert checked >= 10

    def test_unexercised_parameters_hit_cutoff(self):
        # a forward-only sweep with eta=+1 never drives the state down,
        # so the downward window never acts
        spec = SweepSpec(((0.0, 0.0), (1.0, 1.0), (2.0, 0.0)))
        cfg = SimulationConfig(dt=0.002)
        model = small_device(x0=0.0, eta=1.0)
        trace = simulate(model, sample(spec, cfg.dt), cfg)
        assert np.all(np.diff(trace.state) >= 0.0)  # state never drops
        report = sensitivity_search(model, spec, cfg)
        assert report.entries["alpha_n"] == (None, None)
        assert report.entries["A_n"] == (None, None)

    def test_scale_invariance(self, quick_cfg):
        # scaling every branch magnitude by a power of two rescales all
        # currents exactly, so the search must return identical values
        spec, cfg = quick_cfg
        model = small_device()
        scaled = small_device(g_max_p=model.g_max_p * 4, g_max_n=model.g_max_n * 4,
                              g_min_p=model.g_min_p * 4, g_min_n=model.g_min_n * 4)
        a = sensitivity_search(model, spec, cfg)
        b = sensitivity_search(scaled, spec, cfg)
        assert a.entries == b.entries

    def test_thresholds_excluded(self, quick_cfg):
        spec, cfg = quick_cfg
        report = sensitivity_search(small_device(), spec, cfg)
        assert "V_p" not in report.entries
        assert "V_n" not in report.entries
        assert set(report.entries) == set(SENSITIVITY_PARAMETERS)

    def test_dt_required(self):
        with pytest.raises(DomainError):
            sensitivity_search(small_device(), standard_sweep(),
                               SimulationConfig())


class TestReportAggregation:
    def test_average_counts_cutoff_as_hundred(self):
        report = SensitivityReport({"A_p": (50.0, None), "A_n": (10.0, 20.0)})
        assert report.average("A_p") == 75.0
        assert report.average("A_n") == 15.0
        assert report.ranking() == ["A_n", "A_p"]

    def test_combined_averages(self):
        a = SensitivityReport({"A_p": (10.0, 20.0), "A_n": (None, None)})
        b = SensitivityReport({"A_p": (30.0, 40.0), "A_n": (50.0, None)})
        combined = combined_averages([a, b])
        assert combined["A_p"] == 25.0
        assert combined["A_n"] == pytest.approx((100 + 100 + 50 + 100) / 4)
        assert rank_parameters([a, b]) == ["A_p", "A_n"]

    def test_report_dict_shape(self):
        report = SensitivityReport({"A_p": (None, 12.5)})
        payload = report.to_dict()
        assert payload["parameters"]["A_p"]["decrease_percent"] is None
        assert payload["parameters"]["A_p"]["increase_percent"] == 12.5


class TestTrendCheck:
    def test_published_classifications(self, bundled_sets):
        trends = trend_check(bundled_sets)
        for name in ("A_n", "alpha_n", "b_min_n", "x_n"):
            assert trends[name] == "decreasing", name
        for name in ("g_min_p", "g_min_n", "b_min_p"):
            assert trends[name] == "increasing", name
        for name in ("A_p", "alpha_p", "x_p", "V_p", "V_n"):
            assert trends[name] == "flat", name

    def test_identical_sets_are_flat(self, bundled_sets):
        trends = trend_check([bundled_sets[0], bundled_sets[0]])
        assert set(trends.values()) == {"flat"}

    def test_needs_two_sets(self, bundled_sets):
        with pytest.raises(DomainError):
            trend_check([bundled_sets[0]])
