import numpy as np
import pytest

from ifmem import (GaussianParamSet, IVTrace, bundled_areas, load_all_bundled,
                   load_bundled, load_measurements, load_params, load_trace,
                   save_params, save_trace)
from ifmem.errors import DomainError, FormatError, ValidationError

from test_model import small_device

# Published per-area parameter table, re-typed here independently of the
# bundled fixture files.
PUBLISHED = {
    "10um": {
        "A_n": (2.66e-2, 1.70e-3), "x_n": (1.43e-1, 0.0),
        "alpha_n": (7.01e-1, 3.75e-1),
        "g_max_p": (4.34e-4, 1.13e-2), "b_max_p": (4.99, 1.16e-3),
        "g_max_n": (8.00e-6, 1.27e-6), "b_max_n": (6.27, 1.35e-1),
        "g_min_p": (3.14e-2, 6.43e-5), "b_min_p": (2.13e-3, 1.40e-1),
        "g_min_n": (1.50e-5, 9.75e-7), "b_min_n": (3.30, 3.25e-1),
    },
    "32um": {
        "A_n": (2.57e-2, 2.40e-4), "x_n": (1.34e-1, 0.0),
        "alpha_n": (2.76e-1, 3.84e-1),
        "g_max_p": (6.77e-4, 9.69e-3), "b_max_p": (4.96, 1.46e-2),
        "g_max_n": (4.50e-5, 1.50e-4), "b_max_n": (5.79, 1.52e-1),
        "g_min_p": (5.99e-2, 3.36e-4), "b_min_p": (3.29e-2, 4.40e-1),
        "g_min_n": (3.32e-4, 1.25e-5), "b_min_n": (2.56, 1.67e-1),
    },
    "100um": {
        "A_n": (2.43e-2, 1.88e-3), "x_n": (9.87e-2, 0.0),
        "alpha_n": (2.50e-1, 2.22e-1),
        "g_max_p": (6.16e-4, 1.12e-2), "b_max_p": (5.19, 1.15e-2),
        "g_max_n": (3.30e-5, 4.63e-5), "b_max_n": (6.06, 2.31e-2),
        "g_min_p": (8.55e-2, 9.26e-5), "b_min_p": (6.88e-2, 9.30e-2),
        "g_min_n": (1.67e-3, 7.14e-6), "b_min_n": (2.12, 5.54e-2),
    },
}
FIXED_ACROSS_AREAS = {
    "A_p": (7.10e-2, 0.0), "V_p": (0.0, 0.0), "V_n": (0.0, 0.0),
    "x_p": (1.10e-1, 0.0), "alpha_p": (9.20, 0.0),
}


class TestBundledFixtures:
    def test_area_ordering(self):
        assert bundled_areas() == ("10um", "32um", "100um")

    @pytest.mark.parametrize("label", ["10um", "32um", "100um"])
    def test_values_match_publication_exactly(self, label):
        gset = load_bundled(label)
        expected = {**PUBLISHED[label], **FIXED_ACROSS_AREAS}
        assert gset.parameters == expected
        assert gset.eta == 1.0
        assert gset.x0 == 0.0

    def test_unknown_label(self):
        with pytest.raises(DomainError):
            load_bundled("55um")

    def test_mean_model_round_trip(self):
        gset = load_bundled("10um")
        model = gset.mean_model()
        assert model.A_n == 2.66e-2
        assert model.b_min_n == 3.30


class TestParamsJson:
    def test_model_round_trip(self, tmp_path):
        p = small_device(x0=0.25, eta=-1.0)
        path = tmp_path / "p.json"
        save_params(p, path)
        assert load_params(path) == p

    def test_gaussian_round_trip(self, tmp_path):
        gset = load_bundled("32um")
        path = tmp_path / "g.json"
        save_params(gset, path)
        assert load_params(path) == gset

    def test_missing_key_listed(self, tmp_path):
        p = small_device()
        path = tmp_path / "p.json"
        save_params(p, path)
        payload = path.read_text().replace('"A_n"', '"A_misnamed"')
        path.write_text(payload)
        with pytest.raises(FormatError, match="A_n"):
            load_params(path)

    def test_sd_omitted_names_parameter(self, tmp_path):
        path = tmp_path / "g.json"
        save_params(load_bundled("10um"), path)
        payload = path.read_text().replace(
            '"b_min_n": {\n      "mean": 3.3,\n      "sd": 0.325\n    }',
            '"b_min_n": {\n      "mean": 3.3\n    }')
        assert '"sd": 0.325' not in payload
        path.write_text(payload)
        with pytest.raises(FormatError, match="b_min_n"):
            load_params(path)

    def test_negative_magnitude_is_validation_error(self, tmp_path):
        p = small_device()
        path = tmp_path / "p.json"
        save_params(p, path)
        path.write_text(path.read_text().replace('"g_max_p": 0.000434',
                                                 '"g_max_p": -0.000434'))
        with pytest.raises(ValidationError, match="g_max_p"):
            load_params(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("not json at all")
        with pytest.raises(FormatError):
            load_params(path)


class TestTraceCsv:
    def make_trace(self, with_state=True):
        n = 7
        t = np.arange(n) * 0.125
        v = np.linspace(0, 1, n)
        i = np.sin(v) * 1e-3
        x = np.linspace(0, 0.9, n) if with_state else None
        return IVTrace(dt=0.125, time=t, voltage=v, current=i, state=x)

    def test_round_trip_with_state(self, tmp_path):
        trace = self.make_trace()
        path = tmp_path / "t.csv"
        save_trace(trace, path)
        loaded = load_trace(path)
        np.testing.assert_array_equal(loaded.time, trace.time)
        np.testing.assert_array_equal(loaded.voltage, trace.voltage)
        np.testing.assert_array_equal(loaded.current, trace.current)
        np.testing.assert_array_equal(loaded.state, trace.state)

    def test_round_trip_without_state(self, tmp_path):
        trace = self.make_trace(with_state=False)
        path = tmp_path / "t.csv"
        save_trace(trace, path)
        loaded = load_trace(path)
        assert loaded.state is None
        np.testing.assert_array_equal(loaded.current, trace.current)

    def test_three_row_file(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("time,voltage,current\n0.0,0.0,0.0\n0.1,0.5,1e-4\n0.2,1.0,3e-4\n")
        assert len(load_trace(path)) == 3

    def test_misnamed_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("t,v,i\n0,0,0\n")
        with pytest.raises(FormatError, match="line 1"):
            load_trace(path)

    def test_non_monotonic_time_names_row(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("time,voltage,current\n0,0,0\n1,0.5,1e-4\n1,1.0,3e-4\n")
        with pytest.raises(ValidationError, match="non-monotonic at row 3"):
            load_trace(path)

    def test_non_finite_value(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("time,voltage,current\n0,0,0\n1,nan,1e-4\n")
        with pytest.raises(ValidationError, match="non-finite"):
            load_trace(path)

    def test_non_uniform_time(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("time,voltage,current\n0,0,0\n1,0.5,0\n2.5,1.0,0\n")
        with pytest.raises(ValidationError, match="non-uniform"):
            load_trace(path)

    def test_wrong_field_count_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("time,voltage,current\n0,0\n")
        with pytest.raises(FormatError, match="line 2"):
            load_trace(path)


class TestMeasurements:
    def test_directory_load(self, tmp_path):
        area = tmp_path / "10um"
        area.mkdir()
        for k in range(3):
            (area / f"sweep{k}.csv").write_text(
                "time,voltage,current\n0,0,0\n0.1,0.5,1e-4\n0.2,1,2e-4\n")
        ms = load_measurements(area)
        assert ms.device_area_label == "10um"
        assert len(ms.traces) == 3

    def test_single_file_load(self, tmp_path):
        f = tmp_path / "device_a.csv"
        f.write_text("time,voltage,current\n0,0,0\n0.1,0.5,1e-4\n")
        ms = load_measurements(f)
        assert ms.device_area_label == "device_a"
        assert len(ms.traces) == 1

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ValidationError):
            load_measurements(tmp_path)


class TestGaussianParamSet:
    def test_missing_parameter_rejected(self):
        gset = load_bundled("10um")
        params = dict(gset.parameters)
        del params["b_min_n"]
        with pytest.raises(FormatError, match="b_min_n"):
            GaussianParamSet("10um", 1.0, 0.0, params)

    def test_negative_sd_rejected(self):
        gset = load_bundled("10um")
        params = dict(gset.parameters)
        params["A_n"] = (2.66e-2, -1.0)
        with pytest.raises(ValidationError, match="A_n"):
            GaussianParamSet("10um", 1.0, 0.0, params)

    def test_invalid_means_rejected(self):
        gset = load_bundled("10um")
        params = dict(gset.parameters)
        params["x_n"] = (1.5, 0.0)
        with pytest.raises(ValidationError):
            GaussianParamSet("10um", 1.0, 0.0, params)
