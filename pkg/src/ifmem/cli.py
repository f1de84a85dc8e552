"""Command-line front end.

Every command writes a manifest JSON next to its outputs capturing the
fully resolved configuration, input file hashes, seed and tool version;
``ifmem rerun MANIFEST`` re-executes a command from that record and
reproduces its outputs byte for byte.

Exit codes: 0 success, 2 usage/input error, 3 numerical error,
4 fit did not converge (outputs are still written).
"""

import functools
import hashlib
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, dataio, fitting, variation
from .errors import (DistributionError, DomainError, FormatError,
                     NumericalError, ValidationError)
from .model import PARAMETER_NAMES, ModelParameters, REPORT_ORDER
from .simulate import SimulationConfig, simulate
from .waveform import (DEFAULT_DURATION, DEFAULT_VMAX, DEFAULT_VMIN,
                       sample, standard_sweep)

_INPUT_ERRORS = (FormatError, ValidationError, DomainError,
                 DistributionError, OSError, json.JSONDecodeError)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NumericalError as exc:
            click.echo(f"numerical error: {exc}", err=True)
            sys.exit(3)
        except _INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    return wrapper


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


def _atomic_write(path, text):
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, str(path))


def _write_manifest(path, command, config, inputs, outputs, seed=None):
    payload = {
        "command": command,
        "tool_version": __version__,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(o) for o in outputs],
        "seed": seed,
    }
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_model(path):
    """Accept either a plain parameter file or a Gaussian set (means)."""
    loaded = dataio.load_params(path)
    if isinstance(loaded, dataio.GaussianParamSet):
        return loaded.mean_model()
    return loaded


def _resolve_sweep(config):
    spec = standard_sweep(config["vmax"], config["vmin"], config["duration"])
    return spec, sample(spec, config["dt"])


def _fmt(x):
    return f"{x:.6g}"


def _write_svg(trace, path, width=640, height=480, margin=50):
    v, i = trace.voltage, trace.current
    v0, v1 = float(np.min(v)), float(np.max(v))
    i0, i1 = float(np.min(i)), float(np.max(i))
    vspan = (v1 - v0) or 1.0
    ispan = (i1 - i0) or 1.0
    xs = margin + (v - v0) / vspan * (width - 2 * margin)
    ys = height - margin - (i - i0) / ispan * (height - 2 * margin)
    points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="1"/>\n'
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12">voltage (V), {_fmt(v0)} to {_fmt(v1)}</text>\n'
        f'<text x="14" y="{height // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height // 2})">current (A), {_fmt(i0)} to {_fmt(i1)}</text>\n'
        f'</svg>\n'
    )
    _atomic_write(path, svg)


def _loop_summary(trace):
    v, i = trace.voltage, trace.current
    i_at_vmax = float(i[np.argmax(v)])
    i_at_vmin = float(i[np.argmin(v)])
    area = abs(float(np.trapezoid(i, v)))
    return i_at_vmax, i_at_vmin, area


@click.group()
@click.version_option(__version__)
def main():
    """Interface-memristor compact model toolkit."""


# ---------------------------------------------------------------- simulate

def _exec_simulate(config):
    params = _load_model(config["params"])
    if config["x0"] is not None:
        params = ModelParameters(**{**params.as_dict(), "x0": config["x0"]})
    if config["eta"] is not None:
        params = ModelParameters(**{**params.as_dict(), "eta": config["eta"]})
    _, waveform = _resolve_sweep(config)
    trace = simulate(params, waveform, SimulationConfig(dt=config["dt"]))
    out = Path(config["out"])
    dataio.save_trace(trace, out)
    outputs = [out]
    if config.get("svg"):
        svg_path = out.with_suffix(".svg")
        _write_svg(trace, svg_path)
        outputs.append(svg_path)
    manifest = Path(str(out) + ".manifest.json")
    _write_manifest(manifest, "simulate", config, [config["params"]], outputs)
    i_max, i_min, area = _loop_summary(trace)
    click.echo(f"I(v_max) = {_fmt(i_max)} A")
    click.echo(f"I(v_min) = {_fmt(i_min)} A")
    click.echo(f"loop area = {_fmt(area)} V*A")
    click.echo(f"wrote {out}")


@main.command("simulate")
@click.option("--params", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--vmax", type=float, default=DEFAULT_VMAX, show_default=True)
@click.option("--vmin", type=float, default=DEFAULT_VMIN, show_default=True)
@click.option("--duration", type=float, default=DEFAULT_DURATION, show_default=True)
@click.option("--dt", type=float, default=None,
              help="sample step [default: duration/10000]")
@click.option("--x0", type=float, default=None,
              help="override initial state [default: value from file, 0 in fixtures]")
@click.option("--eta", type=float, default=None,
              help="override state polarity [default: value from file, +1 in fixtures]")
@click.option("--svg", is_flag=True, help="also write an I-V plot as SVG")
@click.option("--out", required=True, type=click.Path(writable=True))
@_guarded
def cmd_simulate(params, vmax, vmin, duration, dt, x0, eta, svg, out):
    """Simulate a parameter file over the standard sweep."""
    if dt is None:
        dt = duration / 10000.0
    if dt <= 0:
        raise DomainError("dt must be positive")
    config = {"params": params, "vmax": vmax, "vmin": vmin,
              "duration": duration, "dt": dt, "x0": x0, "eta": eta,
              "svg": svg, "out": out}
    _exec_simulate(config)


# --------------------------------------------------------------------- fit

def _exec_fit(config):
    data_dir = Path(config["data_dir"])
    if not data_dir.is_dir():
        raise ValidationError(f"{data_dir}: not a directory")
    subdirs = sorted(p for p in data_dir.iterdir() if p.is_dir())
    if subdirs:
        datasets = [dataio.load_measurements(p) for p in subdirs]
    else:
        datasets = [dataio.load_measurements(data_dir)]
    cfg = fitting.fit_config_from_dict(config["fit"])
    gaussians, step2 = fitting.two_step_fit(datasets, cfg)

    out_dir = Path(config["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for gset in gaussians:
        path = out_dir / f"params_{gset.area_label}.json"
        dataio.save_params(gset, path)
        outputs.append(path)
    report_path = out_dir / "fit_report.txt"
    _atomic_write(report_path, fitting.format_gaussian_table(gaussians))
    outputs.append(report_path)

    inputs = sorted(str(f) for ms_dir in (subdirs or [data_dir])
                    for f in Path(ms_dir).glob("*.csv"))
    _write_manifest(out_dir / "manifest.json", "fit", config, inputs,
                    outputs, seed=cfg.seed)
    click.echo(fitting.format_gaussian_table(gaussians))
    all_converged = all(r.converged for results in step2.values() for r in results)
    if not all_converged:
        click.echo("warning: at least one fit leg did not converge", err=True)
        sys.exit(4)


@main.command("fit")
@click.option("--data-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="FitConfig JSON; defaults are used when omitted")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_guarded
def cmd_fit(data_dir, config_file, out):
    """Two-step regression over a directory of per-area measurements.

    The data directory holds one subdirectory per device area, each
    containing trace CSVs (header time,voltage,current).
    """
    if config_file is not None:
        with open(config_file) as fh:
            fit_dict = json.load(fh)
        fit_dict = fitting.fit_config_to_dict(fitting.fit_config_from_dict(fit_dict))
    else:
        fit_dict = fitting.fit_config_to_dict(
            fitting.FitConfig(theta0=fitting.default_initial_parameters()))
    config = {"data_dir": data_dir, "fit": fit_dict, "out": out}
    _exec_fit(config)


# ------------------------------------------------------------------ sample

def _exec_sample(config):
    dist = dataio.load_params(config["gaussian"])
    if not isinstance(dist, dataio.GaussianParamSet):
        raise ValidationError(f"{config['gaussian']}: not a Gaussian parameter set")
    spec, _ = _resolve_sweep(config)
    sim_cfg = SimulationConfig(dt=config["dt"])
    traces = variation.ensemble(dist, config["n"], spec, sim_cfg, config["seed"])

    out_dir = Path(config["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for i, trace in enumerate(traces):
        member = variation.sample_parameters(dist, config["seed"] + i)
        p_path = out_dir / f"params_{i:03d}.json"
        t_path = out_dir / f"trace_{i:03d}.csv"
        dataio.save_params(member, p_path)
        dataio.save_trace(trace, t_path)
        outputs += [p_path, t_path]
    _write_manifest(out_dir / "manifest.json", "sample", config,
                    [config["gaussian"]], outputs, seed=config["seed"])
    click.echo(f"wrote {config['n']} sampled devices to {out_dir}")


@main.command("sample")
@click.option("--gaussian", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--vmax", type=float, default=DEFAULT_VMAX, show_default=True)
@click.option("--vmin", type=float, default=DEFAULT_VMIN, show_default=True)
@click.option("--duration", type=float, default=DEFAULT_DURATION, show_default=True)
@click.option("--dt", type=float, default=None,
              help="sample step [default: duration/10000]")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@_guarded
def cmd_sample(gaussian, n, seed, vmax, vmin, duration, dt, out_dir):
    """Simulate n devices drawn from a Gaussian parameter set."""
    if n < 1:
        raise DomainError("--n must be >= 1")
    if dt is None:
        dt = duration / 10000.0
    if dt <= 0:
        raise DomainError("dt must be positive")
    config = {"gaussian": gaussian, "n": n, "seed": seed, "vmax": vmax,
              "vmin": vmin, "duration": duration, "dt": dt, "out": out_dir}
    _exec_sample(config)


# ------------------------------------------------------------- sensitivity

def _over(value):
    return ">100.0" if value is None else f"{value:.1f}"


def _exec_sensitivity(config):
    spec, _ = _resolve_sweep(config)
    sim_cfg = SimulationConfig(dt=config["dt"])
    labelled = []
    for path in config["params"]:
        loaded = dataio.load_params(path)
        if isinstance(loaded, dataio.GaussianParamSet):
            label, model = loaded.area_label, loaded.mean_model()
        else:
            label, model = Path(path).stem, loaded
        labelled.append((label, variation.sensitivity_search(model, spec, sim_cfg)))

    reports = [rep for _, rep in labelled]
    averages = variation.combined_averages(reports)
    ranking = variation.rank_parameters(reports)

    header = ["parameter"]
    for label, _ in labelled:
        header += [f"{label}_decrease_percent", f"{label}_increase_percent"]
    header.append("average_percent")
    lines = [",".join(header)]
    for name in ranking:
        row = [name]
        for _, rep in labelled:
            dec, inc = rep.entries[name]
            row += [_over(dec), _over(inc)]
        row.append(f"{averages[name]:.2f}")
        lines.append(",".join(row))
    out = Path(config["out"])
    _atomic_write(out, "\n".join(lines) + "\n")

    json_out = out.with_suffix(".json")
    payload = {
        "models": {label: rep.to_dict() for label, rep in labelled},
        "combined_averages": averages,
        "ranking": ranking,
    }
    _atomic_write(json_out, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    _write_manifest(Path(str(out) + ".manifest.json"), "sensitivity", config,
                    list(config["params"]), [out, json_out])
    click.echo("ranking (most impactful first): " + ", ".join(ranking))
    click.echo(f"wrote {out}")


@main.command("sensitivity")
@click.option("--params", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="parameter file(s); repeat for a combined multi-model table")
@click.option("--vmax", type=float, default=DEFAULT_VMAX, show_default=True)
@click.option("--vmin", type=float, default=DEFAULT_VMIN, show_default=True)
@click.option("--duration", type=float, default=DEFAULT_DURATION, show_default=True)
@click.option("--dt", type=float, default=None,
              help="sample step [default: duration/10000]")
@click.option("--out", required=True, type=click.Path(writable=True))
@_guarded
def cmd_sensitivity(params, vmax, vmin, duration, dt, out):
    """Per-parameter change needed for a 10% response error."""
    if dt is None:
        dt = duration / 10000.0
    if dt <= 0:
        raise DomainError("dt must be positive")
    config = {"params": list(params), "vmax": vmax, "vmin": vmin,
              "duration": duration, "dt": dt, "out": out}
    _exec_sensitivity(config)


# ------------------------------------------------------------------ trends

def _exec_trends(config):
    sets = [dataio.load_params(p) for p in config["gaussian"]]
    for path, s in zip(config["gaussian"], sets):
        if not isinstance(s, dataio.GaussianParamSet):
            raise ValidationError(f"{path}: not a Gaussian parameter set")
    trends = variation.trend_check(sets)

    lines = ["parameter,area_label,mean,sd,trend"]
    for name in REPORT_ORDER:
        for s in sets:
            mean, sd = s.parameters[name]
            lines.append(f"{name},{s.area_label},{mean!r},{sd!r},{trends[name]}")
    out = Path(config["out"])
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest(Path(str(out) + ".manifest.json"), "trends", config,
                    list(config["gaussian"]), [out])

    width = max(len(n) for n in REPORT_ORDER)
    for name in REPORT_ORDER:
        click.echo(f"{name:<{width}}  {trends[name]}")
    click.echo(f"wrote {out}")


@main.command("trends")
@click.option("--gaussian", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Gaussian set files ordered small to large area")
@click.option("--out", required=True, type=click.Path(writable=True))
@_guarded
def cmd_trends(gaussian, out):
    """Classify parameter trends across device areas."""
    if len(gaussian) < 2:
        raise DomainError("need at least two Gaussian sets to compare")
    config = {"gaussian": list(gaussian), "out": out}
    _exec_trends(config)


# ------------------------------------------------------------------- rerun

_EXECUTORS = {
    "simulate": _exec_simulate,
    "fit": _exec_fit,
    "sample": _exec_sample,
    "sensitivity": _exec_sensitivity,
    "trends": _exec_trends,
}


@main.command("rerun")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@_guarded
def cmd_rerun(manifest):
    """Re-execute a command from its manifest, reproducing its outputs."""
    with open(manifest) as fh:
        payload = json.load(fh)
    command = payload.get("command")
    if command not in _EXECUTORS:
        raise FormatError(f"{manifest}: unknown command {command!r}")
    _EXECUTORS[command](payload["config"])


if __name__ == "__main__":
    main()
