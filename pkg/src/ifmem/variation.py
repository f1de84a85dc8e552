"""Device-to-device variation sampling, one-at-a-time sensitivity
search, and cross-area trend classification.

Sensitivity follows the 10%-error protocol: each parameter is scaled up
and down until the mean percent error between the varied and the
reference response reaches 10%, searching the relative change on
(0, 100%] by bisection.  Parameters needing more than a 100% change are
reported as over-cutoff and counted as 100% when ranking.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DistributionError, DomainError
from .fitting import mpe
from .model import PARAMETER_NAMES, ModelParameters
from .simulate import simulate
from .waveform import sample

# Parameters excluded from sensitivity analysis (fixed to zero when
# fitting, so varying them is meaningless).
SENSITIVITY_EXCLUDED = ("V_p", "V_n")
SENSITIVITY_PARAMETERS = tuple(n for n in PARAMETER_NAMES
                               if n not in SENSITIVITY_EXCLUDED)

MPE_TARGET = 10.0     # percent change that defines the sensitivity point
MPE_TOLERANCE = 0.1   # |MPE - target| acceptance band for the search
CUTOFF_PERCENT = 100.0
_MAX_BISECTIONS = 60


def sample_parameters(dist, seed):
    """Draw one parameter vector from a Gaussian parameter set.

    Parameters are drawn independently in a fixed field order, so a
    given seed always produces the same vector.  Draws that violate the
    model invariants (negative magnitudes, onsets outside (0, 1)) are
    rejected and redrawn, up to 1000 attempts each; sd = 0 entries
    return their mean exactly.
    """
    rng = np.random.default_rng(seed)
    draws = {}
    for name in PARAMETER_NAMES:
        mean, sd = dist.parameters[name]
        if sd == 0.0:
            draws[name] = mean
            continue
        for _ in range(1000):
            value = float(rng.normal(mean, sd))
            if not np.isfinite(value):
                continue
            if name in ("x_p", "x_n"):
                if 0.0 < value < 1.0:
                    break
            elif value >= 0.0:
                break
        else:
            raise DistributionError(
                f"no valid draw for {name} after 1000 attempts "
                f"(mean={mean}, sd={sd})")
        draws[name] = value
    return ModelParameters(eta=dist.eta, x0=dist.x0, **draws)


def ensemble(dist, n, spec, cfg, seed):
    """Simulate ``n`` independently sampled devices over a sweep.

    Member i is drawn with seed + i, so results are reproducible and
    members are independent of each other; the returned traces follow
    the seed order.
    """
    if n < 1:
        raise DomainError("ensemble size must be >= 1")
    if cfg.dt is None:
        raise DomainError("ensemble needs cfg.dt to discretize the sweep")
    waveform = sample(spec, cfg.dt)
    return [simulate(sample_parameters(dist, seed + i), waveform, cfg)
            for i in range(n)]


@dataclass
class SensitivityReport:
    """Per-parameter relative change (percent, in (0, 100]) needed to
    move the response error to the target; None marks over-cutoff
    (> 100% change needed, counted as 100 in averages)."""

    entries: dict

    def average(self, name):
        dec, inc = self.entries[name]
        vals = [CUTOFF_PERCENT if v is None else v for v in (dec, inc)]
        return float(np.mean(vals))

    def averages(self):
        return {name: self.average(name) for name in self.entries}

    def ranking(self):
        """Parameter names ordered most to least impactful."""
        avgs = self.averages()
        return sorted(avgs, key=lambda n: avgs[n])

    def to_dict(self):
        return {
            "parameters": {
                name: {"decrease_percent": dec, "increase_percent": inc}
                for name, (dec, inc) in self.entries.items()
            },
            "averages": self.averages(),
            "ranking": self.ranking(),
        }


def combined_averages(reports):
    """Average each parameter's values across several reports (e.g. the
    three device areas), counting over-cutoff entries as 100."""
    names = list(reports[0].entries)
    out = {}
    for name in names:
        vals = []
        for rep in reports:
            dec, inc = rep.entries[name]
            vals += [CUTOFF_PERCENT if v is None else v for v in (dec, inc)]
        out[name] = float(np.mean(vals))
    return out


def rank_parameters(reports):
    """Most-to-least impactful parameter ordering across reports."""
    avgs = combined_averages(reports)
    return sorted(avgs, key=lambda n: avgs[n])


def sensitivity_search(params, spec, cfg):
    """Find, for every analysed parameter and both directions, the
    relative change that moves the MPE against the unperturbed response
    to the target value.

    The search bisects on the relative change over (0, 1], relying on
    MPE growing with the perturbation; that premise is checked on the
    probe sequence and the search downgrades to a grid scan with a
    warning if it fails.
    """
    if cfg.dt is None:
        raise DomainError("sensitivity search needs cfg.dt to discretize the sweep")
    waveform = sample(spec, cfg.dt)
    reference = simulate(params, waveform, cfg)

    entries = {}
    for name in SENSITIVITY_PARAMETERS:
        base = getattr(params, name)

        def probe(delta, sign, _name=name, _base=base):
            varied = replace(params, **{_name: _base * (1.0 + sign * delta)})
            return mpe(simulate(varied, waveform, cfg), reference)

        dec = _bisect_to_target(lambda d: probe(d, -1.0), name, "decrease")
        inc = _bisect_to_target(lambda d: probe(d, +1.0), name, "increase")
        entries[name] = (
            None if dec is None else 100.0 * dec,
            None if inc is None else 100.0 * inc,
        )
    return SensitivityReport(entries)


def _bisect_to_target(probe, name, direction):
    probes = [(1.0, probe(1.0))]
    if abs(probes[0][1] - MPE_TARGET) <= MPE_TOLERANCE:
        return 1.0
    if probes[0][1] < MPE_TARGET:
        return None
    lo, hi = 0.0, 1.0
    found = None
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        value = probe(mid)
        probes.append((mid, value))
        if abs(value - MPE_TARGET) <= MPE_TOLERANCE:
            found = mid
            break
        if value < MPE_TARGET:
            lo = mid
        else:
            hi = mid
    if not _is_monotone(probes):
        warnings.warn(
            f"MPE not monotone in the perturbation of {name} ({direction}); "
            f"falling back to a grid scan")
        return _grid_scan(probe)
    if found is None:
        warnings.warn(
            f"bisection for {name} ({direction}) did not reach the target "
            f"band; returning the bracket midpoint")
        found = 0.5 * (lo + hi)
    return found


def _is_monotone(probes, slack=1e-9):
    ordered = sorted(probes)
    values = [v for _, v in ordered]
    return all(b >= a - slack for a, b in zip(values, values[1:]))


def _grid_scan(probe):
    prev = 0.0
    for delta in np.linspace(0.0, 1.0, 201)[1:]:
        value = probe(delta)
        if abs(value - MPE_TARGET) <= MPE_TOLERANCE:
            return float(delta)
        if value > MPE_TARGET:
            lo, hi = prev, float(delta)
            for _ in range(_MAX_BISECTIONS):
                mid = 0.5 * (lo + hi)
                v = probe(mid)
                if abs(v - MPE_TARGET) <= MPE_TOLERANCE:
                    return mid
                if v < MPE_TARGET:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev = float(delta)
    return None


def trend_check(sets):
    """Classify how each parameter's mean moves across device areas
    (sets ordered small to large): 'decreasing', 'increasing', 'flat'
    (relative spread below 1e-6) or 'non-monotonic'."""
    if len(sets) < 2:
        raise DomainError("trend classification needs at least 2 sets")
    trends = {}
    for name in PARAMETER_NAMES:
        means = [s.parameters[name][0] for s in sets]
        scale = max(abs(m) for m in means)
        if scale == 0.0 or (max(means) - min(means)) / scale < 1e-6:
            trends[name] = "flat"
        elif all(b < a for a, b in zip(means, means[1:])):
            trends[name] = "decreasing"
        elif all(b > a for a, b in zip(means, means[1:])):
            trends[name] = "increasing"
        else:
            trends[name] = "non-monotonic"
    return trends
