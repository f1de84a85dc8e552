"""Objective metrics and the two-step regression pipeline.

A fit minimizes the mean absolute current error between a simulated and
a measured trace with a bounded Nelder-Mead simplex search, restarted
(full-space plus per-block polish) until it stops improving.  The
search runs in log-ratio coordinates relative to the initial estimate
so parameters spanning many orders of magnitude are treated evenly.
The whole procedure is deterministic: the same inputs always return the
same fit.

The two-step pipeline fits every trace individually, freezes the
parameters that do not vary with device area to their cross-area
averages (and the reverse window onset to its per-area median), refits,
and summarizes each area's fits as per-parameter Gaussians (sample
mean / SD).
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .dataio import GaussianParamSet, load_all_bundled
from .errors import AlignmentError, DomainError, ValidationError
from .model import PARAMETER_NAMES, ModelParameters
from .simulate import SimulationConfig, simulate
from .waveform import SampledWaveform

# Interface devices show no voltage threshold, so the thresholds never
# enter the optimisation.
ALWAYS_FROZEN = frozenset({"V_p", "V_n"})

# Parameters that do not vary with device area; frozen in step 2.
AREA_INDEPENDENT = ("A_p", "alpha_p", "x_p")

_ONSET_MARGIN = 1e-6

# One full-space Nelder-Mead leg between restarts; the plateau check
# across restarts is the real termination criterion.
_EVALS_PER_RESTART = 3000

# Evaluation cap for each low-dimensional polish run.
_EVALS_PER_BLOCK = 400

# Physically coupled parameter groups.  Full-dimensional simplex moves
# crawl hopelessly slowly along the curved valleys these pairs/triplets
# form (a transmission branch in its linear regime only identifies the
# g*b product; the switching triplets trade off rate against window
# shape), so each restart cycle polishes them in their own subspaces.
_POLISH_BLOCKS = (
    ("A_p", "x_p", "alpha_p"),
    ("A_n", "x_n", "alpha_n"),
    ("g_max_p", "b_max_p"),
    ("g_max_n", "b_max_n"),
    ("g_min_p", "b_min_p"),
    ("g_min_n", "b_min_n"),
)

# Search-space floor for the ratio theta / theta0 (log coordinates need
# a strictly positive lower edge even when a bound reaches 0).
_LOG_RATIO_FLOOR = 1e-8

# Tie-breaker ridge: fraction of the starting MAE applied to the mean
# squared log-ratio.  Small enough to leave identifiable parameters
# untouched, large enough to pick a reproducible point along exactly
# flat parameter valleys.
_RIDGE_WEIGHT = 1e-4


def default_initial_parameters():
    """Cross-area average of the bundled per-area means (the default
    starting estimate for fits)."""
    sets = load_all_bundled()
    means = {
        name: float(np.mean([s.parameters[name][0] for s in sets]))
        for name in PARAMETER_NAMES
    }
    return ModelParameters(eta=sets[0].eta, x0=sets[0].x0, **means)


def default_bounds():
    """Per-parameter search bounds: [0, 10x the largest bundled mean]
    for magnitudes and rates, and the open unit interval (with a small
    margin) for the window onsets."""
    sets = load_all_bundled()
    bounds = {}
    for name in PARAMETER_NAMES:
        if name in ("x_p", "x_n"):
            bounds[name] = (_ONSET_MARGIN, 1.0 - _ONSET_MARGIN)
        else:
            top = max(s.parameters[name][0] for s in sets)
            bounds[name] = (0.0, 10.0 * top if top > 0.0 else 10.0)
    return bounds


@dataclass(frozen=True)
class FitConfig:
    """Settings for a single regression leg.

    ``objective_tol`` is the relative MAE improvement below which a
    restart cycle is considered converged.  ``dt`` is only consulted
    when synthetic traces are generated from a config; fits always run
    on the measured trace's own grid.  ``seed`` is recorded for
    reproducibility bookkeeping (the simplex search itself draws no
    random numbers).
    """

    theta0: ModelParameters
    frozen: frozenset = frozenset()
    bounds: dict = None
    objective_tol: float = 1e-4
    max_evaluations: int = 24000
    dt: float = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "frozen", frozenset(self.frozen) | ALWAYS_FROZEN)
        bounds = self.bounds if self.bounds is not None else default_bounds()
        unknown = set(bounds) - set(PARAMETER_NAMES)
        if unknown:
            raise DomainError(f"bounds for unknown parameters: {sorted(unknown)}")
        for name in PARAMETER_NAMES:
            lo, hi = bounds.get(name, (-np.inf, np.inf))
            if not lo <= getattr(self.theta0, name) <= hi:
                raise DomainError(f"theta0.{name} outside bounds [{lo}, {hi}]")
        object.__setattr__(self, "bounds", dict(bounds))
        if not self.objective_tol > 0.0:
            raise DomainError("objective_tol must be > 0")
        if self.max_evaluations < 1:
            raise DomainError("max_evaluations must be >= 1")
        if self.dt is not None and self.dt <= 0.0:
            raise DomainError("dt must be > 0")


@dataclass(frozen=True)
class FitResult:
    theta_hat: ModelParameters
    mae: float
    mpe: float
    evaluations: int
    converged: bool


def _check_aligned(simulated, measured):
    if len(simulated) != len(measured):
        raise AlignmentError(
            f"trace lengths differ: {len(simulated)} vs {len(measured)}")
    dt = min(simulated.dt, measured.dt)
    offset = float(np.max(np.abs(simulated.time - measured.time)))
    if offset >= dt / 2.0:
        raise AlignmentError(f"trace times misaligned by {offset} (> dt/2)")


def mae(simulated, measured):
    """Mean absolute current error between two aligned traces."""
    _check_aligned(simulated, measured)
    return float(np.mean(np.abs(simulated.current - measured.current)))


def mpe(simulated, measured):
    """Mean percent error: total absolute current deviation normalized
    by the total absolute measured current.

    Equivalent to 100 * MAE / mean|I_measured|; dimensionless,
    invariant under sample-count changes and under joint rescaling of
    both traces.
    """
    _check_aligned(simulated, measured)
    denom = float(np.sum(np.abs(measured.current)))
    if denom == 0.0:
        raise DomainError("MPE undefined: measured currents are all zero")
    total = float(np.sum(np.abs(simulated.current - measured.current)))
    return 100.0 * total / denom


def fit_single(measured, cfg):
    """Fit the non-frozen parameters of cfg.theta0 to one measured trace.

    Deterministic bounded Nelder-Mead on the MAE between the simulated
    response to the measured voltage sequence and the measured current.
    The search runs in log-ratio coordinates relative to theta0 (every
    free parameter is strictly positive within its bounds), with a
    vanishingly small ridge toward theta0 added to the raw MAE.  The
    ridge is orders of magnitude below the resolvable error, so it does
    not move the optimum of any identifiable parameter; it only picks a
    canonical point along exactly flat parameter valleys (for example a
    saturating branch operated in its linear regime identifies only the
    product of its magnitude and shape), which keeps repeated fits
    consistent enough to be averaged.

    The returned parameters never score worse than theta0.  Exceeding
    the evaluation budget yields converged=False rather than an error.
    """
    free = [n for n in PARAMETER_NAMES if n not in cfg.frozen]
    waveform = SampledWaveform(dt=measured.dt, voltages=measured.voltage)
    sim_cfg = SimulationConfig()
    theta0 = cfg.theta0

    refs = []
    lo_u, hi_u = [], []
    for n in free:
        lo, hi = cfg.bounds[n]
        ref = getattr(theta0, n) or (hi / 10.0 if hi > 0 else 1.0)
        refs.append(ref)
        lo_u.append(np.log(max(lo / ref, _LOG_RATIO_FLOOR)))
        hi_u.append(np.log(max(hi / ref, _LOG_RATIO_FLOOR * 2)))
    refs = np.array(refs)
    lo_u, hi_u = np.array(lo_u), np.array(hi_u)
    u0 = np.clip(np.zeros(len(free)), lo_u, hi_u)

    evals = 0
    best = {"u": u0, "score": None, "mae": None}

    def build(u):
        u = np.clip(u, lo_u, hi_u)
        values = refs * np.exp(u)
        return replace(theta0, **{n: float(v) for n, v in zip(free, values)})

    mae0 = mae(simulate(build(u0), waveform, sim_cfg), measured)
    ridge = _RIDGE_WEIGHT * mae0

    def objective(u):
        nonlocal evals
        evals += 1
        value = mae(simulate(build(u), waveform, sim_cfg), measured)
        score = value + ridge * float(np.mean(np.square(np.clip(u, lo_u, hi_u))))
        if best["score"] is None or score < best["score"]:
            best["u"] = np.clip(u, lo_u, hi_u)
            best["score"] = score
            best["mae"] = value
        return score

    def run_leg(start, indices, cap, spread=None):
        budget = cfg.max_evaluations - evals
        if budget <= 0:
            return False
        if len(indices) == len(free):
            sub_objective = objective
            x0_sub = start
            bounds_sub = list(zip(lo_u, hi_u))
        else:
            center = start.copy()

            def sub_objective(usub):
                u = center.copy()
                u[indices] = usub
                return objective(u)

            x0_sub = start[indices]
            bounds_sub = [(lo_u[i], hi_u[i]) for i in indices]
        options = {"maxfev": min(budget, cap), "xatol": 1e-6,
                   "fatol": 1e-15, "adaptive": True}
        if spread is not None:
            simplex = np.tile(x0_sub, (len(x0_sub) + 1, 1))
            for k in range(len(x0_sub)):
                simplex[k + 1, k] += spread
            options["initial_simplex"] = simplex
        minimize(sub_objective, x0_sub, method="Nelder-Mead",
                 bounds=bounds_sub, options=options)
        return True

    objective(u0)
    converged = True
    if free:
        all_idx = np.arange(len(free))
        blocks = [np.array([i for i, n in enumerate(free) if n in block])
                  for block in _POLISH_BLOCKS]
        blocks = [b for b in blocks if len(b)]
        previous = best["score"]
        while True:
            in_budget = run_leg(best["u"], all_idx, _EVALS_PER_RESTART)
            for block in blocks:
                in_budget = in_budget and run_leg(best["u"], block,
                                                  _EVALS_PER_BLOCK)
                # also restart the block from its theta0 coordinates:
                # the full-space simplex can drag a weakly identified
                # group into a poor basin early on, and a local polish
                # alone never escapes it
                reset = best["u"].copy()
                reset[block] = u0[block]
                in_budget = in_budget and run_leg(reset, block,
                                                  _EVALS_PER_BLOCK)
            if not in_budget:
                converged = False
                break
            improvement = (previous - best["score"]) / max(best["score"], 1e-300)
            if improvement <= cfg.objective_tol:
                converged = True
                break
            previous = best["score"]

    theta_hat = build(best["u"])
    best_mae = best["mae"]
    # build(u0) == theta0 whenever every free parameter is nonzero; a
    # zero start sits below the log floor, so re-check the contract
    # against theta0 itself.
    if any(getattr(theta0, n) == 0.0 for n in free):
        theta0_mae = mae(simulate(theta0, waveform, sim_cfg), measured)
        if theta0_mae < best_mae:
            theta_hat, best_mae = theta0, theta0_mae
    sim_best = simulate(theta_hat, waveform, sim_cfg)
    return FitResult(
        theta_hat=theta_hat,
        mae=best_mae,
        mpe=mpe(sim_best, measured),
        evaluations=evals,
        converged=converged,
    )


def fit_config_to_dict(cfg):
    """JSON-ready form of a FitConfig."""
    return {
        "theta0": cfg.theta0.as_dict(),
        "frozen": sorted(cfg.frozen),
        "bounds": {n: list(cfg.bounds[n]) for n in PARAMETER_NAMES},
        "objective_tol": cfg.objective_tol,
        "max_evaluations": cfg.max_evaluations,
        "dt": cfg.dt,
        "seed": cfg.seed,
    }


def fit_config_from_dict(payload):
    """Build a FitConfig from its JSON form; omitted fields get their
    defaults and a missing theta0 uses the bundled cross-area average."""
    known = {"theta0", "frozen", "bounds", "objective_tol",
             "max_evaluations", "dt", "seed"}
    unknown = set(payload) - known
    if unknown:
        raise ValidationError(f"unknown fit config keys: {sorted(unknown)}")
    theta0 = payload.get("theta0")
    if theta0 is None:
        theta0 = default_initial_parameters()
    elif isinstance(theta0, dict):
        theta0 = ModelParameters(**{k: float(v) for k, v in theta0.items()})
    kwargs = {"theta0": theta0}
    if "frozen" in payload:
        kwargs["frozen"] = frozenset(payload["frozen"])
    if payload.get("bounds") is not None:
        kwargs["bounds"] = {n: tuple(v) for n, v in payload["bounds"].items()}
    for key in ("objective_tol", "max_evaluations", "dt", "seed"):
        if payload.get(key) is not None:
            kwargs[key] = payload[key]
    return FitConfig(**kwargs)


def format_gaussian_table(sets):
    """Per-area mean/SD table, varying parameters first and the
    area-independent block at the bottom."""
    from .model import REPORT_ORDER

    labels = [s.area_label for s in sets]
    head = ["parameter"] + [f"{lbl} {kind}" for lbl in labels
                            for kind in ("mean", "sd")]
    rows = [head]
    for name in REPORT_ORDER:
        row = [name]
        for s in sets:
            mean, sd = s.parameters[name]
            row += [f"{mean:.3e}", f"{sd:.3e}"]
        rows.append(row)
    widths = [max(len(r[c]) for r in rows) for c in range(len(head))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def _area_means(results):
    return {
        n: float(np.mean([getattr(r.theta_hat, n) for r in results]))
        for n in PARAMETER_NAMES
    }


def two_step_fit(datasets, cfg):
    """Two-step regression over per-area measurement sets.

    Step 1 fits every trace from cfg.theta0 and averages the fitted
    parameters per area.  The area-independent parameters are then
    frozen to their cross-area averages, the reverse window onset x_n
    to its per-area average (its shape trades off freely against the
    reverse rate pair, so leaving it loose makes repeated fits land at
    incompatible points that cannot be averaged), and every trace is
    refitted from the same starting estimate.  Each area's step-2 fits
    are summarized as per-parameter Gaussians (sample mean, sample SD
    with ddof=1; SD=0 for frozen parameters and single-trace areas).

    Returns (gaussian_sets, step2_results) where step2_results maps
    area label -> list of FitResult in trace order.
    """
    if not datasets:
        raise ValidationError("no measurement sets supplied")
    for ms in datasets:
        if not ms.traces:
            raise ValidationError(f"area '{ms.device_area_label}' has no traces")

    step1 = {
        ms.device_area_label: [fit_single(tr, cfg) for tr in ms.traces]
        for ms in datasets
    }
    area_means = {label: _area_means(res) for label, res in step1.items()}
    cross = {
        n: float(np.mean([area_means[label][n] for label in area_means]))
        for n in AREA_INDEPENDENT
    }
    # Median rather than mean for the onset freeze: individual fits can
    # wander far along the rate/window trade-off, and a single outlier
    # must not drag the pinned onset off every other fit's basin.
    onset = {
        label: float(np.median([r.theta_hat.x_n for r in results]))
        for label, results in step1.items()
    }

    gaussians = []
    step2 = {}
    for ms in datasets:
        label = ms.device_area_label
        theta0_area = replace(cfg.theta0, x_n=onset[label], **cross)
        cfg_area = replace(cfg, theta0=theta0_area,
                           frozen=cfg.frozen | set(AREA_INDEPENDENT) | {"x_n"})
        results = [fit_single(tr, cfg_area) for tr in ms.traces]
        step2[label] = results
        pairs = {}
        for n in PARAMETER_NAMES:
            if n in cfg_area.frozen:
                pairs[n] = (getattr(theta0_area, n), 0.0)
                continue
            values = [getattr(r.theta_hat, n) for r in results]
            sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
            pairs[n] = (float(np.mean(values)), sd)
        gaussians.append(GaussianParamSet(
            area_label=label,
            eta=cfg.theta0.eta, x0=cfg.theta0.x0, parameters=pairs))
    return gaussians, step2
