"""Monte Carlo sweep harness: vary one axis, rerun every requested solver
on paired channel draws, and emit deterministic CSV."""

import zlib
from dataclasses import dataclass, replace

import numpy as np

from .alternating import solve_alternating, solve_b_zero
from .baselines import l_infinity_limit, no_jamming_report, solve_fixed_split
from .feasibility import check_existence, optimal_power
from .model import ChannelSet, SystemParams, channel_inversion_precoder, generate_rayleigh, perturb_csi
from .optimal import solve_optimal
from .report import make_report

__all__ = ["SOLVERS", "SweepSpec", "SweepRow", "run_sweep", "summarize", "write_csv"]

SOLVERS = ("optimal", "alternating", "fixed_split", "no_jamming", "b_zero", "l_inf_limit")

_AXES = ("Z", "P_tot", "tau", "L", "b_gain_db")


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axis: str  # one of _AXES
    axis_values: tuple  # sorted, linear units (dB only for b_gain_db)
    trials: int
    solvers: tuple
    seed: int
    b_gain_db: float = 0.0
    xi2: float = 0.0  # CSI error variance seen by the jamming design

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}")
        if not self.axis_values or list(self.axis_values) != sorted(self.axis_values):
            raise ValueError("axis_values must be non-empty and sorted")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        bad = set(self.solvers) - set(SOLVERS)
        if bad or not self.solvers:
            raise ValueError(f"unknown solvers {sorted(bad)}; choose from {SOLVERS}")


@dataclass(frozen=True)
class SweepRow:
    axis: str
    axis_value: float
    solver: str
    trial_seed: int
    feasible: bool
    eta: float
    min_secrecy_lb: float
    mean_secrecy_lb: float
    iterations: int
    status: str


def trial_seed(seed, axis_value, trial):
    """Stable cross-platform per-trial seed (same channels for every
    solver within a trial)."""
    tag = f"{seed}:{axis_value!r}:{trial}".encode()
    return zlib.crc32(tag)


def _apply_axis(spec: SweepSpec, value):
    params, gain = spec.base, spec.b_gain_db
    if spec.axis == "Z":
        params = replace(params, z=int(value))
    elif spec.axis == "P_tot":
        params = replace(params, p_tot=float(value))
    elif spec.axis == "tau":
        params = replace(params, tau=float(value))
    elif spec.axis == "L":
        params = replace(params, l=int(value))
    else:  # b_gain_db
        gain = float(value)
    return params, gain


def _run_solver(name, pre, ch, ch_design, params):
    """Run one solver on (possibly perturbed) design channels, evaluate on
    the true channels. Returns (eta, min_lb, mean_lb, iterations, status)."""
    if name == "optimal":
        design = solve_optimal(pre, ch_design, params)
        rep = make_report(name, pre, ch, params, design.p, design.Sigma,
                          design.iterations, design.status)
    elif name == "alternating":
        state, rep = solve_alternating(pre, ch_design, params)
        if ch_design is not ch:
            Sigma = state.Gamma.conj().T @ state.Gamma
            rep = make_report(name, pre, ch, params, rep.p, Sigma,
                              state.iteration, rep.status)
    elif name == "fixed_split":
        _, _, Sigma, _ = solve_fixed_split(pre, ch_design, params)
        rep = make_report(name, pre, ch, params, optimal_power(pre, params), Sigma)
    elif name == "no_jamming":
        rep = no_jamming_report(pre, ch, params)
    elif name == "b_zero":
        _, Gamma, _ = solve_b_zero(pre, ch_design, params)
        Sigma = Gamma.conj().T @ Gamma
        rep = make_report(name, pre, ch, params, optimal_power(pre, params), Sigma)
    else:  # l_inf_limit
        eta = l_infinity_limit(pre, ch_design, params)
        return eta, np.nan, np.nan, 0, "Converged"
    return (
        rep.eta,
        float(np.min(rep.secrecy_lb)),
        float(np.mean(rep.secrecy_lb)),
        rep.iterations,
        rep.status,
    )


def _run_trial(spec: SweepSpec, value, params, gain, trial):
    ts = trial_seed(spec.seed, value, trial)
    results = {}
    try:
        ch = generate_rayleigh(params, gain_db_b=gain, rng_seed=ts)
        pre = channel_inversion_precoder(ch, params.tau)
        feas = check_existence(pre, params).feasible
        ch_design = perturb_csi(ch, spec.xi2, rng_seed=ts) if spec.xi2 else ch
    except Exception as exc:
        feas = False
        results = {s: (np.nan, np.nan, np.nan, 0, type(exc).__name__)
                   for s in spec.solvers}
    if not results and not feas:
        results = {s: (np.nan, np.nan, np.nan, 0, "Infeasible")
                   for s in spec.solvers}
    rows = []
    for solver in spec.solvers:
        if solver in results:
            eta, lo, mean, iters, status = results[solver]
            ok = False
        else:
            try:
                eta, lo, mean, iters, status = _run_solver(
                    solver, pre, ch, ch_design, params
                )
                ok = True
            except Exception as exc:
                eta, lo, mean, iters, status = np.nan, np.nan, np.nan, 0, type(exc).__name__
                ok = False
        rows.append(
            SweepRow(
                axis=spec.axis,
                axis_value=float(value),
                solver=solver,
                trial_seed=ts,
                feasible=ok,
                eta=float(eta),
                min_secrecy_lb=float(lo),
                mean_secrecy_lb=float(mean),
                iterations=int(iters),
                status=status,
            )
        )
    return rows


def run_sweep(spec: SweepSpec, threads=1):
    """One SweepRow per (axis value, solver, trial), ordered by
    (axis value, solver, trial seed). Trials are independent; with
    threads > 1 they run on a thread pool and are merged in the same
    deterministic order."""
    tasks = []
    for value in spec.axis_values:
        params, gain = _apply_axis(spec, value)
        for trial in range(spec.trials):
            tasks.append((value, params, gain, trial))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(lambda t: _run_trial(spec, *t), tasks))
    else:
        per_trial = [_run_trial(spec, *t) for t in tasks]
    rows = [row for trial_rows in per_trial for row in trial_rows]
    value_order = {float(v): i for i, v in enumerate(spec.axis_values)}
    rows.sort(key=lambda r: (value_order[r.axis_value],
                             spec.solvers.index(r.solver), r.trial_seed))
    return rows


def summarize(rows):
    """Feasible-trial averages per (axis_value, solver): mean eta (linear
    and dB) and feasible fraction. Infeasible trials are excluded from the
    means and counted in the fraction."""
    keys = []
    groups = {}
    for r in rows:
        key = (r.axis_value, r.solver)
        if key not in groups:
            groups[key] = []
            keys.append(key)
        groups[key].append(r)
    out = []
    for key in keys:
        grp = groups[key]
        good = [r for r in grp if r.feasible and np.isfinite(r.eta)]
        etas = np.array([r.eta for r in good])
        out.append(
            {
                "axis_value": key[0],
                "solver": key[1],
                "trials": len(grp),
                "feasible_fraction": len(good) / len(grp),
                "mean_eta": float(etas.mean()) if good else np.nan,
                "mean_eta_db": float(np.mean(10.0 * np.log10(etas))) if good and np.all(etas > 0) else np.nan,
                "mean_min_secrecy_lb": float(np.mean([r.min_secrecy_lb for r in good])) if good else np.nan,
                "mean_secrecy_lb": float(np.mean([r.mean_secrecy_lb for r in good])) if good else np.nan,
            }
        )
    return out


def _fmt(x):
    if isinstance(x, float):
        return "nan" if not np.isfinite(x) else f"{x:.12g}"
    return str(x)


def write_csv(rows, path):
    header = "axis,axis_value,solver,trial_seed,feasible,eta,eta_db,min_secrecy_lb,mean_secrecy_lb,iterations,status"
    lines = [header]
    for r in rows:
        eta_db = 10.0 * np.log10(r.eta) if np.isfinite(r.eta) and r.eta > 0 else float("nan")
        lines.append(
            ",".join(
                [
                    r.axis,
                    _fmt(r.axis_value),
                    r.solver,
                    str(r.trial_seed),
                    "true" if r.feasible else "false",
                    _fmt(r.eta),
                    _fmt(eta_db),
                    _fmt(r.min_secrecy_lb),
                    _fmt(r.mean_secrecy_lb),
                    str(r.iterations),
                    r.status,
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
