"""Monte Carlo harness: algorithm variants, trial runs, sweeps and timing.

A *variant* is one way of producing a surface matrix for a channel:

``po-full``, ``po-low``, ``ls-full``, ``ls-low``
    Manifold optimization with phase optimization (PO) or line search (LS)
    over U_s(M) (``full``) or over the reduced U_s(r) followed by a
    full-rank completion (``low``).
``unitary-proj``
    Optimization over the unitary group followed by a retraction.
``low-cost``
    Retracted matched filter; only defined with a direct link.
``mse-of-max-rate``
    The ``po-low`` max-rate design scored with the MSE cost.

Every trial derives its randomness from ``seed + trial`` and results are
returned in trial order whatever the worker count.
"""
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bdris.channels import BLOCKED_ALPHA, Scenario, gen_channels
from .bdris.costs import mse_cost, rate_cost, sumgain_cost
from .bdris.lowrank import expand, low_cost_baseline, low_rank_reduce
from .errors import DegenerateRetraction
from .manifold import random_point
from .optim import (OptimConfig, optimize_ls, optimize_po,
                    optimize_unitary_then_project)

__all__ = [
    "COSTS", "OPT_VARIANTS", "TrialResult", "make_cost", "default_config",
    "solve", "run_trial", "run_trials", "sweep_variants", "sweep",
    "bench", "worker_count",
]

COSTS = {"sumgain": sumgain_cost, "rate": rate_cost, "mse": mse_cost}
OPT_VARIANTS = ("po-full", "po-low", "ls-full", "ls-low")
THREADS_ENV = "US_MANIFOLD_NUM_THREADS"


def make_cost(name, ch):
    try:
        return COSTS[name](ch)
    except KeyError:
        raise ValueError(f"unknown cost {name!r}") from None


def default_config(cost_name, **overrides):
    """Harness defaults: absolute ``eps = 1e-3`` except for the MSE cost.

    MSE values sit far below one at the scenario's SNR, so an absolute
    threshold would stop after the first step; the MSE cost uses a relative
    threshold instead.
    """
    base = OptimConfig(eps=1e-6, relative_eps=True) if cost_name == "mse" else OptimConfig()
    return replace(base, **overrides)


@dataclass
class TrialResult:
    trial: int
    variant: str
    cost: float = float("nan")
    iterations: int = 0
    time_s: float = 0.0
    initial_cost: float = float("nan")
    cost_trace: list = field(default_factory=list)
    grad_norm_trace: list = field(default_factory=list)
    elapsed_trace: list = field(default_factory=list)
    stop_reason: str = ""
    error: str = ""

    @property
    def ok(self):
        return not self.error


def solve(ch, cost_name, variant, cfg=None, seed=0):
    """Run one variant on one channel.

    Returns
    -------
    (UsPoint, OptimReport or None)
        The full-size surface matrix and the optimizer report (``None`` for
        the closed-form ``low-cost`` design).
    """
    cfg = cfg or default_config(cost_name)
    if variant == "low-cost":
        return low_cost_baseline(ch), None
    if variant == "mse-of-max-rate":
        return solve(ch, "rate", "po-low", default_config("rate"), seed)
    if variant == "unitary-proj":
        cost = make_cost(cost_name, ch)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateRetraction)
            return optimize_unitary_then_project(cost, random_point(ch.m, seed).u, cfg)
    try:
        method, rank_mode = variant.split("-")
        opt = {"po": optimize_po, "ls": optimize_ls}[method]
    except (ValueError, KeyError):
        raise ValueError(f"unknown variant {variant!r}") from None
    if rank_mode == "full":
        return opt(make_cost(cost_name, ch), random_point(ch.m, seed), cfg)
    if rank_mode != "low":
        raise ValueError(f"unknown variant {variant!r}")
    red = low_rank_reduce(ch)
    point, report = opt(make_cost(cost_name, red.channel), random_point(red.r, seed), cfg)
    return expand(point, red), report


def run_trial(scn, cost_name, variant, trial, seed, cfg=None):
    """One Monte Carlo trial; failures are recorded rather than raised."""
    s = seed + trial
    res = TrialResult(trial=trial, variant=variant)
    t0 = time.perf_counter()
    try:
        ch = gen_channels(scn, s)
        point, report = solve(ch, cost_name, variant, cfg, s)
        res.cost = float(make_cost(cost_name, ch).value(point))
        if report is not None:
            res.iterations = report.iterations
            res.initial_cost = report.initial_cost
            res.cost_trace = list(report.cost_trace)
            res.grad_norm_trace = list(report.grad_norm_trace)
            res.elapsed_trace = list(report.elapsed_trace)
            res.stop_reason = report.stop_reason
    except Exception as exc:  # recorded per trial, the run goes on
        res.error = f"{type(exc).__name__}: {exc}"
    res.time_s = time.perf_counter() - t0
    return res


def worker_count(requested=1):
    """Requested workers capped by the ``US_MANIFOLD_NUM_THREADS`` variable."""
    n = max(1, int(requested))
    cap = os.environ.get(THREADS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _run_one(args):
    return run_trial(*args)


def run_trials(scn, cost_name, variant, trials, seed=0, cfg=None, workers=1):
    jobs = [(scn, cost_name, variant, t, seed, cfg) for t in range(trials)]
    n = worker_count(workers)
    if n == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        # map preserves submission order
        return list(pool.map(_run_one, jobs))


def sweep_variants(cost_name, scn):
    """Variants reported by a sweep for one cost and scenario."""
    names = list(OPT_VARIANTS) + ["unitary-proj"]
    if scn.alpha_direct < BLOCKED_ALPHA:
        names.append("low-cost")
    if cost_name == "mse":
        names.append("mse-of-max-rate")
    return names


def summarize(results):
    """(mean_cost, std_cost, mean_iters, mean_time_s) over successful trials."""
    ok = [r for r in results if r.ok]
    if not ok:
        return (float("nan"),) * 4
    costs = np.array([r.cost for r in ok])
    return (float(costs.mean()), float(costs.std()),
            float(np.mean([r.iterations for r in ok])),
            float(np.mean([r.time_s for r in ok])))


def sweep(cost_name, m_values, trials, seed=0, base=None, cfg=None, workers=1,
          variants=None):
    """Rows ``(m, variant, mean_cost, std_cost, mean_iters, mean_time_s)``.

    Also returns the per-trial results keyed by ``(m, variant)``.
    """
    base = base or Scenario()
    rows, raw = [], {}
    for m in m_values:
        scn = replace(base, m=int(m))
        for variant in variants or sweep_variants(cost_name, scn):
            score = "mse" if variant == "mse-of-max-rate" else cost_name
            res = run_trials(scn, score, variant, trials, seed, cfg, workers)
            raw[(int(m), variant)] = res
            rows.append((int(m), variant) + summarize(res))
    return rows, raw


def bench(m_values, cost_name="sumgain", variants=OPT_VARIANTS, trials=3,
          iters=25, seed=0, base=None, repeats=1):
    """Median per-iteration wall time for each (M, variant).

    All variants at one M reuse the same channels and starting seeds. The
    first iteration of every run is a warm-up and is excluded. With
    ``repeats > 1`` the whole measurement is repeated and the smallest median
    kept, which filters out passes disturbed by other load.

    Returns
    -------
    list of (m, variant, median_s, n_samples)
    """
    base = base or Scenario()
    # compile/initialize lazily built kernels outside the timed region
    warm = gen_channels(replace(base, m=4), seed)
    for variant in variants:
        solve(warm, cost_name, variant, default_config(cost_name, max_iters=2), seed)

    cfg = default_config(cost_name, eps=1e-12, relative_eps=True, max_iters=iters)
    chans = {m: [gen_channels(replace(base, m=int(m)), seed + t) for t in range(trials)]
             for m in m_values}
    best = {}
    for _ in range(max(1, int(repeats))):
        for m in m_values:
            for variant in variants:
                samples = []
                for t, ch in enumerate(chans[m]):
                    _, report = solve(ch, cost_name, variant, cfg, seed + t)
                    samples.extend(report.per_iteration_times()[1:])
                med = float(np.median(samples)) if samples else float("nan")
                key = (int(m), variant)
                if key not in best or med < best[key][0]:
                    best[key] = (med, len(samples))
    return [(m, v, med, n) for (m, v), (med, n) in best.items()]
