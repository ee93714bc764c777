"""Command-line harness.

Subcommands
-----------
gen     draw one channel realization and write it as .cmx files
run     Monte Carlo optimization runs with convergence traces
sweep   summary rows over a range of surface sizes, including baselines
bench   median per-iteration time per variant and surface size
verify  run the seeded invariant suites
audit   recompute a run's summary files from its traces

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
import argparse
import csv
import math
import os
import sys
import warnings
from dataclasses import replace

from . import checks, experiments
from .bdris.channels import (BLOCKED_ALPHA, Scenario, gen_channels,
                             read_scenario, write_scenario)
from .errors import DegenerateRetraction, FormatError, InvalidInput
from .linalg import write_cmatrix

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

CONVERGENCE_COLUMNS = ("trial", "iteration", "cost", "grad_norm", "elapsed_s")
SUMMARY_COLUMNS = ("trial", "final_cost", "iterations", "time_s", "stop_reason", "error")
AGGREGATE_COLUMNS = ("cost", "method", "rank_mode", "trials", "failed", "mean_cost",
                     "std_cost", "mean_iters", "mean_time_s")
SWEEP_COLUMNS = ("m", "variant", "mean_cost", "std_cost", "mean_iters", "mean_time_s")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x):
    # repr round-trips doubles exactly
    return repr(float(x)) if isinstance(x, float) else str(x)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("values must be positive integers")
    return vals


def _scenario(args):
    scn = read_scenario(args.scenario) if args.scenario else Scenario()
    if getattr(args, "m", None) is not None:
        scn = replace(scn, m=args.m)
    if args.blocked:
        scn = replace(scn, alpha_direct=BLOCKED_ALPHA)
    return scn


def _config(args):
    over = {}
    if args.eps is not None:
        over["eps"] = args.eps
    if args.relative_eps:
        over["relative_eps"] = True
    if args.max_iters is not None:
        over["max_iters"] = args.max_iters
    try:
        return experiments.default_config(args.cost, **over)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_positive(value, name):
    if value is not None and value < 1:
        raise UsageError(f"{name} must be at least 1")


def _outdir(path):
    os.makedirs(path, exist_ok=True)
    return path


def cmd_gen(args):
    scn = _scenario(args)
    ch = gen_channels(scn, args.seed)
    out = _outdir(args.out)
    write_cmatrix(os.path.join(out, "h_d.cmx"), ch.h_d)
    write_cmatrix(os.path.join(out, "f.cmx"), ch.f)
    write_cmatrix(os.path.join(out, "g.cmx"), ch.g)
    write_scenario(os.path.join(out, "scenario.txt"), scn)
    noise_mw = 10 ** (scn.noise_dbm / 10)
    meta = {"seed": args.seed, "noise_dbm": scn.noise_dbm, "noise_mw": noise_mw,
            "tx_power_mw": scn.tx_power_mw, "snr_linear": ch.snr_linear,
            "alpha_direct": scn.alpha_direct}
    with open(os.path.join(out, "meta.txt"), "w") as fh:
        fh.writelines(f"{k}={_fmt(v)}\n" for k, v in meta.items())
    print(f"wrote channel (N_r={ch.n_r}, N_t={ch.n_t}, M={ch.m}) to {out}")
    return EXIT_OK


def _trial_rows(results):
    conv, summ = [], []
    for r in results:
        for i, (c, g, e) in enumerate(zip(r.cost_trace, r.grad_norm_trace, r.elapsed_trace), 1):
            conv.append((r.trial, i, c, g, e))
        final = r.cost_trace[-1] if r.cost_trace else r.cost
        summ.append((r.trial, final, r.iterations, r.time_s, r.stop_reason, r.error))
    return conv, summ


def _aggregate(summary_rows):
    ok = [row for row in summary_rows if not row[5]]
    if not ok:
        return (math.nan,) * 4
    costs = [row[1] for row in ok]
    mean = math.fsum(costs) / len(costs)
    std = math.sqrt(math.fsum((c - mean) ** 2 for c in costs) / len(costs))
    return (mean, std, math.fsum(row[2] for row in ok) / len(ok),
            math.fsum(row[3] for row in ok) / len(ok))


def cmd_run(args):
    _check_positive(args.trials, "--trials")
    _check_positive(args.workers, "--workers")
    scn = _scenario(args)
    cfg = _config(args)
    variant = f"{args.method}-{args.rank}"
    results = experiments.run_trials(scn, args.cost, variant, args.trials, args.seed,
                                     cfg, args.workers)
    out = _outdir(args.out)
    conv, summ = _trial_rows(results)
    _write_csv(os.path.join(out, "convergence.csv"), CONVERGENCE_COLUMNS, conv)
    _write_csv(os.path.join(out, "summary.csv"), SUMMARY_COLUMNS, summ)
    failed = sum(1 for r in results if not r.ok)
    agg = (args.cost, args.method, args.rank, args.trials, failed) + _aggregate(summ)
    _write_csv(os.path.join(out, "aggregate.csv"), AGGREGATE_COLUMNS, [agg])
    for r in results:
        if not r.ok:
            print(f"trial {r.trial} failed: {r.error}", file=sys.stderr)
    print(f"{args.cost}/{variant}: mean cost {agg[5]:.6g} over {args.trials - failed} "
          f"trials, mean iterations {agg[7]:.1f}")
    return EXIT_RUNTIME if failed == len(results) else EXIT_OK


def audit_run(out):
    """Recompute summary and aggregate files from the convergence traces.

    Returns a list of mismatch messages (empty when everything agrees).
    """
    def read(name):
        with open(os.path.join(out, name), newline="") as fh:
            return list(csv.DictReader(fh))

    conv, summ, agg = read("convergence.csv"), read("summary.csv"), read("aggregate.csv")
    problems = []
    last, count = {}, {}
    for row in conv:
        t = int(row["trial"])
        count[t] = count.get(t, 0) + 1
        if int(row["iteration"]) != count[t]:
            problems.append(f"trial {t}: iterations not contiguous")
        last[t] = row["cost"]
    rows = []
    for row in summ:
        t = int(row["trial"])
        if not row["error"]:
            if int(row["iterations"]) != count.get(t, 0):
                problems.append(f"trial {t}: iteration count differs from trace")
            if t in last and row["final_cost"] != last[t]:
                problems.append(f"trial {t}: final cost differs from trace")
        rows.append((t, float(row["final_cost"]), int(row["iterations"]),
                     float(row["time_s"]), row["stop_reason"], row["error"]))
    recomputed = _aggregate(rows)
    for key, val in zip(AGGREGATE_COLUMNS[5:], recomputed):
        if _fmt(val) != agg[0][key]:
            problems.append(f"aggregate {key}: {agg[0][key]} != recomputed {_fmt(val)}")
    return problems


def cmd_audit(args):
    problems = audit_run(args.dir)
    for p in problems:
        print(p, file=sys.stderr)
    print("audit " + ("failed" if problems else "passed"))
    return EXIT_RUNTIME if problems else EXIT_OK


def cmd_sweep(args):
    _check_positive(args.trials, "--trials")
    _check_positive(args.workers, "--workers")
    known = set(experiments.OPT_VARIANTS) | {"unitary-proj", "low-cost", "mse-of-max-rate"}
    unknown = sorted(set(args.variants or ()) - known)
    if unknown:
        raise UsageError(f"unknown variants: {', '.join(unknown)}")
    scn = _scenario(args)
    cfg = _config(args)
    rows, raw = experiments.sweep(args.cost, args.values, args.trials, args.seed, scn,
                                  cfg, args.workers, args.variants)
    out = _outdir(args.out)
    _write_csv(os.path.join(out, "sweep.csv"), SWEEP_COLUMNS, rows)
    trial_rows = [(m, v, r.trial, r.cost, r.iterations, r.time_s, r.error)
                  for (m, v), res in raw.items() for r in res]
    _write_csv(os.path.join(out, "sweep_trials.csv"),
               ("m", "variant", "trial", "cost", "iterations", "time_s", "error"), trial_rows)
    for row in rows:
        print(f"m={row[0]:<4d} {row[1]:<16s} mean={row[2]:.6g} std={row[3]:.3g}")
    everything_failed = all(not r.ok for res in raw.values() for r in res)
    return EXIT_RUNTIME if everything_failed else EXIT_OK


def cmd_bench(args):
    _check_positive(args.trials, "--trials")
    _check_positive(args.iters, "--iters")
    _check_positive(args.repeats, "--repeats")
    variants = args.variants or experiments.OPT_VARIANTS
    unknown = sorted(set(variants) - set(experiments.OPT_VARIANTS))
    if unknown:
        raise UsageError(f"bench supports {', '.join(experiments.OPT_VARIANTS)}; got {', '.join(unknown)}")
    scn = _scenario(args)
    rows = experiments.bench(args.m_values, args.cost, variants, args.trials, args.iters,
                             args.seed, scn, args.repeats)
    if args.out:
        _write_csv(args.out, ("m", "variant", "median_iter_s", "samples"), rows)
    for m, v, med, n in rows:
        print(f"m={m:<4d} {v:<8s} median per-iteration {med * 1e3:.3f} ms ({n} samples)")
    ms = sorted(set(args.m_values))
    if len(ms) > 1:
        by = {(m, v): med for m, v, med, _ in rows}
        for v in variants:
            print(f"{v}: ratio M={ms[-1]}/M={ms[0]} = {by[(ms[-1], v)] / by[(ms[0], v)]:.2f}")
    return EXIT_OK


def cmd_verify(args):
    names = args.suite or list(checks.SUITES)
    results = checks.run_suites(names)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


def _scenario_flags(p, with_m=True):
    p.add_argument("--scenario", help="key=value scenario file")
    if with_m:
        p.add_argument("--m", type=int, help="number of surface ports")
    p.add_argument("--blocked", action="store_true", help="block the direct link")
    p.add_argument("--seed", type=int, default=0)


def _optim_flags(p):
    p.add_argument("--cost", choices=sorted(experiments.COSTS), default="rate")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--eps", type=float)
    p.add_argument("--relative-eps", action="store_true")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = _Parser(prog="usmanifold", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate and store one channel realization")
    _scenario_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="optimization runs with convergence traces")
    _scenario_flags(p)
    _optim_flags(p)
    p.add_argument("--method", choices=("ls", "po"), default="po")
    p.add_argument("--rank", choices=("full", "low"), default="low")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit", help="recompute a run's summaries from its traces")
    p.add_argument("dir")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", help="summary rows over surface sizes")
    _scenario_flags(p, with_m=False)
    _optim_flags(p)
    p.add_argument("--param", choices=("m",), default="m")
    p.add_argument("--values", type=_int_list, default=[16, 32, 64])
    p.add_argument("--variants", type=lambda s: s.split(","))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="per-iteration timing")
    _scenario_flags(p, with_m=False)
    p.add_argument("--cost", choices=sorted(experiments.COSTS), default="sumgain")
    p.add_argument("--m-values", type=_int_list, default=[16, 32, 64])
    p.add_argument("--variants", type=lambda s: s.split(","))
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--repeats", type=int, default=3,
                   help="measurement passes; the fastest median is kept")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--suite", action="append", choices=sorted(checks.SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateRetraction)
            return args.func(args)
    except (UsageError, FormatError, InvalidInput) as exc:
        print(f"usmanifold: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"usmanifold: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
