"""Command-line interface: ``mcem-dsp {simulate,fit,test,scan,power,verify}``.

Primary outputs are deterministic given inputs and seed.  Wall-clock
measurements go to a ``.timing.tsv`` sidecar (or standard error) so that
reruns produce byte-identical primary files.

Exit codes: 0 success, 1 usage, 2 data or parse error, 3 numerical failure.
"""
import argparse
import sys
import time

import numpy as np

from .dirichlet import DirichletFitError
from .engine import EmConfig, FitError, Variant
from .genetics import PARAM_NAMES, InvalidThetaError, LikelihoodError
from .harness import (
    ENGINES,
    ReplicateTask,
    fit_variants,
    run_replicate,
    run_tasks,
    run_tests,
    snp_seed,
    summarize_replicates,
)
from .inference import Effect
from .io import DataFormatError, format_value, read_families, read_pedigree, read_scan, write_families, write_tsv
from .simulate import DISEASE_MODELS, SCENARIOS, calibrate_delta, mating_type_probs, simulate_dataset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_fit_options(p):
    p.add_argument("--engine", choices=sorted(ENGINES), default="mcem")
    p.add_argument("--mc-samples", type=_positive_int, default=10000)
    p.add_argument("--burnin", type=int, default=1000, help="burn-in sweeps per chain")
    p.add_argument("--max-iter", type=_positive_int, default=100)
    p.add_argument("--rel-tol", type=float, default=1e-4)
    p.add_argument("--is-switch-iter", type=_positive_int, default=10)
    p.add_argument("--ess-floor", type=float, default=0.2,
                   help="refresh the importance-sampling bank below this ESS fraction (0 disables)")
    p.add_argument("--seed", type=int, default=0)


def _config(args):
    try:
        return EmConfig(
            max_iter=args.max_iter,
            min_iter=min(3, args.max_iter),
            rel_tol=args.rel_tol,
            mc_samples=args.mc_samples,
            mc_burnin=args.burnin,
            is_switch_iter=args.is_switch_iter,
            is_weight_ess_floor=args.ess_floor,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser():
    parser = _Parser(prog="mcem-dsp", description="Monte Carlo EM tests for imprinting and maternal effects "
                                                  "from discordant sib-pair families.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a family file")
    p.add_argument("--model", type=int, choices=sorted(DISEASE_MODELS), required=True)
    p.add_argument("--scenario", type=int, choices=sorted(SCENARIOS), required=True)
    p.add_argument("--n", type=_positive_int, required=True, help="number of families")
    p.add_argument("--ds-plus", action="store_true", help="add one extra sibling per family")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="fit one model variant to a family file")
    p.add_argument("input")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.FULL.value)
    _add_fit_options(p)
    p.add_argument("--out", help="report path (default standard output); the trace goes to OUT.trace.tsv")

    p = sub.add_parser("test", help="likelihood-ratio tests on a family file")
    p.add_argument("input")
    _add_fit_options(p)
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--out", help="report path (default standard output)")

    p = sub.add_parser("scan", help="per-SNP tests over a long-format genotype file")
    p.add_argument("scan")
    p.add_argument("pedigree")
    _add_fit_options(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--min-coverage", type=float, default=1.0)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("power", help="replicate simulation: type I error, power and relative bias")
    p.add_argument("--model", type=int, nargs="+", choices=sorted(DISEASE_MODELS), required=True)
    p.add_argument("--scenario", type=int, nargs="+", choices=sorted(SCENARIOS), required=True)
    p.add_argument("--n", type=_positive_int, nargs="+", default=[100])
    p.add_argument("--ds-plus", action="store_true")
    p.add_argument("--replicates", type=_positive_int, default=100)
    _add_fit_options(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", required=True, help="summary TSV; replicate rows go to OUT.replicates.tsv")

    p = sub.add_parser("verify", help="audit the likelihood code against brute-force enumeration")
    p.add_argument("--draws", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report path (default standard output)")
    return parser


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _timing(path, rows):
    """Wall-clock sidecar next to ``path``, or standard error without one."""
    if path:
        write_tsv(path + ".timing.tsv", ("item", "seconds"), rows)
    else:
        for item, seconds in rows:
            print(f"{item}\t{seconds:.3f}s", file=sys.stderr)


def _kv(pairs):
    return "".join(f"{k}\t{format_value(v)}\n" for k, v in pairs)


def cmd_simulate(args):
    model, scenario = DISEASE_MODELS[args.model], SCENARIOS[args.scenario]
    delta = calibrate_delta(model, scenario)
    data = simulate_dataset(model, scenario, args.n, args.ds_plus, seed=args.seed)
    write_families(data, args.out)
    mu = " ".join(f"{x:.6g}" for x in mating_type_probs(scenario))
    print(f"delta\t{delta:.10g}", file=sys.stderr)
    print(f"mu\t{mu}", file=sys.stderr)
    return EXIT_OK


def _fit_report(fit_result):
    pairs = [("variant", fit_result.model_variant.value)]
    pairs += [(name, float(v)) for name, v in zip(PARAM_NAMES, fit_result.theta_hat.as_array())]
    pairs += [(f"alpha_{m}{f}", float(fit_result.alpha_hat[3 * m + f])) for m in range(3) for f in range(3)]
    pairs += [("converged", fit_result.converged), ("iterations", fit_result.n_iter),
              ("chains", fit_result.n_chains)]
    return pairs


def cmd_fit(args):
    data = read_families(args.input)
    config = _config(args)
    start = time.perf_counter()
    fits = fit_variants(data, config, args.engine, args.seed, variants=(Variant(args.variant),))
    elapsed = time.perf_counter() - start
    res = fits[Variant(args.variant)]
    pairs = [("input_families", len(data)), ("engine", args.engine), ("seed", args.seed)] + _fit_report(res)
    pairs += [("warning", w) for w in res.warnings]
    _emit(_kv(pairs), args.out)
    if args.out:
        cols = ("iteration",) + PARAM_NAMES + tuple(f"alpha_{m}{f}" for m in range(3) for f in range(3)) + (
            "q_value", "resampled", "ess")
        rows = [
            (r.iteration, *map(float, r.theta.as_array()), *map(float, r.alpha), float(r.q_value),
             r.resampled, float(r.ess))
            for r in res.trace
        ]
        write_tsv(args.out + ".trace.tsv", cols, rows)
    _timing(args.out, [("fit", elapsed)])
    return EXIT_OK


def _test_pairs(report, data, level):
    pairs = [("families", len(data)), ("data_type", "DS+1" if data.has_siblings else "DS")]
    labels = {Effect.ASSOCIATION: "T1", Effect.IMPRINTING: "T2", Effect.MATERNAL: "T3"}
    for e, res in report.tests.items():
        key = labels[e]
        pairs += [
            (f"{key}_effect", e.value),
            (f"{key}_statistic", float(res.statistic)),
            (f"{key}_df", res.df),
            (f"{key}_p_value", float(res.p_value)),
            (f"{key}_neg_log10_p", float(res.neg_log10_p)),
            (f"{key}_reject", bool(res.p_value < level)),
        ]
    for v, f in report.fits.items():
        pairs += [(f"{v.value}_{name}", float(x)) for name, x in zip(PARAM_NAMES, f.theta_hat.as_array())]
        pairs.append((f"{v.value}_converged", f.converged))
    pairs += [("warning", w) for w in report.warnings]
    return pairs


def cmd_test(args):
    data = read_families(args.input)
    config = _config(args)
    start = time.perf_counter()
    report = run_tests(data, config, args.engine, args.seed)
    elapsed = time.perf_counter() - start
    _emit(_kv([("engine", args.engine), ("seed", args.seed)] + _test_pairs(report, data, args.alpha)), args.out)
    _timing(args.out, [("test", elapsed)])
    return EXIT_OK


def _scan_one(task):
    snp, data, config, engine, seed = task
    start = time.perf_counter()
    try:
        report = run_tests(data, config, engine, snp_seed(seed, snp))
    except (FitError, ArithmeticError, ValueError) as exc:
        return snp, len(data), None, f"{type(exc).__name__}: {exc}", time.perf_counter() - start
    return snp, len(data), report.tests, "", time.perf_counter() - start


SCAN_COLUMNS = ("snp_id", "families") + tuple(
    f"{e.value}_{k}" for e in Effect for k in ("statistic", "df", "neg_log10_p", "bonferroni")
) + ("status",)


def cmd_scan(args):
    pedigree = read_pedigree(args.pedigree)
    snps = read_scan(args.scan, pedigree, args.min_coverage)
    config = _config(args)
    tasks = [(snp, data, config, args.engine, args.seed) for snp, data in snps.items()]
    results = run_tasks(_scan_one, tasks, args.jobs)
    threshold = args.alpha / len(snps)
    rows, timing, failed = [], [], []
    for snp, n, tests, error, elapsed in results:
        timing.append((snp, elapsed))
        if tests is None:
            failed.append(snp)
            print(f"SNP {snp} failed: {error}", file=sys.stderr)
            rows.append((snp, n) + ("nan", "", "nan", "") * len(Effect) + (error,))
            continue
        row = [snp, n]
        for e in Effect:
            res = tests[e]
            row += [float(res.statistic), res.df, float(res.neg_log10_p), bool(res.p_value < threshold)]
        rows.append(tuple(row) + ("ok",))
    write_tsv(args.out, SCAN_COLUMNS, rows)
    _timing(args.out, timing)
    if failed:
        print(f"{len(failed)} of {len(snps)} SNPs failed", file=sys.stderr)
    return EXIT_OK


def cmd_power(args):
    config = _config(args)
    tasks = [
        ReplicateTask(m, s, n, args.ds_plus, rep, args.seed, args.engine, config)
        for m in args.model
        for s in args.scenario
        for n in args.n
        for rep in range(args.replicates)
    ]
    results = run_tasks(run_replicate, tasks, args.jobs)
    for r in results:
        if r["error"]:
            print(f"model {r['model']} scenario {r['scenario']} n {r['n_families']} rep {r['rep']}: {r['error']}",
                  file=sys.stderr)
    raw_cols = [k for k in results[0] if k not in ("elapsed", "fit_elapsed")]
    for r in results:
        raw_cols += [k for k in r if k not in raw_cols and k not in ("elapsed", "fit_elapsed")]
    write_tsv(args.out + ".replicates.tsv", raw_cols,
              [tuple(r.get(k, "") for k in raw_cols) for r in results])
    summary = summarize_replicates(results, args.alpha)
    cols = [k for k in summary[0] if k != "mean_elapsed"]
    write_tsv(args.out, cols, [tuple(row[k] for k in cols) for row in summary])
    write_tsv(args.out + ".timing.tsv", ("model", "scenario", "n_families", "data_type", "engine", "mean_seconds"),
              [(row["model"], row["scenario"], row["n_families"], row["data_type"], row["engine"],
                row["mean_elapsed"]) for row in summary])
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_audit

    results = run_audit(args.draws, args.seed)
    text = "".join(f"{'PASS' if r.passed else 'FAIL'}\t{r.name}\t{r.detail}\n" for r in results)
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "test": cmd_test,
    "scan": cmd_scan,
    "power": cmd_power,
    "verify": cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mcem-dsp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FitError, DirichletFitError, LikelihoodError, InvalidThetaError, ArithmeticError) as exc:
        print(f"mcem-dsp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataFormatError, OSError, ValueError) as exc:
        print(f"mcem-dsp: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
