"""Command-line driver: custom runs, named reproductions, verification.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  Existing output
files are never overwritten unless --force is given.  All defaults are
visible in --help; the named presets under ``reproduce`` are pinned in
code so their outputs cannot drift with config files.
"""

from __future__ import annotations

import argparse
import os
import sys

from ._version import __version__
from . import oracle
from .envstates import DEFAULT_CUTOFF, EnvSpec
from .harness import (
    ExperimentConfig,
    resolve_workers,
    run_ensemble,
    write_results,
    write_trial_records,
)
from .protocol import FULL_RANGE

DEFAULT_EPSILONS = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_TRIALS = 2000
DEFAULT_SEED = 20180114

ENV_CHOICES = ("haar-qubit", "random-qudit", "coherent", "cat", "zero-n")

# Named experiment presets: family, dimension, iteration count.
FIGURE_PRESETS = {
    "fig3": ("haar_qubit", 2, 100),
    "fig4": ("random_qudit", 11, 400),
    "fig5": ("coherent", 11, 100),
    "fig6a": ("cat", 11, 100),
    "fig6b": ("zero_n", 11, 100),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qadapt",
        description="Measurement-based adaptation protocol: ensemble runs and verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser(
        "run",
        help="run a custom ensemble experiment",
        description=(
            "Run an epsilon sweep over seeded trials for one environment family. "
            f"Defaults: epsilon grid {DEFAULT_EPSILONS}, trials {DEFAULT_TRIALS}, "
            "delta-init 4*pi, delta-max 4*pi."
        ),
    )
    run.add_argument("--env", required=True, choices=ENV_CHOICES, help="environment family")
    run.add_argument("--dim", type=int, help="state dimension (required for random-qudit/zero-n)")
    run.add_argument("--n", type=int, help="occupied level for zero-n (0 < n < dim)")
    run.add_argument("--cutoff", type=int, help=f"Fock truncation for coherent/cat (default {DEFAULT_CUTOFF})")
    run.add_argument("--alpha-re", type=float, help="fix Re(alpha) for coherent/cat (default: sampled per trial)")
    run.add_argument("--alpha-im", type=float, help="fix Im(alpha) for coherent/cat (default: sampled per trial)")
    run.add_argument(
        "--epsilon", action="append", type=float, metavar="EPS",
        help=f"reward ratio in (0, 1); repeatable (default grid {DEFAULT_EPSILONS})",
    )
    run.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="trials per epsilon (default %(default)s)")
    run.add_argument("--iterations", type=int, default=100, help="protocol iterations per trial (default %(default)s)")
    run.add_argument("--delta-init", type=float, default=FULL_RANGE, help="initial exploration range (default 4*pi)")
    run.add_argument("--delta-max", type=float, default=FULL_RANGE, help="exploration range cap (default 4*pi)")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed (default %(default)s)")
    run.add_argument("--threads", type=int, default=None, help="worker processes, 0 = auto (QRL_THREADS fallback, default 1)")
    run.add_argument("--out", help="output path (default <family>.<format>)")
    run.add_argument("--format", choices=("csv", "json"), help="output format (default csv, inferred from --out)")
    run.add_argument("--dump-trials", action="store_true", help="also dump per-trial records to <out>.trials.csv")
    run.add_argument("--force", action="store_true", help="overwrite existing output files")

    rep = sub.add_parser(
        "reproduce",
        help="run a pinned named experiment (fig3..fig6b)",
        description=(
            "Run one of the named presets with pinned parameters "
            f"(trials {DEFAULT_TRIALS}, epsilon grid {DEFAULT_EPSILONS}, delta 4*pi) and "
            "write <name>.csv and <name>.json."
        ),
    )
    rep.add_argument("figure", choices=sorted(FIGURE_PRESETS), help="named experiment")
    rep.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="override trial count for smoke runs")
    rep.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed (default %(default)s)")
    rep.add_argument("--threads", type=int, default=None, help="worker processes, 0 = auto (QRL_THREADS fallback, default 1)")
    rep.add_argument("--out", help="output stem (default: the figure name)")
    rep.add_argument("--dump-trials", action="store_true", help="also dump per-trial records to <stem>.trials.csv")
    rep.add_argument("--force", action="store_true", help="overwrite existing output files")

    ver = sub.add_parser(
        "verify",
        help="run the brute-force equivalence suite",
        description="Compare the reduced simulator against the explicit tripartite oracle.",
    )
    ver.add_argument("--seeds", type=int, default=50, help="random cases per check (default %(default)s)")
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base seed for the random cases")
    return parser


def _build_env_spec(args, parser: argparse.ArgumentParser) -> EnvSpec:
    family = args.env.replace("-", "_")
    if args.n is not None and family != "zero_n":
        parser.error("--n applies only to --env zero-n")
    if args.cutoff is not None and family not in ("coherent", "cat"):
        parser.error("--cutoff applies only to --env coherent/cat")
    if (args.alpha_re is not None or args.alpha_im is not None) and family not in ("coherent", "cat"):
        parser.error("--alpha-re/--alpha-im apply only to --env coherent/cat")
    if (args.alpha_re is None) != (args.alpha_im is None):
        parser.error("--alpha-re and --alpha-im must be given together")

    try:
        if family == "haar_qubit":
            if args.dim not in (None, 2):
                parser.error("haar-qubit requires --dim 2")
            return EnvSpec(family, 2)
        if family == "random_qudit":
            if args.dim is None:
                parser.error("--dim is required for random-qudit")
            return EnvSpec(family, args.dim)
        if family == "zero_n":
            if args.dim is None or args.n is None:
                parser.error("--dim and --n are required for zero-n")
            return EnvSpec(family, args.dim, n=args.n)
        cutoff = args.cutoff if args.cutoff is not None else DEFAULT_CUTOFF
        dim = args.dim if args.dim is not None else cutoff + 1
        if dim != cutoff + 1:
            parser.error(f"--dim must equal cutoff + 1 = {cutoff + 1} for {args.env} (or pass --cutoff)")
        if family == "cat" and args.alpha_re is not None and complex(args.alpha_re, args.alpha_im) == 0:
            parser.error("cat requires |alpha| > 0")
        return EnvSpec(family, dim, cutoff=cutoff, alpha_re=args.alpha_re, alpha_im=args.alpha_im)
    except ValueError as exc:
        parser.error(str(exc))


def _check_outputs(paths, force: bool):
    if not force:
        for path in paths:
            if os.path.exists(path):
                raise RuntimeError(f"refusing to overwrite {path} (pass --force)")


def _emit(config: ExperimentConfig, outputs, n_workers: int, dump_trials: bool, force: bool) -> None:
    paths = [path for path, _ in outputs]
    trials_path = paths[0].rsplit(".", 1)[0] + ".trials.csv" if dump_trials else None
    if trials_path:
        paths = paths + [trials_path]
    _check_outputs(paths, force)
    result = run_ensemble(config, n_workers=n_workers, collect_records=dump_trials)
    for path, fmt in outputs:
        write_results(result, path, fmt)
        print(f"wrote {path}")
    if trials_path:
        write_trial_records(result, trials_path)
        print(f"wrote {trials_path}")
    final = {eps: result.mean_fidelity[i, -1] for i, eps in enumerate(config.epsilons)}
    summary = ", ".join(f"eps={eps:g}: {fid:.4f}" for eps, fid in final.items())
    print(f"{config.label}: mean fidelity at iteration {config.n_iters}: {summary}")


def _cmd_run(args, parser) -> int:
    spec = _build_env_spec(args, parser)
    epsilons = tuple(args.epsilon) if args.epsilon else DEFAULT_EPSILONS
    for eps in epsilons:
        if not 0.0 < eps < 1.0:
            parser.error(f"--epsilon must be in (0, 1), got {eps}")
    if args.trials < 1 or args.iterations < 1:
        parser.error("--trials and --iterations must be >= 1")
    if not 0.0 < args.delta_init <= args.delta_max:
        parser.error("need 0 < --delta-init <= --delta-max")

    fmt = args.format
    if fmt is None and args.out and "." in args.out:
        suffix = args.out.rsplit(".", 1)[1]
        fmt = suffix if suffix in ("csv", "json") else None
    fmt = fmt or "csv"
    label = spec.family
    out = args.out or f"{label}.{fmt}"
    outputs = [(out, fmt)]
    if fmt == "csv":
        # CSV alone cannot echo the full config; write the JSON twin so
        # every run carries reproduction metadata.
        outputs.append((out.rsplit(".", 1)[0] + ".json", "json"))

    config = ExperimentConfig(
        env_spec=spec,
        epsilons=epsilons,
        n_trials=args.trials,
        n_iters=args.iterations,
        delta_init=args.delta_init,
        delta_max=args.delta_max,
        master_seed=args.seed,
        label=label,
    )
    _emit(config, outputs, resolve_workers(args.threads), args.dump_trials, args.force)
    return 0


def _cmd_reproduce(args, parser) -> int:
    family, dim, n_iters = FIGURE_PRESETS[args.figure]
    kwargs = {}
    if family == "zero_n":
        kwargs["n"] = 10
    if family in ("coherent", "cat"):
        kwargs["cutoff"] = DEFAULT_CUTOFF
    spec = EnvSpec(family, dim, **kwargs)
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    config = ExperimentConfig(
        env_spec=spec,
        epsilons=DEFAULT_EPSILONS,
        n_trials=args.trials,
        n_iters=n_iters,
        master_seed=args.seed,
        label=args.figure,
    )
    stem = args.out or args.figure
    outputs = [(f"{stem}.csv", "csv"), (f"{stem}.json", "json")]
    _emit(config, outputs, resolve_workers(args.threads), args.dump_trials, args.force)
    return 0


def _cmd_verify(args) -> int:
    results = oracle.verify_suite(n_cases=args.seeds, seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        print(f"{status}  {name:<{width}}  {detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, parser)
        if args.command == "reproduce":
            return _cmd_reproduce(args, parser)
        return _cmd_verify(args)
    except (RuntimeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
