"""Seeded ensemble runner: epsilon sweeps, aggregation, serialization.

Every (epsilon, trial) pair owns a seed derived from the master seed by a
fixed mixing function, and each trial splits that seed into one stream
for environment sampling and one for the protocol, so results are
bit-identical no matter how trials are distributed over workers.
Aggregation stacks per-trial curves in trial order before reducing,
which keeps the emitted numbers independent of completion order.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .envstates import EnvSpec, sample_environment
from .protocol import FULL_RANGE, RewardParams, run_trial
from .rng import RngStream, derive_seed

CSV_HEADER = (
    "experiment,env_family,dim,epsilon,iteration,mean_fidelity,std_fidelity,"
    "mean_delta,mean_log_delta,n_trials,master_seed"
)
CSV_COLUMNS = tuple(CSV_HEADER.split(","))


@dataclass(frozen=True)
class ExperimentConfig:
    env_spec: EnvSpec
    epsilons: tuple[float, ...]
    n_trials: int
    n_iters: int
    delta_init: float = FULL_RANGE
    delta_max: float = FULL_RANGE
    master_seed: int = 0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(self.epsilons))
        if not self.epsilons or any(not 0.0 < e < 1.0 for e in self.epsilons):
            raise ValueError(f"epsilons must be nonempty and each in (0, 1), got {self.epsilons}")
        if self.n_trials < 1 or self.n_iters < 1:
            raise ValueError(
                f"n_trials and n_iters must be >= 1, got {self.n_trials}, {self.n_iters}"
            )
        # delegate delta validation
        RewardParams(self.epsilons[0], self.delta_init, self.delta_max)

    def reward_params(self, epsilon: float) -> RewardParams:
        return RewardParams(epsilon, self.delta_init, self.delta_max)

    def to_dict(self) -> dict:
        spec = self.env_spec
        return {
            "env_spec": {
                "family": spec.family,
                "dim": spec.dim,
                "n": spec.n,
                "cutoff": spec.cutoff,
                "alpha_re": spec.alpha_re,
                "alpha_im": spec.alpha_im,
            },
            "epsilons": list(self.epsilons),
            "n_trials": self.n_trials,
            "n_iters": self.n_iters,
            "delta_init": self.delta_init,
            "delta_max": self.delta_max,
            "master_seed": self.master_seed,
            "label": self.label,
        }


@dataclass
class AggregateResult:
    """Per-(epsilon, iteration) statistics over an ensemble of trials.

    Arrays are shaped (n_epsilons, n_iters + 1); iteration 0 is the
    pre-protocol baseline.  ``median_fidelity`` is kept in memory for
    robustness checks but is not part of the serialized schemas.
    ``trial_fidelities``/``trial_records`` are populated only on request.
    """

    config: ExperimentConfig
    version: str
    mean_fidelity: np.ndarray
    std_fidelity: np.ndarray
    median_fidelity: np.ndarray
    mean_delta: np.ndarray
    mean_log_delta: np.ndarray
    trial_seeds: np.ndarray
    trial_fidelities: np.ndarray | None = None
    trial_records: list | None = None

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(self.config.n_iters + 1)

    def eps_index(self, epsilon: float) -> int:
        for i, e in enumerate(self.config.epsilons):
            if math.isclose(e, epsilon, rel_tol=0.0, abs_tol=1e-12):
                return i
        raise KeyError(f"epsilon {epsilon} not in {self.config.epsilons}")

    def rows(self):
        """Yield serialization rows in (epsilon, iteration) order."""
        cfg = self.config
        for i, eps in enumerate(cfg.epsilons):
            for k in range(cfg.n_iters + 1):
                yield {
                    "experiment": cfg.label,
                    "env_family": cfg.env_spec.family,
                    "dim": cfg.env_spec.dim,
                    "epsilon": eps,
                    "iteration": k,
                    "mean_fidelity": float(self.mean_fidelity[i, k]),
                    "std_fidelity": float(self.std_fidelity[i, k]),
                    "mean_delta": float(self.mean_delta[i, k]),
                    "mean_log_delta": float(self.mean_log_delta[i, k]),
                    "n_trials": cfg.n_trials,
                    "master_seed": cfg.master_seed,
                }


def derive_trial_seed(master_seed: int, epsilon_index: int, trial_index: int) -> int:
    """Seed for one (epsilon, trial) cell; fixed mixing, platform-free."""
    if epsilon_index < 0 or trial_index < 0:
        raise ValueError("indices must be >= 0")
    return derive_seed(master_seed, epsilon_index, trial_index)


def _trial_arrays(
    env_spec: EnvSpec,
    params: RewardParams,
    n_iters: int,
    trial_seed: int,
    collect_records: bool,
):
    """Curves (fidelity, delta, log delta) for one trial, iteration 0 first."""
    try:
        env = sample_environment(env_spec, RngStream(derive_seed(trial_seed, 0)))
    except Exception as exc:
        raise RuntimeError(f"environment generation failed: {exc}") from exc
    result = run_trial(
        env, params, n_iters, seed=derive_seed(trial_seed, 1), env_label=env_spec.family
    )
    t = n_iters + 1
    fid = np.empty(t)
    delta = np.empty(t)
    log_delta = np.empty(t)
    fid[0] = result.initial_fidelity
    delta[0] = params.delta_init
    log_delta[0] = math.log(params.delta_init)
    for k, rec in enumerate(result.records, start=1):
        fid[k] = rec.fidelity_after
        delta[k] = rec.delta_after
        log_delta[k] = rec.log_delta_after
    records = result.records if collect_records else None
    return fid, delta, log_delta, records


def _run_block(args):
    """Worker task: one contiguous block of trials for one epsilon."""
    env_spec, params, n_iters, master_seed, eps_index, start, stop, collect_records = args
    t = n_iters + 1
    fid = np.empty((stop - start, t))
    delta = np.empty((stop - start, t))
    log_delta = np.empty((stop - start, t))
    records = [] if collect_records else None
    for offset, trial in enumerate(range(start, stop)):
        trial_seed = derive_trial_seed(master_seed, eps_index, trial)
        try:
            f, d, ld, recs = _trial_arrays(env_spec, params, n_iters, trial_seed, collect_records)
        except Exception as exc:
            raise RuntimeError(f"epsilon index {eps_index}, trial {trial}: {exc}") from exc
        fid[offset] = f
        delta[offset] = d
        log_delta[offset] = ld
        if collect_records:
            records.append((trial, trial_seed, recs))
    return eps_index, start, fid, delta, log_delta, records


def run_ensemble(
    config: ExperimentConfig,
    n_workers: int = 1,
    keep_trials: bool = False,
    collect_records: bool = False,
) -> AggregateResult:
    """Run the full (epsilon x trial) grid and aggregate per iteration.

    ``n_workers`` > 1 distributes trial blocks over a process pool; the
    emitted numbers are identical for any worker count because blocks are
    stitched back by index before the (fixed-order) reduction.
    """
    n_eps = len(config.epsilons)
    n_trials = config.n_trials
    t = config.n_iters + 1

    tasks = []
    block = max(1, math.ceil(n_trials / max(1, n_workers * 4)))
    for i, eps in enumerate(config.epsilons):
        params = config.reward_params(eps)
        for start in range(0, n_trials, block):
            stop = min(start + block, n_trials)
            tasks.append(
                (config.env_spec, params, config.n_iters, config.master_seed, i, start, stop, collect_records)
            )

    fid = np.empty((n_eps, n_trials, t))
    delta = np.empty((n_eps, n_trials, t))
    log_delta = np.empty((n_eps, n_trials, t))
    records_by_eps: list[list] = [[] for _ in range(n_eps)]

    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outputs = list(pool.map(_run_block, tasks))
    else:
        outputs = [_run_block(task) for task in tasks]

    for eps_index, start, f, d, ld, recs in outputs:
        stop = start + f.shape[0]
        fid[eps_index, start:stop] = f
        delta[eps_index, start:stop] = d
        log_delta[eps_index, start:stop] = ld
        if collect_records:
            records_by_eps[eps_index].extend(recs)
    if collect_records:
        for block_records in records_by_eps:
            block_records.sort(key=lambda item: item[0])

    seeds = np.array(
        [
            [derive_trial_seed(config.master_seed, i, trial) for trial in range(n_trials)]
            for i in range(n_eps)
        ],
        dtype=np.uint64,
    )
    return AggregateResult(
        config=config,
        version=__version__,
        mean_fidelity=fid.mean(axis=1),
        std_fidelity=fid.std(axis=1),
        median_fidelity=np.median(fid, axis=1),
        mean_delta=delta.mean(axis=1),
        mean_log_delta=log_delta.mean(axis=1),
        trial_seeds=seeds,
        trial_fidelities=fid if keep_trials else None,
        trial_records=records_by_eps if collect_records else None,
    )


def _fmt(value) -> str:
    """Serialize a cell; numbers carry 12 significant digits."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_results(result: AggregateResult, path: str, fmt: str) -> None:
    """Write the aggregate as CSV or JSON (schemas are fixed)."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in result.rows():
                writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    elif fmt == "json":
        payload = {
            "config": _round_floats(result.config.to_dict()),
            "version": result.version,
            "series": [_round_floats(row) for row in result.rows()],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv or json")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def read_results(path: str):
    """Parse a results file back into (rows, config-or-None)."""
    if path.endswith(".json"):
        with open(path) as fh:
            payload = json.load(fh)
        return payload["series"], payload.get("config")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        rows = []
        for raw in reader:
            row = dict(raw)
            for key in ("dim", "iteration", "n_trials", "master_seed"):
                row[key] = int(row[key])
            for key in ("epsilon", "mean_fidelity", "std_fidelity", "mean_delta", "mean_log_delta"):
                row[key] = float(row[key])
            rows.append(row)
        return rows, None


def write_trial_records(result: AggregateResult, path: str) -> None:
    """Debug dump: one CSV row per (epsilon, trial, iteration)."""
    if result.trial_records is None:
        raise ValueError("ensemble was run without collect_records")
    cfg = result.config
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["experiment", "env_family", "dim", "epsilon", "trial", "trial_seed",
             "iteration", "outcome", "alpha", "beta", "delta", "log_delta", "fidelity"]
        )
        for i, eps in enumerate(cfg.epsilons):
            for trial, trial_seed, records in result.trial_records[i]:
                for rec in records:
                    writer.writerow(
                        [cfg.label, cfg.env_spec.family, cfg.env_spec.dim, _fmt(eps), trial,
                         trial_seed, rec.iteration, rec.outcome, _fmt(rec.alpha), _fmt(rec.beta),
                         _fmt(rec.delta_after), _fmt(rec.log_delta_after), _fmt(rec.fidelity_after)]
                    )


def resolve_workers(requested: int | None) -> int:
    """Worker count from flag value or the QRL_THREADS fallback; 0 = auto."""
    if requested is None:
        raw = os.environ.get("QRL_THREADS", "")
        requested = int(raw) if raw.strip() else 1
    if requested < 0:
        raise ValueError(f"worker count must be >= 0, got {requested}")
    if requested == 0:
        return os.cpu_count() or 1
    return requested
