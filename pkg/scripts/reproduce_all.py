#!/usr/bin/env python3
"""Run every named experiment preset and drop CSV/JSON pairs in ./results.

Full scale takes a few minutes single-threaded; pass --trials for a quick
smoke run or --threads to parallelize, e.g.:

    python scripts/reproduce_all.py --threads 0 --out-dir results
    python scripts/reproduce_all.py --trials 50        # quick look
"""

import argparse
import pathlib
import sys
import time

from qadapt.cli import DEFAULT_SEED, FIGURE_PRESETS, main as qadapt_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--force", action="store_true")
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for figure in sorted(FIGURE_PRESETS):
        argv = [
            "reproduce", figure,
            "--trials", str(args.trials),
            "--seed", str(args.seed),
            "--threads", str(args.threads),
            "--out", str(out_dir / figure),
        ]
        if args.force:
            argv.append("--force")
        start = time.perf_counter()
        code = qadapt_main(argv)
        print(f"{figure}: exit {code} in {time.perf_counter() - start:.1f} s")
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
